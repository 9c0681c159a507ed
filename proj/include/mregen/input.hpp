#pragma once

#include <filesystem>
#include <optional>

#include "mregen/regen.hpp"

namespace mregen {

// Configuration keys accepted in `inputFile`. The file is a restricted
// key = value grammar (ints and nested int lists), never executed.
struct InputConfig {
  std::vector<std::vector<int>> degrees;
  int verbose = 1;
  std::vector<int> algebraic_torus_variable_groups;
  int max_processes = 1;
  bool depth_first = true;
  std::optional<std::uint64_t> seed;
};

InputConfig parse_input_config(const std::string& text);

struct LoadedInputs {
  PolySystem sys;
  InputConfig config;
  TrackSettings track;
};

// Reads inputFile, bertiniInput_variables, bertiniInput_equations and the
// optional bertiniInput_trackingOptions from `dir`, cross-validating the
// declared degrees against the parsed polynomials.
LoadedInputs load_inputs(const std::filesystem::path& dir);

// The two-column summary in the tool's output format.
std::string render_table(const MultidegreeTable& table);

// Entry point behind the binary: returns the process exit code.
int run_main(int argc, const char* const* argv);

}  // namespace mregen
