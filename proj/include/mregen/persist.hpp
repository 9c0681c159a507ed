#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mregen/polysys.hpp"
#include "mregen/rng.hpp"

namespace mregen {
namespace persist {

// Identity of one saved endpoint; encodes to the filename grammar
// depth_<d>_gens_<g...>_dim_<e...>_varGroup_<j>_regenLinear_<s>_pointId_<parent>_<self>
struct NodeId {
  int depth = 0;
  std::vector<int> gens;
  std::vector<int> dim;
  int var_group = 1;
  int regen_linear = 1;
  std::uint64_t parent_point_id = 0;
  std::uint64_t point_id = 0;

  bool operator==(const NodeId&) const = default;
};

std::string render(const NodeId& id);
NodeId parse_node_id(const std::string& name);  // throws ParseError

struct SolutionRecord {
  NodeId id;
  std::vector<Complex> coordinates;  // all groups concatenated
};

inline constexpr const char* kCompletedDir = "_completed_smooth_solutions";
inline constexpr const char* kFailedDir = "_failed_paths";

// One coordinate formatted as "<real> <imag>", 16 significant digits,
// exponents without padding (e.g. 1.000000000000000e0).
std::string format_coordinate(Complex z);
Complex parse_coordinate(const std::string& line);

// Writes run_dir/_completed_smooth_solutions/depth_<d>/<name> atomically.
// Errors on I/O failure or a duplicate point id.
std::filesystem::path save_solution(const std::filesystem::path& run_dir,
                                    const SolutionRecord& rec);

// Same layout under _failed_paths with a trailing status suffix; diagnostic
// only, never read back by the pipeline.
std::filesystem::path save_failed(const std::filesystem::path& run_dir,
                                  const SolutionRecord& rec, const std::string& status);

std::vector<Complex> read_solution(const std::filesystem::path& file);

// Per-depth, per-dim counts recovered purely from filenames; safe to run
// while workers are still writing.
using StatusCounts = std::map<int, std::map<std::vector<int>, long>>;
StatusCounts status(const std::filesystem::path& run_dir);

// Uniform 12-digit decimal, redrawn on collision with `used`.
std::uint64_t fresh_point_id(Rng& rng, std::set<std::uint64_t>& used);

}  // namespace persist
}  // namespace mregen
