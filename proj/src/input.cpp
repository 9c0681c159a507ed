#include "mregen/input.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mregen/persist.hpp"

namespace mregen {

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open '" + file.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// value := integer | '[' [value {',' value}] ']'
struct ConfigValue {
  bool is_list = false;
  long long number = 0;
  std::vector<ConfigValue> items;
};

class ValueParser {
 public:
  ValueParser(const std::string& s, int line) : s_(s), line_(line) {}

  ConfigValue parse() {
    skip_ws();
    ConfigValue v = value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("inputFile line " + std::to_string(line_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  ConfigValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    if (s_[pos_] == '[') {
      ++pos_;
      ConfigValue list;
      list.is_list = true;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return list;
      }
      for (;;) {
        list.items.push_back(value());
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return list;
        }
        fail("expected ',' or ']' in list");
      }
    }
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer or a list");
    ConfigValue v;
    v.number = std::stoll(s_.substr(start, pos_ - start));
    return v;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

long long expect_int(const ConfigValue& v, const std::string& key) {
  if (v.is_list) throw ParseError("key '" + key + "' expects an integer");
  return v.number;
}

std::vector<int> expect_int_list(const ConfigValue& v, const std::string& key) {
  if (!v.is_list) throw ParseError("key '" + key + "' expects a list");
  std::vector<int> out;
  for (const auto& item : v.items)
    out.push_back(static_cast<int>(expect_int(item, key)));
  return out;
}

}  // namespace

InputConfig parse_input_config(const std::string& text) {
  InputConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string pending_key;
  std::string pending_value;
  int pending_line = 0;

  auto commit = [&]() {
    if (pending_key.empty()) return;
    ConfigValue v = ValueParser(pending_value, pending_line).parse();
    const std::string& key = pending_key;
    if (key == "degrees") {
      ConfigValue outer = v;
      if (!outer.is_list) throw ParseError("'degrees' expects a list of lists");
      cfg.degrees.clear();
      for (const auto& row : outer.items)
        cfg.degrees.push_back(expect_int_list(row, key));
    } else if (key == "verbose") {
      cfg.verbose = static_cast<int>(expect_int(v, key));
    } else if (key == "algebraicTorusVariableGroups") {
      cfg.algebraic_torus_variable_groups = expect_int_list(v, key);
    } else if (key == "maxProcesses") {
      cfg.max_processes = static_cast<int>(expect_int(v, key));
      if (cfg.max_processes < 1) throw ParseError("maxProcesses must be >= 1");
    } else if (key == "depthFirst") {
      cfg.depth_first = expect_int(v, key) != 0;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(expect_int(v, key));
    } else {
      std::cerr << "warning: ignoring unrecognized inputFile key '" << key << "'\n";
    }
    pending_key.clear();
    pending_value.clear();
  };

  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      commit();
      auto a = line.find_first_not_of(" \t");
      auto b = line.find_last_not_of(" \t", eq - 1);
      if (a == std::string::npos || a > b)
        throw ParseError("inputFile line " + std::to_string(lineno) + ": missing key");
      pending_key = line.substr(a, b - a + 1);
      pending_value = line.substr(eq + 1);
      pending_line = lineno;
    } else if (!pending_key.empty()) {
      pending_value += " " + line;  // a list may wrap across lines
    } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError("inputFile line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    }
  }
  commit();
  return cfg;
}

LoadedInputs load_inputs(const std::filesystem::path& dir) {
  LoadedInputs loaded;
  loaded.config = parse_input_config(read_file(dir / "inputFile"));
  VariableGroups groups = parse_variables(read_file(dir / "bertiniInput_variables"));
  loaded.sys = parse_equations(read_file(dir / "bertiniInput_equations"), groups);

  TrackSettings defaults;
  const auto tracking = dir / "bertiniInput_trackingOptions";
  loaded.track = std::filesystem::exists(tracking)
                     ? parse_tracking_options(read_file(tracking), defaults)
                     : defaults;

  if (!loaded.config.degrees.empty()) {
    const auto& declared = loaded.config.degrees;
    if (declared.size() != loaded.sys.polys.size())
      throw ParseError("inputFile declares " + std::to_string(declared.size()) +
                       " degree rows but " + std::to_string(loaded.sys.polys.size()) +
                       " polynomials are defined");
    for (std::size_t i = 0; i < declared.size(); ++i) {
      if (declared[i] != loaded.sys.degrees[i]) {
        auto fmt = [](const std::vector<int>& v) {
          std::string s = "(";
          for (std::size_t k = 0; k < v.size(); ++k)
            s += (k ? ", " : "") + std::to_string(v[k]);
          return s + ")";
        };
        throw ParseError("declared degree " + fmt(declared[i]) + " != computed " +
                         fmt(loaded.sys.degrees[i]) + " for " + loaded.sys.names[i]);
      }
    }
  } else {
    loaded.config.degrees = loaded.sys.degrees;
  }
  for (int j : loaded.config.algebraic_torus_variable_groups)
    if (j < 0 || j >= groups.group_count())
      throw ParseError("algebraicTorusVariableGroups index " + std::to_string(j) +
                       " out of range");
  return loaded;
}

std::string render_table(const MultidegreeTable& table) {
  std::ostringstream out;
  out << "| # smooth isolated solutions  | # of general linear equations |\n"
      << "| found                        | added with variables in group |\n";
  for (const auto& row : table.rows) {
    std::string count = std::to_string(row.count);
    out << "  " << count;
    for (std::size_t pad = count.size(); pad < 31; ++pad) out << ' ';
    for (int ej : row.e) out << ej << "  ";
    out << "\n";
  }
  return out.str();
}

namespace {

std::string render_status(const persist::StatusCounts& counts) {
  std::ostringstream out;
  long total = 0;
  for (const auto& [depth, dims] : counts) {
    out << "depth_" << depth << "\n";
    for (const auto& [dim, n] : dims) {
      out << "  dim";
      for (int e : dim) out << " " << e;
      out << ": " << n << "\n";
      total += n;
    }
  }
  out << "total: " << total << "\n";
  return out.str();
}

}  // namespace

int run_main(int argc, const char* const* argv) {
  CLI::App app{"multidegrees of multiprojective varieties by multiregeneration"};
  std::string dir = ".";
  std::uint64_t seed = 0;
  bool bfs = false;
  int max_processes = 0;
  bool show_status = false;
  app.add_option("--dir", dir, "working directory with the input files");
  auto* seed_opt = app.add_option("--seed", seed, "master seed for all random choices");
  app.add_flag("--bfs", bfs, "explore the regeneration tree breadth first");
  app.add_option("--max-processes", max_processes, "worker count (overrides inputFile)");
  app.add_flag("--status", show_status, "print completed-solution counts and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const bool seed_given = seed_opt->count() > 0;

  const std::filesystem::path work_dir = dir;
  const std::filesystem::path run_dir = work_dir / "run";

  if (show_status) {
    std::cout << render_status(persist::status(run_dir));
    return 0;
  }

  LoadedInputs loaded;
  try {
    loaded = load_inputs(work_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  RegenConfig cfg;
  cfg.degrees = loaded.config.degrees;
  cfg.torus_groups = loaded.config.algebraic_torus_variable_groups;
  cfg.strategy = (bfs || !loaded.config.depth_first) ? Strategy::BFS : Strategy::DFS;
  cfg.max_processes = max_processes > 0 ? max_processes : loaded.config.max_processes;
  cfg.track = loaded.track;
  cfg.run_dir = run_dir;
  if (seed_given)
    cfg.master_seed = seed;
  else if (loaded.config.seed)
    cfg.master_seed = *loaded.config.seed;
  else
    cfg.master_seed = std::random_device{}();

  const bool verbose = loaded.config.verbose != 0;
  if (verbose) std::cout << "seed: " << cfg.master_seed << "\n";

  RunResult result;
  try {
    result = run(loaded.sys, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (verbose) {
    std::cout << render_table(result.table);
    if (!result.table.rows.empty()) {
      std::cout << "multidegree:";
      for (std::size_t i = 0; i < result.table.rows.size(); ++i)
        std::cout << (i ? " + " : " ")
                  << monomial_string(result.table.rows[i], result.table.ambient_dims);
      std::cout << "\n";
    }
  }
  return result.partial ? 2 : 0;
}

}  // namespace mregen
