#include "mregen/persist.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mregen {
namespace persist {

namespace {

std::string id12(std::uint64_t id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%012" PRIu64, id);
  return buf;
}

}  // namespace

std::string render(const NodeId& id) {
  std::ostringstream out;
  out << "depth_" << id.depth << "_gens";
  for (int g : id.gens) out << "_" << g;
  out << "_dim";
  for (int e : id.dim) out << "_" << e;
  out << "_varGroup_" << id.var_group << "_regenLinear_" << id.regen_linear
      << "_pointId_" << id12(id.parent_point_id) << "_" << id12(id.point_id);
  return out.str();
}

NodeId parse_node_id(const std::string& name) {
  std::vector<std::string> tok;
  std::string cur;
  for (char ch : name + "_") {
    if (ch == '_') {
      tok.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  auto fail = [&]() -> NodeId {
    throw ParseError("unparsable solution filename '" + name + "'");
  };
  std::size_t at = 0;
  auto expect = [&](const std::string& word) {
    if (at >= tok.size() || tok[at] != word) fail();
    ++at;
  };
  auto number = [&]() -> long long {
    if (at >= tok.size() || tok[at].empty()) fail();
    for (char ch : tok[at])
      if (!std::isdigit(static_cast<unsigned char>(ch))) fail();
    return std::stoll(tok[at++]);
  };

  NodeId id;
  expect("depth");
  id.depth = static_cast<int>(number());
  expect("gens");
  while (at < tok.size() && tok[at] != "dim") id.gens.push_back(static_cast<int>(number()));
  expect("dim");
  while (at < tok.size() && tok[at] != "varGroup") id.dim.push_back(static_cast<int>(number()));
  expect("varGroup");
  id.var_group = static_cast<int>(number());
  expect("regenLinear");
  id.regen_linear = static_cast<int>(number());
  expect("pointId");
  if (at + 2 != tok.size()) fail();
  if (tok[at].size() != 12 || tok[at + 1].size() != 12) fail();
  id.parent_point_id = static_cast<std::uint64_t>(number());
  id.point_id = static_cast<std::uint64_t>(number());
  if (id.gens.empty() || id.dim.empty()) fail();
  return id;
}

std::string format_coordinate(Complex z) {
  auto one = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15e", v);
    std::string s = buf;
    // strip the exponent's sign padding: e+05 -> e5, e-05 -> e-5
    auto e = s.find('e');
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    bool neg = exp[0] == '-';
    if (exp[0] == '+' || exp[0] == '-') exp.erase(0, 1);
    while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
    return mant + "e" + (neg ? "-" : "") + exp;
  };
  return one(z.real()) + " " + one(z.imag());
}

Complex parse_coordinate(const std::string& line) {
  std::istringstream in(line);
  double re = 0, im = 0;
  if (!(in >> re >> im)) throw ParseError("bad coordinate line '" + line + "'");
  return {re, im};
}

namespace {

std::filesystem::path write_record(const std::filesystem::path& dir,
                                   const std::string& name,
                                   const std::vector<Complex>& coords) {
  std::filesystem::create_directories(dir);
  const auto target = dir / name;
  if (std::filesystem::exists(target))
    throw std::runtime_error("duplicate solution file '" + target.string() + "'");
  const auto tmp = dir / (name + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    for (const auto& z : coords) out << format_coordinate(z) << "\n";
  }
  std::filesystem::rename(tmp, target);
  return target;
}

}  // namespace

std::filesystem::path save_solution(const std::filesystem::path& run_dir,
                                    const SolutionRecord& rec) {
  const auto dir = run_dir / kCompletedDir / ("depth_" + std::to_string(rec.id.depth));
  return write_record(dir, render(rec.id), rec.coordinates);
}

std::filesystem::path save_failed(const std::filesystem::path& run_dir,
                                  const SolutionRecord& rec, const std::string& status) {
  const auto dir = run_dir / kFailedDir / ("depth_" + std::to_string(rec.id.depth));
  return write_record(dir, render(rec.id) + "_" + status, rec.coordinates);
}

std::vector<Complex> read_solution(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read '" + file.string() + "'");
  std::vector<Complex> coords;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    coords.push_back(parse_coordinate(line));
  }
  return coords;
}

StatusCounts status(const std::filesystem::path& run_dir) {
  StatusCounts counts;
  const auto base = run_dir / kCompletedDir;
  if (!std::filesystem::exists(base)) return counts;
  for (const auto& depth_entry : std::filesystem::directory_iterator(base)) {
    if (!depth_entry.is_directory()) continue;
    for (const auto& entry : std::filesystem::directory_iterator(depth_entry.path())) {
      const std::string name = entry.path().filename().string();
      if (name.ends_with(".tmp")) continue;
      try {
        NodeId id = parse_node_id(name);
        ++counts[id.depth][id.dim];
      } catch (const ParseError&) {
        std::cerr << "warning: skipping unparsable file '" << name << "'\n";
      }
    }
  }
  return counts;
}

std::uint64_t fresh_point_id(Rng& rng, std::set<std::uint64_t>& used) {
  for (;;) {
    std::uint64_t id = rng.below(1000000000000ULL);
    if (used.insert(id).second) return id;
  }
}

}  // namespace persist
}  // namespace mregen
