#pragma once

#include <optional>

#include "mregen/persist.hpp"
#include "mregen/witness.hpp"

namespace mregen {

enum class Strategy { DFS, BFS };

struct RegenConfig {
  std::vector<std::vector<int>> degrees;  // consistency-checked against the system
  std::vector<int> torus_groups;          // groups whose solutions need nonzero coords
  Strategy strategy = Strategy::DFS;
  int max_processes = 1;
  std::uint64_t master_seed = 0;
  double membership_tol = 1e-8;
  double dedup_tol = 1e-8;
  TrackSettings track;
  std::optional<std::filesystem::path> run_dir;  // checkpoint root; nullopt = in-memory
};

// One unit of worker effort: a single path-track for a branch.
struct BranchTask {
  int parent_point = 0;  // index into the node's points
  int poly_index = 0;
  enum class Stage { SliceToLinear, ProductToTarget } stage = Stage::SliceToLinear;
  int group_index = 0;
  int copy_index = 0;  // s in [m_j], 0-based
  MultiprojectivePoint start;
};

struct DepthStats {
  long membership_inside = 0;
  long membership_outside = 0;
  long stage_a_paths = 0;
  long stage_b_paths = 0;
  long torus_dropped = 0;
  long singular_endpoints = 0;
  long diverged_paths = 0;
  long step_failures = 0;
};

struct RunResult {
  MultidegreeTable table;
  std::vector<WitnessNode> nodes;  // root plus every sealed node, in seal order
  std::vector<DepthStats> stats;   // one entry per system polynomial
  bool partial = false;            // some branch lost paths it should not have
  std::uint64_t root_point_id = 0;

  std::vector<const WitnessNode*> leaves(int total_polys) const;
};

// Split a node's points by |g(p)| <= tol * scale(g, p).
std::pair<std::vector<MultiprojectivePoint>, std::vector<MultiprojectivePoint>>
membership_filter(const Polynomial& g, const WitnessNode& node, double tol);

// Greedy merge of points whose canonical blocks agree coordinatewise within tol.
std::vector<MultiprojectivePoint> dedup(const std::vector<MultiprojectivePoint>& points,
                                        double tol);

// Drop points with a coordinate of magnitude <= tol in any designated group.
std::vector<MultiprojectivePoint> torus_filter(const std::vector<MultiprojectivePoint>& points,
                                               const std::vector<int>& torus_groups,
                                               double tol);

// One multihomogeneous regeneration step of `node` against `g`; the node's
// points must already be outside V(g). Returns the child nodes (one per
// realized child slice type).
std::vector<WitnessNode> regenerate_step(const WitnessNode& node, const Polynomial& g,
                                         const PolySystem& sys, const RegenConfig& config,
                                         Rng& rng);

// Full multiregeneration: iterate membership + regeneration over the system's
// polynomials from the root witness, schedule DFS or BFS, track paths on up
// to max_processes workers, persist endpoints as they complete.
RunResult run(const PolySystem& sys, const RegenConfig& config);

}  // namespace mregen
