#include "mregen/regen.hpp"

#include <algorithm>
#include <deque>
#include <iostream>
#include <numeric>

#include "mregen/parallel.hpp"

namespace mregen {

namespace {

double full_residual(const PolySystem& sys, int prefix_count, const Polynomial* g,
                     const Slice& slice, const MultiprojectivePoint& p) {
  Vector x = flatten(p);
  double r = 0.0;
  for (int k = 0; k < prefix_count; ++k)
    r = std::max(r, std::abs(sys.polys[k].eval(x)));
  if (g) r = std::max(r, std::abs(g->eval(x)));
  for (const auto& sl : slice.linears) r = std::max(r, std::abs(sl.linear.eval(x)));
  return r;
}

bool point_in_torus(const MultiprojectivePoint& p, const std::vector<int>& torus_groups,
                    double tol) {
  for (int j : torus_groups)
    if (p.blocks[j].cwiseAbs().minCoeff() <= tol) return false;
  return true;
}

std::vector<int> dedup_representatives(const std::vector<MultiprojectivePoint>& points,
                                       double tol) {
  std::vector<int> reps;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    bool fresh = true;
    for (int r : reps) {
      bool same = true;
      for (std::size_t b = 0; b < points[i].blocks.size() && same; ++b)
        same = (points[i].blocks[b] - points[r].blocks[b]).cwiseAbs().maxCoeff() < tol;
      if (same) {
        fresh = false;
        break;
      }
    }
    if (fresh) reps.push_back(i);
  }
  return reps;
}

// Static rows used while tracking: the imposed polynomials themselves when
// square, otherwise `codim` generic recombinations of them. Endpoints are
// validated against the original prefix afterwards.
std::vector<Polynomial> squared_prefix(const PolySystem& sys, int prefix_count,
                                       int codim, Rng& rng) {
  std::vector<Polynomial> rows;
  if (prefix_count == codim) {
    rows.assign(sys.polys.begin(), sys.polys.begin() + prefix_count);
    return rows;
  }
  const int n = sys.groups.total_vars();
  for (int r = 0; r < codim; ++r) {
    Polynomial row(n);
    for (int k = 0; k < prefix_count; ++k)
      row = row + Polynomial::constant(n, rng.unit()) * sys.polys[k];
    rows.push_back(std::move(row));
  }
  return rows;
}

struct PathFailure {
  PointMeta meta;                // parent/vg/rl of the failed continuation
  TrackStatus status;
  MultiprojectivePoint location;  // best-known point, for diagnostics
  const char* note;
};

struct TrackedStep {
  std::vector<WitnessNode> children;  // one per realized child slice type
  DepthStats stats;
  std::vector<PathFailure> failures;
  std::vector<std::string> warnings;
  bool partial = false;
};

const char* status_tag(TrackStatus s) {
  switch (s) {
    case TrackStatus::SingularEndpoint: return "singular";
    case TrackStatus::Diverged: return "diverged";
    default: return "stepFailure";
  }
}

// Stages A and B of the regeneration step for every branchable group of
// `node`, whose `points`/`metas` are the outside, torus-kept witness points.
TrackedStep regen_tracked(const WitnessNode& node,
                          const std::vector<MultiprojectivePoint>& points,
                          const std::vector<PointMeta>& metas, const Polynomial& g,
                          const std::vector<int>& m, const PolySystem& sys,
                          const RegenConfig& cfg, Rng& rng, int workers) {
  TrackedStep out;
  const auto& groups = sys.groups;
  const SliceType e = node.slice.type(groups);

  int ambient_dim = 0;
  for (int j = 0; j < groups.group_count(); ++j) ambient_dim += groups.proj_dim(j);
  const int codim = ambient_dim - std::accumulate(e.begin(), e.end(), 0);

  // patches for this step; parent points are rescaled onto them
  PatchSet patches;
  std::vector<MultiprojectivePoint> starts;
  for (int attempt = 0;; ++attempt) {
    patches = draw_patches(groups, rng);
    try {
      starts.clear();
      for (const auto& p : points) starts.push_back(rescale_to_patches(p, groups, patches));
      break;
    } catch (const std::domain_error&) {
      if (attempt >= 2) throw std::runtime_error("could not find usable patches");
    }
  }

  const std::vector<Polynomial> prefix = squared_prefix(sys, node.prefix_count, codim, rng);

  // fresh generic linears r_{j,s} and their product, of multidegree m
  std::vector<std::vector<Polynomial>> r(groups.group_count());
  Polynomial product = Polynomial::constant(groups.total_vars(), {1.0, 0.0});
  for (int j = 0; j < groups.group_count(); ++j)
    for (int s = 0; s < m[j]; ++s) {
      r[j].push_back(random_linear(j, groups, rng));
      product = product * r[j].back();
    }

  struct Branch {
    int group = 0;
    int removed_linear = 0;  // index into node.slice.linears
    std::vector<Polynomial> statics;
    std::vector<Complex> gamma_a;  // per copy s
    Complex gamma_b;
  };
  std::vector<Branch> branches;
  for (int j = 0; j < groups.group_count(); ++j) {
    if (e[j] < 1 || m[j] < 1) continue;
    Branch br;
    br.group = j;
    br.removed_linear = node.slice.last_in_group(j);
    br.statics = prefix;
    for (int idx = 0; idx < static_cast<int>(node.slice.linears.size()); ++idx)
      if (idx != br.removed_linear) br.statics.push_back(node.slice.linears[idx].linear);
    for (int s = 0; s < m[j]; ++s) br.gamma_a.push_back(rng.unit());
    br.gamma_b = rng.unit();
    branches.push_back(std::move(br));
  }

  // Conservative settings ladder for re-tracking: two regular endpoints of
  // one homotopy may only coincide when a path was jumped, so a dedup merge
  // triggers a re-track of the whole instance with smaller steps.
  constexpr int kMaxAttempts = 3;
  auto escalated = [&](int attempt) {
    TrackSettings s = cfg.track;
    for (int k = 0; k < attempt; ++k) {
      s.initial_step *= 0.2;
      s.corrector_tol = std::max(s.corrector_tol * 1e-2, 1e-12);
    }
    return s;
  };

  // Track every start through one homotopy instance in parallel.
  auto track_instance = [&](const Homotopy& h,
                            const std::vector<MultiprojectivePoint>& instance_starts,
                            bool sharpen, int& attempts_used) {
    std::vector<TrackOutcome> outcomes(instance_starts.size());
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      attempts_used = attempt + 1;
      const TrackSettings settings = escalated(attempt);
      std::vector<std::function<void()>> jobs;
      jobs.reserve(instance_starts.size());
      for (std::size_t i = 0; i < instance_starts.size(); ++i)
        jobs.push_back([&, i, settings] {
          TrackOutcome o = track_path(h, patches, instance_starts[i], settings);
          if (o.status == TrackStatus::RegularSuccess && sharpen) {
            // sharpen well below final_tol so the residual survives
            // renormalization and full-prefix validation
            PatchedHomotopy ph(h, patches);
            auto F = [&ph](const Vector& y) { return ph.eval(y, 0.0); };
            auto J = [&ph](const Vector& y) { return ph.jac(y, 0.0); };
            Vector x = flatten(rescale_to_patches(o.endpoint, groups, patches));
            NewtonReport polish = newton_correct(F, J, x, cfg.track.final_tol * 1e-2, 5);
            o = classify_endpoint(F, J, polish.final_point, groups, cfg.track);
          }
          outcomes[i] = o;
        });
      run_jobs(jobs, workers);

      // a step failure or a collision of two regular endpoints is numerical
      // trouble, never geometry; both warrant a more careful pass
      bool step_failed = false;
      std::vector<MultiprojectivePoint> regular;
      for (const auto& o : outcomes) {
        if (o.status == TrackStatus::RegularSuccess) regular.push_back(o.endpoint);
        if (o.status == TrackStatus::StepFailure) step_failed = true;
      }
      const bool collided =
          dedup_representatives(regular, cfg.dedup_tol).size() != regular.size();
      if (!step_failed && !collided) break;
      if (attempt == kMaxAttempts - 1 && collided) {
        out.warnings.push_back("endpoints still collide after re-tracking at depth " +
                               std::to_string(node.prefix_count));
        out.partial = true;
      }
    }
    return outcomes;
  };

  for (int b = 0; b < static_cast<int>(branches.size()); ++b) {
    const Branch& br = branches[b];

    // --- stage A: move the designated slice linear to each r_{j,s}
    struct BStart {
      int point, copy;
      MultiprojectivePoint start;
    };
    std::vector<BStart> b_starts;
    for (int s = 0; s < m[br.group]; ++s) {
      Homotopy h{groups, br.statics,
                 {MovingPair{node.slice.linears[br.removed_linear].linear, r[br.group][s],
                             br.gamma_a[s]}}};
      int attempts = 0;
      std::vector<TrackOutcome> a_out = track_instance(h, starts, false, attempts);
      out.stats.stage_a_paths += static_cast<long>(starts.size()) * attempts;
      for (std::size_t p = 0; p < a_out.size(); ++p) {
        PointMeta meta{0, metas[p].point_id, br.group + 1, s + 1};
        if (a_out[p].status == TrackStatus::RegularSuccess) {
          try {
            b_starts.push_back(
                {static_cast<int>(p), s, rescale_to_patches(a_out[p].endpoint, groups, patches)});
            continue;
          } catch (const std::domain_error&) {
            a_out[p].status = TrackStatus::StepFailure;
          }
        }
        switch (a_out[p].status) {
          case TrackStatus::SingularEndpoint: ++out.stats.singular_endpoints; out.partial = true; break;
          case TrackStatus::Diverged: ++out.stats.diverged_paths; break;
          default: ++out.stats.step_failures; out.partial = true; break;
        }
        out.failures.push_back({meta, a_out[p].status,
                                a_out[p].endpoint.blocks.empty() ? points[p] : a_out[p].endpoint,
                                "stageA"});
      }
    }

    // --- stage B: deform the product of linears into g
    Slice child_slice;
    for (int idx = 0; idx < static_cast<int>(node.slice.linears.size()); ++idx)
      if (idx != br.removed_linear) child_slice.linears.push_back(node.slice.linears[idx]);

    std::vector<MultiprojectivePoint> b_start_points;
    for (const auto& bs : b_starts) b_start_points.push_back(bs.start);
    Homotopy hb{groups, br.statics, {MovingPair{product, g, br.gamma_b}}};
    int attempts = 0;
    std::vector<TrackOutcome> b_out;
    if (!b_start_points.empty()) {
      b_out = track_instance(hb, b_start_points, true, attempts);
      out.stats.stage_b_paths += static_cast<long>(b_start_points.size()) * attempts;
    }

    std::vector<MultiprojectivePoint> cand;
    std::vector<PointMeta> cand_meta;
    for (std::size_t i = 0; i < b_out.size(); ++i) {
      PointMeta meta{0, metas[b_starts[i].point].point_id, br.group + 1, b_starts[i].copy + 1};
      if (b_out[i].status != TrackStatus::RegularSuccess) {
        switch (b_out[i].status) {
          case TrackStatus::SingularEndpoint: ++out.stats.singular_endpoints; out.partial = true; break;
          case TrackStatus::Diverged: ++out.stats.diverged_paths; break;
          default: ++out.stats.step_failures; out.partial = true; break;
        }
        out.failures.push_back({meta, b_out[i].status,
                                b_out[i].endpoint.blocks.empty() ? points[b_starts[i].point]
                                                                 : b_out[i].endpoint,
                                "stageB"});
        continue;
      }
      const double rfull =
          full_residual(sys, node.prefix_count, &g, child_slice, b_out[i].endpoint);
      if (rfull > 1e-6) {
        // artifact of the prefix recombination, not a point of the variety
        out.failures.push_back({meta, TrackStatus::StepFailure, b_out[i].endpoint,
                                "randomizationJunk"});
        continue;
      }
      if (rfull > cfg.track.final_tol) {
        out.partial = true;
        out.failures.push_back({meta, TrackStatus::StepFailure, b_out[i].endpoint,
                                "validationFailed"});
        continue;
      }
      cand.push_back(b_out[i].endpoint);
      cand_meta.push_back(meta);
    }

    const long branch_starts = static_cast<long>(b_start_points.size());
    std::vector<int> reps = dedup_representatives(cand, cfg.dedup_tol);
    if (reps.empty()) {
      if (branch_starts > 0) {
        SliceType ce = child_slice.type(groups);
        std::string dims;
        for (int v : ce) dims += (dims.empty() ? "" : " ") + std::to_string(v);
        out.warnings.push_back("all paths of branch (group " + std::to_string(br.group) +
                               ") at depth " + std::to_string(node.prefix_count) +
                               " failed; child with dim (" + dims + ") omitted");
      }
      continue;
    }
    WitnessNode child;
    child.prefix_count = node.prefix_count + 1;
    child.slice = std::move(child_slice);
    for (int idx : reps) {
      child.points.push_back(cand[idx]);
      child.meta.push_back(cand_meta[idx]);
    }
    out.children.push_back(std::move(child));
  }
  return out;
}

}  // namespace

// --- public operations --------------------------------------------------------

std::pair<std::vector<MultiprojectivePoint>, std::vector<MultiprojectivePoint>>
membership_filter(const Polynomial& g, const WitnessNode& node, double tol) {
  std::vector<MultiprojectivePoint> inside, outside;
  for (const auto& p : node.points) {
    Vector x = flatten(p);
    if (std::abs(g.eval(x)) <= tol * g.term_scale(x))
      inside.push_back(p);
    else
      outside.push_back(p);
  }
  return {inside, outside};
}

std::vector<MultiprojectivePoint> dedup(const std::vector<MultiprojectivePoint>& points,
                                        double tol) {
  std::vector<MultiprojectivePoint> kept;
  for (int idx : dedup_representatives(points, tol)) kept.push_back(points[idx]);
  return kept;
}

std::vector<MultiprojectivePoint> torus_filter(const std::vector<MultiprojectivePoint>& points,
                                               const std::vector<int>& torus_groups,
                                               double tol) {
  std::vector<MultiprojectivePoint> kept;
  for (const auto& p : points)
    if (point_in_torus(p, torus_groups, tol)) kept.push_back(p);
  return kept;
}

std::vector<WitnessNode> regenerate_step(const WitnessNode& node, const Polynomial& g,
                                         const PolySystem& sys, const RegenConfig& config,
                                         Rng& rng) {
  std::vector<PointMeta> metas = node.meta;
  metas.resize(node.points.size());
  TrackedStep step = regen_tracked(node, node.points, metas, g,
                                   multidegree_of(g, sys.groups), sys, config, rng,
                                   config.max_processes);
  return std::move(step.children);
}

std::vector<const WitnessNode*> RunResult::leaves(int total_polys) const {
  std::vector<const WitnessNode*> out;
  for (const auto& node : nodes)
    if (node.prefix_count == total_polys) out.push_back(&node);
  return out;
}

// --- the scheduler --------------------------------------------------------------

RunResult run(const PolySystem& sys, const RegenConfig& cfg) {
  const auto& groups = sys.groups;
  if (!groups.all_projective())
    throw std::invalid_argument(
        "multiregeneration needs projective variable groups (hom_variable_group)");
  if (sys.polys.empty()) throw std::invalid_argument("empty polynomial system");
  if (!cfg.degrees.empty() && cfg.degrees != sys.degrees)
    throw std::invalid_argument("declared degrees do not match the parsed system");
  for (int j : cfg.torus_groups)
    if (j < 0 || j >= groups.group_count())
      throw std::invalid_argument("torus group index out of range");

  const int total_polys = static_cast<int>(sys.polys.size());
  Rng rng(cfg.master_seed);
  Rng id_rng = rng.fork(1);
  std::set<std::uint64_t> used_ids;

  RunResult res;
  res.stats.resize(total_polys);

  WitnessNode root = root_witness(groups, rng, cfg.track);
  root.meta[0].point_id = persist::fresh_point_id(id_rng, used_ids);
  res.root_point_id = root.meta[0].point_id;
  res.nodes.push_back(std::move(root));

  auto persist_point = [&](const WitnessNode& node, int which) {
    if (!cfg.run_dir) return;
    persist::SolutionRecord rec;
    rec.id.depth = node.depth();
    rec.id.gens.assign(node.depth() + 1, 1);
    rec.id.dim = node.slice.type(groups);
    rec.id.var_group = node.meta[which].var_group;
    rec.id.regen_linear = node.meta[which].regen_linear;
    rec.id.parent_point_id = node.meta[which].parent_id;
    rec.id.point_id = node.meta[which].point_id;
    Vector x = flatten(node.points[which]);
    rec.coordinates.assign(x.data(), x.data() + x.size());
    persist::save_solution(*cfg.run_dir, rec);
  };

  auto log_failure = [&](int depth, const SliceType& dim, const PathFailure& f) {
    if (!cfg.run_dir) return;
    persist::SolutionRecord rec;
    rec.id.depth = depth;
    rec.id.gens.assign(depth + 1, 1);
    rec.id.dim = dim;
    rec.id.var_group = f.meta.var_group;
    rec.id.regen_linear = f.meta.regen_linear;
    rec.id.parent_point_id = f.meta.parent_id;
    rec.id.point_id = persist::fresh_point_id(id_rng, used_ids);
    if (!f.location.blocks.empty()) {
      Vector x = flatten(f.location);
      rec.coordinates.assign(x.data(), x.data() + x.size());
    }
    persist::save_failed(*cfg.run_dir, rec, std::string(f.note) + "_" + status_tag(f.status));
  };

  std::deque<std::size_t> pending{0};
  while (!pending.empty()) {
    std::size_t idx;
    if (cfg.strategy == Strategy::DFS) {
      idx = pending.back();
      pending.pop_back();
    } else {
      idx = pending.front();
      pending.pop_front();
    }
    const WitnessNode node = res.nodes[idx];  // copy: res.nodes grows below
    const int i = node.prefix_count;
    DepthStats& st = res.stats[i];
    const Polynomial& g = sys.polys[i];
    const bool child_is_leaf = (i + 1 == total_polys);

    std::vector<WitnessNode> sealed;

    // membership: points already on V(g) advance unchanged
    std::vector<int> inside_idx, outside_idx;
    for (int p = 0; p < static_cast<int>(node.points.size()); ++p) {
      Vector x = flatten(node.points[p]);
      if (std::abs(g.eval(x)) <= cfg.membership_tol * g.term_scale(x))
        inside_idx.push_back(p);
      else
        outside_idx.push_back(p);
    }
    st.membership_inside += static_cast<long>(inside_idx.size());
    st.membership_outside += static_cast<long>(outside_idx.size());

    if (!inside_idx.empty()) {
      WitnessNode child;
      child.prefix_count = i + 1;
      child.slice = node.slice;
      for (int p : inside_idx) {
        child.points.push_back(node.points[p]);
        child.meta.push_back({0, node.meta[p].point_id, 1, 1});
      }
      sealed.push_back(std::move(child));
    }

    if (!outside_idx.empty()) {
      // a witness point with a zero coordinate in a torus group witnesses a
      // component outside the torus; nothing downstream of it can return
      std::vector<MultiprojectivePoint> keep_pts;
      std::vector<PointMeta> keep_meta;
      for (int p : outside_idx) {
        if (point_in_torus(node.points[p], cfg.torus_groups, cfg.membership_tol)) {
          keep_pts.push_back(node.points[p]);
          keep_meta.push_back(node.meta[p]);
        } else {
          ++st.torus_dropped;
          log_failure(i, node.slice.type(groups),
                      {PointMeta{0, node.meta[p].point_id, 1, 1}, TrackStatus::StepFailure,
                       node.points[p], "outsideTorus"});
        }
      }
      if (!keep_pts.empty()) {
        TrackedStep step = regen_tracked(node, keep_pts, keep_meta, g, sys.degrees[i], sys,
                                         cfg, rng, cfg.max_processes);
        st.stage_a_paths += step.stats.stage_a_paths;
        st.stage_b_paths += step.stats.stage_b_paths;
        st.singular_endpoints += step.stats.singular_endpoints;
        st.diverged_paths += step.stats.diverged_paths;
        st.step_failures += step.stats.step_failures;
        res.partial = res.partial || step.partial;
        for (const auto& w : step.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : step.failures) log_failure(i, node.slice.type(groups), f);
        for (auto& child : step.children) sealed.push_back(std::move(child));
      }
    }

    for (auto& child : sealed) {
      if (child_is_leaf && !cfg.torus_groups.empty()) {
        std::vector<MultiprojectivePoint> pts;
        std::vector<PointMeta> meta;
        for (std::size_t p = 0; p < child.points.size(); ++p) {
          if (point_in_torus(child.points[p], cfg.torus_groups, cfg.membership_tol)) {
            pts.push_back(child.points[p]);
            meta.push_back(child.meta[p]);
          } else {
            ++st.torus_dropped;
            log_failure(child.depth(), child.slice.type(groups),
                        {child.meta[p], TrackStatus::StepFailure, child.points[p],
                         "outsideTorus"});
          }
        }
        child.points = std::move(pts);
        child.meta = std::move(meta);
      }
      if (child.points.empty()) continue;
      for (auto& pm : child.meta) pm.point_id = persist::fresh_point_id(id_rng, used_ids);
      for (int p = 0; p < static_cast<int>(child.points.size()); ++p)
        persist_point(child, p);
      res.nodes.push_back(std::move(child));
      if (!child_is_leaf) pending.push_back(res.nodes.size() - 1);
    }
  }

  std::vector<WitnessNode> leaf_nodes;
  for (const auto& node : res.nodes)
    if (node.prefix_count == total_polys) leaf_nodes.push_back(node);
  res.table = multidegree_table(leaf_nodes, groups);

  // re-verify the sealed witness points against everything imposed on them
  double worst = 0.0;
  for (const auto& node : leaf_nodes)
    for (const auto& p : node.points)
      worst = std::max(worst, full_residual(sys, total_polys, nullptr, node.slice, p));
  if (worst > cfg.track.final_tol)
    std::cerr << "warning: leaf witness residual " << worst << " exceeds final tolerance\n";

  return res;
}

}  // namespace mregen
