#pragma once

#include <utility>

#include "mregen/numerics.hpp"
#include "mregen/polysys.hpp"
#include "mregen/rng.hpp"

namespace mregen {

// One equation interpolating t*gamma*start + (1-t)*target. Start and target
// must share a multidegree vector so the hypersurface family has constant
// degree.
struct MovingPair {
  Polynomial start;
  Polynomial target;
  Complex gamma{1.0, 0.0};
};

struct Homotopy {
  VariableGroups groups;
  std::vector<Polynomial> static_eqs;
  std::vector<MovingPair> moving;
};

// Affine normalization <p_j, x_j> = 1, one per projective group.
struct Patch {
  int group_index = 0;
  Vector coeffs;
};
using PatchSet = std::vector<Patch>;

PatchSet draw_patches(const VariableGroups& groups, Rng& rng);

// Scale each projective block so its patch equation holds exactly.
MultiprojectivePoint rescale_to_patches(const MultiprojectivePoint& p,
                                        const VariableGroups& groups,
                                        const PatchSet& patches);

struct TrackSettings {
  double initial_step = 0.1;
  double min_step = 1e-10;
  double step_increase = 2.0;     // applied after `successes_before_increase`
  double step_decrease = 0.5;
  double corrector_tol = 1e-7;
  int corrector_max_iter = 3;
  double final_tol = 1e-10;       // overridable via bertiniInput_trackingOptions
  int max_steps = 10000;
  double infinity_threshold = 1e8;
  int successes_before_increase = 5;
  double singular_ratio = kSingularSigmaRatio;
};

// `FinalTol: 1e-12;` style lines; unrecognized keys warn on stderr.
TrackSettings parse_tracking_options(const std::string& text,
                                     TrackSettings defaults = {});

enum class TrackStatus { RegularSuccess, SingularEndpoint, Diverged, StepFailure };

struct TrackOutcome {
  TrackStatus status = TrackStatus::StepFailure;
  MultiprojectivePoint endpoint;  // meaningful for the first two statuses
  double residual = 0.0;
  double sigma_min = 0.0;
};

// The patched square homotopy H(x,t) = (static, moving, patches - 1) with
// analytic x-Jacobian and t-derivative.
class PatchedHomotopy {
 public:
  PatchedHomotopy(const Homotopy& h, const PatchSet& patches);

  int dim() const { return dim_; }
  Vector eval(const Vector& x, double t) const;
  Matrix jac(const Vector& x, double t) const;
  Vector dt(const Vector& x, double t) const;  // dH/dt: gamma*start - target rows

 private:
  const Homotopy& h_;
  const PatchSet& patches_;
  int dim_;
};

// Fixed-t evaluators for the patched system; errors if not square.
std::pair<SystemEval, JacobianEval> make_patched_system(const Homotopy& h,
                                                        double t,
                                                        const PatchSet& patches);

// Newton sharpening at t=0; up to 10 iterations toward final_tol. Returns the
// best iterate, its residual, and whether the Jacobian went singular.
struct RefineResult {
  Vector point;
  double residual;
  bool singular = false;
};
RefineResult refine_endpoint(const SystemEval& F, const JacobianEval& J,
                             const Vector& x, double final_tol);

TrackOutcome classify_endpoint(const SystemEval& F, const JacobianEval& J,
                               const Vector& x, const VariableGroups& groups,
                               const TrackSettings& s);

// Track one path from t=1 to t=0: Euler predictor, Newton corrector,
// adaptive step halving/doubling, then endpoint refinement + classification.
TrackOutcome track_path(const Homotopy& h, const PatchSet& patches,
                        const MultiprojectivePoint& start, const TrackSettings& s);

}  // namespace mregen
