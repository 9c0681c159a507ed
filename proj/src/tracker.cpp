#include "mregen/tracker.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

namespace mregen {

PatchSet draw_patches(const VariableGroups& groups, Rng& rng) {
  PatchSet patches;
  for (int j = 0; j < groups.group_count(); ++j) {
    if (!groups.group(j).projective) continue;
    Patch p;
    p.group_index = j;
    p.coeffs = Vector(groups.group_size(j));
    for (int v = 0; v < p.coeffs.size(); ++v) p.coeffs[v] = rng.unit();
    patches.push_back(std::move(p));
  }
  return patches;
}

MultiprojectivePoint rescale_to_patches(const MultiprojectivePoint& p,
                                        const VariableGroups& groups,
                                        const PatchSet& patches) {
  MultiprojectivePoint q = p;
  for (const auto& patch : patches) {
    auto& b = q.blocks[patch.group_index];
    Complex w = (patch.coeffs.transpose() * b).value();
    if (std::abs(w) < 1e-12 * b.cwiseAbs().maxCoeff())
      throw std::domain_error("point lies on the patch hyperplane");
    b /= w;
    (void)groups;
  }
  return q;
}

TrackSettings parse_tracking_options(const std::string& text, TrackSettings defaults) {
  TrackSettings s = defaults;
  std::string clean;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    clean.push_back(comment ? ' ' : ch);
  }
  std::istringstream in(clean);
  std::string stmt;
  while (std::getline(in, stmt, ';')) {
    auto a = stmt.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) continue;
    auto colon = stmt.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected 'Key: value;' in tracking options, got '" + stmt + "'");
    std::string key = stmt.substr(a, stmt.find_last_not_of(" \t\r\n", colon - 1) - a + 1);
    std::string value = stmt.substr(colon + 1);
    if (key == "FinalTol") {
      try {
        s.final_tol = std::stod(value);
      } catch (const std::exception&) {
        throw ParseError("bad FinalTol value '" + value + "'");
      }
      if (s.final_tol <= 0) throw ParseError("FinalTol must be positive");
    } else {
      std::cerr << "warning: ignoring unrecognized tracking option '" << key << "'\n";
    }
  }
  return s;
}

PatchedHomotopy::PatchedHomotopy(const Homotopy& h, const PatchSet& patches)
    : h_(h), patches_(patches) {
  dim_ = h.groups.total_vars();
  const int rows = static_cast<int>(h.static_eqs.size() + h.moving.size() + patches.size());
  if (rows != dim_)
    throw std::invalid_argument("patched homotopy is not square (" +
                                std::to_string(rows) + " equations, " +
                                std::to_string(dim_) + " variables)");
  for (const auto& mv : h.moving) {
    auto ds = mv.start.group_degrees(h.groups);
    auto dt_ = mv.target.group_degrees(h.groups);
    for (int j = 0; j < h.groups.group_count(); ++j)
      if (h.groups.group(j).projective && ds[j] != dt_[j])
        throw std::invalid_argument("moving pair degrees differ in group " + std::to_string(j));
  }
}

Vector PatchedHomotopy::eval(const Vector& x, double t) const {
  Vector out(dim_);
  int row = 0;
  for (const auto& f : h_.static_eqs) out[row++] = f.eval(x);
  for (const auto& mv : h_.moving)
    out[row++] = t * mv.gamma * mv.start.eval(x) + (1.0 - t) * mv.target.eval(x);
  for (const auto& patch : patches_) {
    const int off = h_.groups.group_offset(patch.group_index);
    out[row++] = (patch.coeffs.transpose() * x.segment(off, patch.coeffs.size())).value() -
                 Complex{1.0, 0.0};
  }
  return out;
}

Matrix PatchedHomotopy::jac(const Vector& x, double t) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  int row = 0;
  for (const auto& f : h_.static_eqs) out.row(row++) = f.gradient(x);
  for (const auto& mv : h_.moving)
    out.row(row++) =
        t * mv.gamma * mv.start.gradient(x) + (1.0 - t) * mv.target.gradient(x);
  for (const auto& patch : patches_) {
    const int off = h_.groups.group_offset(patch.group_index);
    out.row(row).segment(off, patch.coeffs.size()) = patch.coeffs.transpose();
    ++row;
  }
  return out;
}

Vector PatchedHomotopy::dt(const Vector& x, double t) const {
  (void)t;
  Vector out = Vector::Zero(dim_);
  int row = static_cast<int>(h_.static_eqs.size());
  for (const auto& mv : h_.moving)
    out[row++] = mv.gamma * mv.start.eval(x) - mv.target.eval(x);
  return out;
}

std::pair<SystemEval, JacobianEval> make_patched_system(const Homotopy& h, double t,
                                                        const PatchSet& patches) {
  // own copies so the returned closures outlive the caller's arguments
  auto owned = std::make_shared<std::pair<Homotopy, PatchSet>>(h, patches);
  auto ph = std::make_shared<PatchedHomotopy>(owned->first, owned->second);
  SystemEval F = [owned, ph, t](const Vector& x) { return ph->eval(x, t); };
  JacobianEval J = [owned, ph, t](const Vector& x) { return ph->jac(x, t); };
  return {F, J};
}

RefineResult refine_endpoint(const SystemEval& F, const JacobianEval& J,
                             const Vector& x, double final_tol) {
  NewtonReport report = newton_correct(F, J, x, final_tol, 10);
  return {report.final_point, report.residual_norm, report.singular_jacobian};
}

namespace {

bool escaped_chart(const Vector& x, double threshold) {
  return x.cwiseAbs().maxCoeff() > threshold;
}

}  // namespace

TrackOutcome classify_endpoint(const SystemEval& F, const JacobianEval& J,
                               const Vector& x, const VariableGroups& groups,
                               const TrackSettings& s) {
  TrackOutcome out;
  out.residual = F(x).cwiseAbs().maxCoeff();
  auto [smax, smin] = extreme_singular_values(J(x));
  out.sigma_min = smin;
  if (out.residual > s.final_tol) {
    out.status = TrackStatus::StepFailure;
    return out;
  }
  out.endpoint = canonical_normalize(unflatten(x, groups), groups);
  out.status = (smax > 0.0 && smin >= s.singular_ratio * smax)
                   ? TrackStatus::RegularSuccess
                   : TrackStatus::SingularEndpoint;
  return out;
}

TrackOutcome track_path(const Homotopy& h, const PatchSet& patches,
                        const MultiprojectivePoint& start, const TrackSettings& s) {
  PatchedHomotopy ph(h, patches);
  Vector x = flatten(start);

  auto newton_at = [&](const Vector& x0, double t, double tol, int iters) {
    return newton_correct([&](const Vector& y) { return ph.eval(y, t); },
                          [&](const Vector& y) { return ph.jac(y, t); }, x0, tol, iters);
  };

  // polish the start point onto H(., 1)
  NewtonReport polish = newton_at(x, 1.0, s.corrector_tol, s.corrector_max_iter);
  if (!polish.converged) return TrackOutcome{TrackStatus::StepFailure};
  x = polish.final_point;

  double t = 1.0;
  double dt = s.initial_step;
  int successes = 0;
  for (int step = 0; t > 0.0; ++step) {
    if (step >= s.max_steps) return TrackOutcome{TrackStatus::StepFailure};
    dt = std::min(dt, t);
    const double t_new = t - dt;

    // Euler predictor along dx/dt = -J^{-1} dH/dt
    Vector x_pred = x;
    if (auto v = lu_solve(ph.jac(x, t), ph.dt(x, t))) {
      x_pred = x + *v * dt;  // delta t of the move is -dt
    }
    NewtonReport corr = newton_at(x_pred, t_new, s.corrector_tol, s.corrector_max_iter);
    if (corr.converged) {
      x = corr.final_point;
      t = t_new;
      if (++successes >= s.successes_before_increase) {
        dt = std::min(dt * s.step_increase, s.initial_step);
        successes = 0;
      }
      if (escaped_chart(x, s.infinity_threshold))
        return TrackOutcome{TrackStatus::Diverged};
    } else {
      successes = 0;
      dt *= s.step_decrease;
      if (dt < s.min_step) {
        // paths that blow up numerically before t=0 count as diverged when
        // the coordinates are already enormous
        if (escaped_chart(x, s.infinity_threshold))
          return TrackOutcome{TrackStatus::Diverged};
        return TrackOutcome{TrackStatus::StepFailure};
      }
    }
  }

  SystemEval F0 = [&](const Vector& y) { return ph.eval(y, 0.0); };
  JacobianEval J0 = [&](const Vector& y) { return ph.jac(y, 0.0); };
  RefineResult refined = refine_endpoint(F0, J0, x, s.final_tol);
  if (escaped_chart(refined.point, s.infinity_threshold))
    return TrackOutcome{TrackStatus::Diverged};
  return classify_endpoint(F0, J0, refined.point, h.groups, s);
}

}  // namespace mregen
