#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mregen/rng.hpp"

namespace mregen {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Raised by the input-file parsers; message carries a line number when known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VariableGroup {
  std::vector<std::string> names;
  bool projective = true;
};

// Ordered variable groups; variables are indexed flat in declaration order.
class VariableGroups {
 public:
  VariableGroups() = default;
  explicit VariableGroups(std::vector<VariableGroup> groups);

  int group_count() const { return static_cast<int>(groups_.size()); }
  int total_vars() const { return total_; }
  const VariableGroup& group(int j) const { return groups_[j]; }
  int group_size(int j) const { return static_cast<int>(groups_[j].names.size()); }
  int group_offset(int j) const { return offsets_[j]; }
  bool all_projective() const;

  // Projective dimension n_j of group j (size - 1); groups of size 1 are
  // rejected at construction when projective.
  int proj_dim(int j) const { return group_size(j) - 1; }

  // Flat index of a named variable, or -1.
  int var_index(const std::string& name) const;
  // Group owning flat variable v.
  int group_of_var(int v) const { return var_group_[v]; }
  const std::string& var_name(int v) const;

 private:
  std::vector<VariableGroup> groups_;
  std::vector<int> offsets_;
  std::vector<int> var_group_;
  std::map<std::string, int> index_;
  int total_ = 0;
};

// Sparse multivariate polynomial in canonical combined form: one entry per
// exponent vector, zero coefficients absent.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, Complex c);
  static Polynomial variable(int nvars, int v);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<std::vector<int>, Complex>& terms() const { return terms_; }

  void add_term(const std::vector<int>& exponents, Complex coeff);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial pow(int k) const;

  Complex eval(const Vector& x) const;
  // Gradient row (one entry per variable), analytic.
  Eigen::RowVectorXcd gradient(const Vector& x) const;
  // Largest |term| at x; the scale used by relative membership tests.
  double term_scale(const Vector& x) const;

  // Degree in each group's variables; for a projective group all terms must
  // agree or NonHomogeneousError is thrown.
  std::vector<int> group_degrees(const VariableGroups& groups) const;

 private:
  int nvars_ = 0;
  std::map<std::vector<int>, Complex> terms_;
};

struct NonHomogeneousError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolySystem {
  VariableGroups groups;
  std::vector<std::string> names;  // declared function names, in order
  std::vector<Polynomial> polys;
  std::vector<std::vector<int>> degrees;  // rows = polys, cols = groups
};

// One complex coordinate block per variable group.
struct MultiprojectivePoint {
  std::vector<Vector> blocks;
};

Vector flatten(const MultiprojectivePoint& p);
MultiprojectivePoint unflatten(const Vector& x, const VariableGroups& groups);

// Scale each projective block by its largest-magnitude coordinate, making
// that coordinate exactly 1 (real, positive). Affine blocks are untouched.
MultiprojectivePoint canonical_normalize(const MultiprojectivePoint& p,
                                         const VariableGroups& groups);

// --- input-file grammar -----------------------------------------------------

// `hom_variable_group a, b;` / `variable_group a, b;` lines, `#` comments.
VariableGroups parse_variables(const std::string& text);

// `function f1, f2;` declaration plus `name = expr;` assignments. Assignments
// to undeclared names act as subexpressions for later lines. Expressions
// support + - * ^, parentheses, decimal/scientific literals and `I`.
PolySystem parse_equations(const std::string& text, const VariableGroups& groups);

// --- evaluation --------------------------------------------------------------

Vector evaluate(const PolySystem& sys, const MultiprojectivePoint& p);
Matrix jacobian(const PolySystem& sys, const MultiprojectivePoint& p);

// The common group-degree vector of all terms of `poly`.
std::vector<int> multidegree_of(const Polynomial& poly, const VariableGroups& groups);

// Generic degree-1 polynomial supported on one group, coefficients uniform on
// the complex unit circle.
Polynomial random_linear(int group_index, const VariableGroups& groups, Rng& rng);

}  // namespace mregen
