#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "algebrokit/expr.hpp"
#include "algebrokit/report.hpp"
#include "algebrokit/sampling.hpp"

namespace algebrokit {

// How a chart was constructed.  lie_algebra marks the over-a-point encoding
// (base_dim 1, coefficients constant in b, zero anchor) so groupoid
// reconstruction can pick the matrix invariant.
enum class ChartKind { generic, tangent, lie_algebra, zero };

// A Lie algebroid in a single trivializing chart: anchor functions rho^{mu i}
// and structure functions f^{mu nu}_sigma over base coordinates b^1..b^n.
class AlgebroidChart {
 public:
  std::size_t base_dim() const { return n_; }
  std::size_t rank() const { return r_; }
  const std::vector<std::string>& base_variables() const { return vars_; }
  const Box& chart_box() const { return box_; }
  ChartKind kind() const { return kind_; }
  double fd_step() const { return fd_step_; }

  const ScalarField& anchor(std::size_t mu, std::size_t i) const;
  const ScalarField& structure(std::size_t mu, std::size_t nu, std::size_t sigma) const;

  friend AlgebroidChart make_algebroid(std::size_t, std::size_t,
                                       std::vector<std::vector<ScalarField>>,
                                       std::vector<std::vector<std::vector<ScalarField>>>,
                                       Box, ChartKind, double);

 private:
  std::size_t n_ = 0, r_ = 0;
  std::vector<std::string> vars_;
  std::vector<std::vector<ScalarField>> anchor_;                 // r x n
  std::vector<std::vector<std::vector<ScalarField>>> structure_; // r x r x r
  Box box_;
  ChartKind kind_ = ChartKind::generic;
  double fd_step_ = kDefaultFdStep;
};

// Validates shapes and verifies structure antisymmetry in the upper index
// pair at 32 Halton sample points (<= 1e-12).
AlgebroidChart make_algebroid(std::size_t base_dim, std::size_t rank,
                              std::vector<std::vector<ScalarField>> anchor,
                              std::vector<std::vector<std::vector<ScalarField>>> structure,
                              Box chart_box, ChartKind kind = ChartKind::generic,
                              double fd_step = kDefaultFdStep);

// A section X = X_mu e^mu, one coefficient field per fiber basis element.
struct SectionValue {
  std::vector<ScalarField> coefficients;
};

SectionValue constant_section(const AlgebroidChart& A, std::size_t mu);

// [X,Y]^sigma = X_mu Y_nu f^{mu nu}_sigma + (rho_* X)(Y^sigma) - (rho_* Y)(X^sigma).
std::vector<double> bracket_sections(const AlgebroidChart& A, const SectionValue& X,
                                     const SectionValue& Y, std::span<const double> point);

// (rho_* X)^i = X_mu rho^{mu i}.
std::vector<double> anchor_apply(const AlgebroidChart& A, const SectionValue& X,
                                 std::span<const double> point);

// Derivation of a function along rho_* X.
double anchor_derivative(const AlgebroidChart& A, const SectionValue& X, const ScalarField& g,
                         std::span<const double> point);

// Jacobi identity on the constant basis sections plus the anchor-morphism
// property rho_*[e^mu, e^nu] = [rho_* e^mu, rho_* e^nu], both sampled.
// Evaluation errors are flagged per point and the point skipped.
CheckReport check_axioms(const AlgebroidChart& A,
                         std::span<const std::vector<double>> sample_points, double tol);
CheckReport check_axioms(const AlgebroidChart& A, double tol,
                         std::size_t samples = kDefaultSampleCount);

// Degree 0: (delta f)_mu = rho^{mu i} d_i f, an r-vector.
std::vector<double> algebroid_differential(const AlgebroidChart& A, const ScalarField& f,
                                           std::span<const double> point);

// Degree 1: <delta alpha, X ^ Y> = (rho_*X)<alpha,Y> - (rho_*Y)<alpha,X> - <alpha,[X,Y]>.
double algebroid_differential(const AlgebroidChart& A,
                              const std::vector<ScalarField>& alpha, const SectionValue& X,
                              const SectionValue& Y, std::span<const double> point);

// Standard constructors.
AlgebroidChart tangent_algebroid(std::size_t n, Box chart_box);
AlgebroidChart lie_algebra(const std::vector<std::vector<std::vector<double>>>& constants,
                           Box base_box = unit_box(1));
AlgebroidChart zero_algebroid(std::size_t n, std::size_t r, Box chart_box);

}  // namespace algebrokit
