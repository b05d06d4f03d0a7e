#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algebrokit/algebroid.hpp"
#include "algebrokit/expr.hpp"
#include "algebrokit/matrix.hpp"
#include "algebrokit/report.hpp"
#include "algebrokit/sampling.hpp"

namespace algebrokit {

// Sign pinned by oracle calibration: with pi components read off the bracket
// table (pi^{ij} = {x^i, x^j}) and phi stored as phi(d_i, d_j, d_k), the
// nondegenerate oracle pi = -inverse(omega), phi = d(omega) satisfies
// J^{ijk} = c * pi^{ia} pi^{jb} pi^{kc} phi_{abc} with c = -1.
inline constexpr double kTwistedJacobiC = -1.0;

// A (twisted) Poisson manifold in one chart: bivector components pi^{ij} and
// an optional closed 3-form phi_{ijk} stored as a full antisymmetric array.
class PoissonChart {
 public:
  std::size_t dim() const { return m_; }
  const std::vector<std::string>& variables() const { return vars_; }
  const Box& chart_box() const { return box_; }
  double fd_step() const { return fd_step_; }

  const ScalarField& bivector(std::size_t i, std::size_t j) const;
  bool twisted() const { return !twist_.empty(); }
  const ScalarField& twist(std::size_t i, std::size_t j, std::size_t k) const;

  friend PoissonChart make_poisson(std::vector<std::vector<ScalarField>>,
                                   std::vector<std::vector<std::vector<ScalarField>>>, Box,
                                   std::vector<std::string>, double);

 private:
  std::size_t m_ = 0;
  std::vector<std::string> vars_;
  std::vector<std::vector<ScalarField>> bivector_;            // m x m
  std::vector<std::vector<std::vector<ScalarField>>> twist_;  // m x m x m or empty
  Box box_;
  double fd_step_ = kDefaultFdStep;
};

// Validates bivector antisymmetry (1e-12 at 32 sample points) and, when a
// twist is supplied, its full antisymmetry and closedness (d phi <= 1e-7).
PoissonChart make_poisson(std::vector<std::vector<ScalarField>> bivector,
                          std::vector<std::vector<std::vector<ScalarField>>> twist, Box box,
                          std::vector<std::string> variables = {},
                          double fd_step = kDefaultFdStep);

// {f,g}(x) = sum_ij pi^{ij}(x) d_i f d_j g.
double poisson_bracket(const PoissonChart& P, const ScalarField& f, const ScalarField& g,
                       std::span<const double> point);

// {f,g} as an evaluable field (finite-difference gradients inside).
ScalarField poisson_bracket_field(const PoissonChart& P, const ScalarField& f,
                                  const ScalarField& g);

// Untwisted: max |J^{ijk}| with J = pi^{il} d_l pi^{jk} + cyclic.
// Twisted: max |J^{ijk} - c pi^{ia} pi^{jb} pi^{kc} phi_{abc}|, c = kTwistedJacobiC.
CheckReport check_jacobi(const PoissonChart& P,
                         std::span<const std::vector<double>> sample_points, double tol);
CheckReport check_jacobi(const PoissonChart& P, double tol,
                         std::size_t samples = kDefaultSampleCount);

// The dual Poisson structure on A*: coordinates (b, al1..alr) with
// {al^mu, al^nu} = al^sigma f^{mu nu}_sigma, {al^mu, b^i} = rho^{mu i},
// {b^i, b^j} = 0.
PoissonChart dualize(const AlgebroidChart& A, double alpha_lo = -1.0, double alpha_hi = 1.0);

// Cotangent Lie algebroid T*_pi M (twisted when P carries a twist):
// anchor rho^{ri} = pi^{ri}, structure f^{rs}_k = d_k pi^{rs}
// (+ pi^{ra} pi^{sb} phi_{abk} in the twisted case).
// Twisted charts must pass check_jacobi first.
AlgebroidChart cotangent_algebroid(const PoissonChart& P, double precondition_tol = 1e-6);

// [df, dg] = d{f,g} + iota_{pi#df} iota_{pi#dg} phi, m covector components.
std::vector<double> twisted_koszul_bracket(const PoissonChart& P, const ScalarField& f,
                                           const ScalarField& g, std::span<const double> point);

struct CotangentPoint {
  std::vector<double> base;      // x
  std::vector<double> momentum;  // p
};

// Matrix of omega~ = omega + omega^ on T*M in coordinates (x, p):
// canonical block [[0,-I],[I,0]] plus the x-x correction p_i pi^{ij} phi_{jkl}.
Mat twisted_cotangent_form(const PoissonChart& P, const CotangentPoint& point);

// Columns over a common uniform t-grid.
struct PathGrid {
  std::vector<std::vector<double>> X;    // (N+1) x m base curve
  std::vector<std::vector<double>> eta;  // (N+1) x m covector density
};
struct PathVariation {
  std::vector<std::vector<double>> xi;  // (N+1) x m tangent component
  std::vector<std::vector<double>> e;   // (N+1) x m covector-density component
};

// Omega~ = Omega + Omega^ by the trapezoid rule:
//   Omega  = int <e1, xi2> - <e2, xi1>
//   Omega^ = 1/2 int phi(X)(pi#(X) eta, xi1, xi2).
double pathspace_twist_form(const PoissonChart& P, const PathGrid& path,
                            const PathVariation& v1, const PathVariation& v2);

}  // namespace algebrokit
