#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "algebrokit/algebroid.hpp"
#include "algebrokit/coiso.hpp"
#include "algebrokit/poisson.hpp"
#include "algebrokit/report.hpp"

namespace algebrokit {

// A discretized bundle map TI -> A on a uniform grid over [0,1]: base curve
// X(t) and fiber coefficients a_mu(t), stored as the density of a = a_mu dt.
struct APath {
  std::shared_ptr<const AlgebroidChart> chart;
  std::vector<std::vector<double>> X;  // (N+1) x n
  std::vector<std::vector<double>> a;  // (N+1) x r

  std::size_t segments() const { return X.empty() ? 0 : X.size() - 1; }
  double dt() const { return 1.0 / static_cast<double>(segments()); }
};

// Max over interior grid points of |dX/dt - rho(X) a| with 4th-order
// stencils (offset at the first/last interior points).  The one-sided
// 2nd-order endpoint values are diagnostics, reported separately by
// constraint_residual_report and excluded from this max.
double constraint_residual(const APath& path);
CheckReport constraint_residual_report(const APath& path, double tol);

using AProfile = std::function<void(double t, std::span<double> out)>;

// Classical 4th-order one-step integration of dX/dt = rho(X) a(t).
// Throws if the trajectory leaves the chart box.
APath integrate_apath(std::shared_ptr<const AlgebroidChart> chart,
                      std::span<const double> X0, const AProfile& a_profile, std::size_t N);

// Driver data C in Gamma_0: vanishes at t = 0, 1 by construction through the
// bump profile multiplied onto the raw components.
struct HomotopyDriver {
  enum class Profile { none, quadratic, quartic, sin_squared };
  using Components = std::function<void(double t, double s, std::span<double> out)>;

  Components b;          // fiber components (rank of the target chart)
  Components beta;       // base covector components, optional (full lifted flow)
  Profile profile = Profile::quartic;
  std::size_t s_steps = 100;
  double s_length = 1.0;

  double profile_factor(double t) const;
  void eval_b(double t, double s, std::span<double> out) const;
  void eval_beta(double t, double s, std::span<double> out) const;
};

struct FlowResult {
  APath path;
  CheckReport report;
};

// Restricted homotopy foliation flow (the first and last delta-equations):
//   dX/ds = -rho(X) b,   da/ds = -db/dt - f(X)(a, b),
// integrated by 4th-order steps in s; db/dt by grid stencils.  Drift is
// monitored, never projected out.
FlowResult homotopy_flow(const APath& path, const HomotopyDriver& driver,
                         double tol_in = 1e-5, double abort_threshold = 1e-2);

// One time-sample per grid point of a point of T*P(A*).
struct LiftedState {
  std::vector<std::vector<double>> X;      // (N+1) x n
  std::vector<std::vector<double>> alpha;  // (N+1) x r
  std::vector<std::vector<double>> eta;    // (N+1) x n
  std::vector<std::vector<double>> a;      // (N+1) x r
};

struct FoliationField {
  std::vector<std::vector<double>> dX, dalpha, deta, da;
};

// The four delta-equations of the lifted foliation, evaluated verbatim on
// sampled driver data (beta, b) at fixed s.
FoliationField full_foliation_field(const AlgebroidChart& A, const LiftedState& state,
                                    const std::vector<std::vector<double>>& beta_samples,
                                    const std::vector<std::vector<double>>& b_samples);

struct LiftedFlowResult {
  LiftedState state;
  CheckReport report;  // running max of |alpha|, |eta| over the evolution
};

// Integrates the full lifted foliation field in s (auto-vanishing harness).
LiftedFlowResult full_lifted_flow(const AlgebroidChart& A, const LiftedState& initial,
                                  const HomotopyDriver& driver, double tol = 1e-10);

struct PoissonFoliationField {
  std::vector<std::vector<double>> dX, deta;
};

// Poisson-case foliation field:
//   dX^I = -C_J pi^{JI}(X),   deta_I = -dC_I/dt - d_I pi^{RS}(X) eta_R C_S.
PoissonFoliationField poisson_foliation_field(const PoissonChart& P,
                                              const std::vector<std::vector<double>>& X,
                                              const std::vector<std::vector<double>>& eta,
                                              const std::vector<std::vector<double>>& C);

// Cotangent path (X, eta) over the ambient chart of S, flowed by the Poisson
// foliation field with a driver supported on the conormal directions
// ((C_X)_i = 0).  X^mu and eta_i staying near 0 is measured, not enforced.
struct CotangentFlowResult {
  std::vector<std::vector<double>> X, eta;
  CheckReport report;
};
CotangentFlowResult coiso_restricted_flow(const PoissonChart& P, const AdaptedSubmanifold& S,
                                          const std::vector<std::vector<double>>& X,
                                          const std::vector<std::vector<double>>& eta,
                                          const HomotopyDriver& driver,
                                          double membership_tol = 1e-8);

// Membership in L(C): transversal coordinates of X and tangential components
// of eta vanish.  S = zero section of A* specializes to membership in P(A).
CheckReport membership_L(const std::vector<std::vector<double>>& X,
                         const std::vector<std::vector<double>>& eta,
                         const AdaptedSubmanifold& S, std::size_t ambient_dim, double tol);

// Groupoid-style composition at path level: p1 on [0, 1/2], p2 on [1/2, 1],
// densities doubled by the chain rule.  Requires a common grid size and
// X_{p1}(1) = X_{p2}(0) within 1e-9.
APath concat(const APath& p1, const APath& p2);

// t -> 1 - t with the density negated.
APath invert(const APath& p);

}  // namespace algebrokit
