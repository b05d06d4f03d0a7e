#pragma once

#include <span>
#include <string>
#include <vector>

#include "algebrokit/apath.hpp"
#include "algebrokit/matrix.hpp"
#include "algebrokit/report.hpp"

namespace algebrokit {

// A faithful matrix realization of a Lie-algebra chart: images of the fiber
// basis e^mu with [M_mu, M_nu] = f^{mu nu}_sigma M_sigma.
struct MatrixRep {
  std::size_t dim = 0;
  std::vector<Mat> images;
};

MatrixRep make_matrix_rep(const AlgebroidChart& A, std::size_t dim, std::vector<Mat> images,
                          double compat_tol = 1e-10);

// Path-ordered solution U(1) of dU/dt = M(a(t)) U, U(0) = 1, by 4th-order
// steps; a at half-steps by 4th-order midpoint interpolation of the samples.
Mat product_integral(const MatrixRep& rep, const APath& path);

// Complete homotopy invariants for the three integrable model classes.
enum class InvariantKind { matrix, pair, fiber_integral };

struct GroupoidInvariant {
  InvariantKind kind;
  std::vector<double> target_base;  // t = X(0)
  std::vector<double> source_base;  // s = X(1)
  Mat value;                        // matrix variant
  std::vector<double> integral;     // fiber_integral variant: trapezoid of a
};

// (X(0), X(1)) for a tangent-algebroid path.
GroupoidInvariant pair_invariant(const APath& path, double constraint_tol = 1e-5);

// (X(0), trapezoid integral of a) for a zero-algebroid path; X must be
// constant within `constancy_tol`.
GroupoidInvariant fiber_integral_invariant(const APath& path, double constancy_tol = 1e-9);

GroupoidInvariant matrix_invariant(const MatrixRep& rep, const APath& path);

GroupoidInvariant invariant_of(const APath& path, InvariantKind kind,
                               const MatrixRep* rep = nullptr);

// Structure maps at the invariant level.  m(u,v) is defined when
// s(u) = t(v); matrix values compose as U_v * U_u (paths run u first).
GroupoidInvariant compose(const GroupoidInvariant& u, const GroupoidInvariant& v,
                          double composability_tol = 1e-9);
GroupoidInvariant unit_at(const GroupoidInvariant& like, const std::vector<double>& base);
GroupoidInvariant inverse_of(const GroupoidInvariant& u);

// The groupoid axiom list evaluated on a composable chain u, v, w
// (s(u) = t(v), s(v) = t(w)): source/target of products, unit laws,
// associativity, inverse source/target swap, u u^-1 and u^-1 u.
CheckReport axiom_suite(const GroupoidInvariant& u, const GroupoidInvariant& v,
                        const GroupoidInvariant& w, double matrix_tol = 1e-6);

// Verifies the invariant is unchanged along homotopy_flow orbits, one
// residual per driver.
CheckReport homotopy_invariance_harness(const APath& path,
                                        std::span<const HomotopyDriver> drivers,
                                        InvariantKind kind, const MatrixRep* rep,
                                        double tol);

}  // namespace algebrokit
