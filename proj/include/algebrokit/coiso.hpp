#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "algebrokit/algebroid.hpp"
#include "algebrokit/poisson.hpp"
#include "algebrokit/report.hpp"

namespace algebrokit {

// A submanifold in adapted coordinates: C = {x^mu = 0} for the trailing
// `codim` coordinates (transversal, Greek), the leading ones tangential.
struct AdaptedSubmanifold {
  std::shared_ptr<const PoissonChart> ambient;  // may be null in core calls
  std::size_t codim = 0;
};

// pi#(N*C) in TC in adapted coordinates: max |pi^{mu nu}| over transversal
// pairs at the sample points.  Twisted charts additionally get the
// horizontality residual max |pi^{mu l} phi_{l i j}| (mu transversal,
// i j tangential).  Points with nonzero trailing coordinates are rejected.
CheckReport check_coisotropic(const PoissonChart& P, const AdaptedSubmanifold& S,
                              std::span<const std::vector<double>> points_on_C, double tol);
CheckReport check_coisotropic(const PoissonChart& P, const AdaptedSubmanifold& S, double tol,
                              std::size_t samples = kDefaultSampleCount);

// The conormal Lie algebroid N*C of a coisotropic C: base = C (tangential
// coordinates), rank = codim, anchor pi^{mu i}|_C, structure
// d_lambda pi^{mu nu}|_C (+ twisted Koszul correction).  Throws if
// check_coisotropic fails at `precondition_tol`.
AlgebroidChart conormal_algebroid(const PoissonChart& P, const AdaptedSubmanifold& S,
                                  double precondition_tol = 1e-7);

// N*C Lagrangian in (T*M, omega~) iff phi_C horizontal: evaluates omega~ on a
// basis of T(N*C) at `momenta_per_point` random unit conormal momenta per
// sample point, reports both residuals and whether the verdicts agree.
CheckReport check_conormal_lagrangian_twisted(const PoissonChart& P,
                                              const AdaptedSubmanifold& S,
                                              std::span<const std::vector<double>> points_on_C,
                                              double tol, std::size_t momenta_per_point = 8,
                                              std::uint64_t seed = 2026);

}  // namespace algebrokit
