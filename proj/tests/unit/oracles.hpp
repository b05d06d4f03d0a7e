#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <functional>
#include <span>
#include <vector>

#include "algebrokit/matrix.hpp"

namespace oracles {

using VectorField = std::function<std::vector<double>(std::span<const double>)>;

// Commutator [V, W]^i = V^j d_j W^i - W^j d_j V^i by plain 2nd-order
// central differences (deliberately a different stencil than the library).
std::vector<double> vector_field_commutator(const VectorField& V, const VectorField& W,
                                            std::span<const double> point, double h = 1e-5);

// Matrix exponential by scaling-and-squaring on the Taylor series.
algebrokit::Mat expm(const algebrokit::Mat& M);

// Rotation by angle about a coordinate axis (0,1,2) in R^3.
algebrokit::Mat rotation3(std::size_t axis, double angle);

// so(3) generators (J_k)_{ij} = -epsilon_{kij} with [J_1,J_2] = J_3.
std::vector<algebrokit::Mat> so3_generators();

// sl(2,R) basis H, E, F with [H,E] = 2E, [H,F] = -2F, [E,F] = H.
std::vector<algebrokit::Mat> sl2_generators();

// epsilon_{abc} structure constants of so(3).
std::vector<std::vector<std::vector<double>>> epsilon3();

// sl(2,R) structure constants in the basis (H, E, F).
std::vector<std::vector<std::vector<double>>> sl2_constants();

}  // namespace oracles
