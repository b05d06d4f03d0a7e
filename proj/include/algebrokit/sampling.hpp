#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace algebrokit {

// Per-coordinate sampling interval used to make "for all b" testable.
struct Box {
  std::vector<std::array<double, 2>> ranges;  // {lo, hi} per coordinate

  std::size_t dim() const { return ranges.size(); }
  bool contains(std::span<const double> p, double slack = 0.0) const;
  std::vector<double> center() const;
};

Box unit_box(std::size_t dim, double lo = -1.0, double hi = 1.0);
Box product_box(const Box& a, const Box& b);

// First `dim` coordinates of `box`.
Box head_box(const Box& box, std::size_t dim);

// Deterministic low-discrepancy points inside the box (Halton, prime bases,
// index starting at 1).
std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count);

// Halton points in the tangential sub-box with the trailing `codim`
// coordinates pinned to exactly 0.
std::vector<std::vector<double>> halton_points_on_slice(const Box& box, std::size_t codim,
                                                        std::size_t count);

inline constexpr std::size_t kDefaultSampleCount = 64;

}  // namespace algebrokit
