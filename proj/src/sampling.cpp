#include "algebrokit/sampling.hpp"

#include <stdexcept>

namespace algebrokit {

bool Box::contains(std::span<const double> p, double slack) const {
  if (p.size() != ranges.size()) return false;
  for (std::size_t i = 0; i < ranges.size(); ++i)
    if (p[i] < ranges[i][0] - slack || p[i] > ranges[i][1] + slack) return false;
  return true;
}

std::vector<double> Box::center() const {
  std::vector<double> c(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) c[i] = 0.5 * (ranges[i][0] + ranges[i][1]);
  return c;
}

Box unit_box(std::size_t dim, double lo, double hi) {
  Box b;
  b.ranges.assign(dim, {lo, hi});
  return b;
}

Box product_box(const Box& a, const Box& b) {
  Box out = a;
  out.ranges.insert(out.ranges.end(), b.ranges.begin(), b.ranges.end());
  return out;
}

Box head_box(const Box& box, std::size_t dim) {
  if (dim > box.dim()) throw std::invalid_argument("head_box: dim exceeds box dimension");
  Box out;
  out.ranges.assign(box.ranges.begin(), box.ranges.begin() + dim);
  return out;
}

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0, digit = 1.0 / base;
  while (index > 0) {
    result += digit * (index % base);
    index /= base;
    digit /= base;
  }
  return result;
}

}  // namespace

std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count) {
  const std::size_t d = box.dim();
  if (d > std::size(kPrimes))
    throw std::invalid_argument("halton_points: dimension too large");
  std::vector<std::vector<double>> pts(count, std::vector<double>(d));
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      const double u = radical_inverse(k + 1, kPrimes[i]);
      pts[k][i] = box.ranges[i][0] + u * (box.ranges[i][1] - box.ranges[i][0]);
    }
  return pts;
}

std::vector<std::vector<double>> halton_points_on_slice(const Box& box, std::size_t codim,
                                                        std::size_t count) {
  if (codim > box.dim())
    throw std::invalid_argument("halton_points_on_slice: codim exceeds dimension");
  const std::size_t keep = box.dim() - codim;
  auto tang = halton_points(head_box(box, keep), count);
  std::vector<std::vector<double>> pts(count, std::vector<double>(box.dim(), 0.0));
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t i = 0; i < keep; ++i) pts[k][i] = tang[k][i];
  return pts;
}

}  // namespace algebrokit
