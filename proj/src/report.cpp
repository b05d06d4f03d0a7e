#include "algebrokit/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace algebrokit {

double CheckReport::value_of(const std::string& residual_name) const {
  for (const auto& r : residuals)
    if (r.name == residual_name) return r.value;
  throw std::out_of_range("no residual named '" + residual_name + "' in report " + name);
}

double CheckReport::max_value() const {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max(m, r.value);
  return m;
}

}  // namespace algebrokit
