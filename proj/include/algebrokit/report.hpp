#pragma once

#include <string>
#include <vector>

namespace algebrokit {

struct ResidualEntry {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool passed() const { return value <= tol; }
};

// Result of a named check: a list of residuals against their tolerances plus
// free-form notes (e.g. sample points skipped on evaluation errors).
struct CheckReport {
  std::string name;
  std::vector<ResidualEntry> residuals;
  std::vector<std::string> notes;

  void add(std::string residual_name, double value, double tol) {
    residuals.push_back({std::move(residual_name), value, tol});
  }
  void note(std::string text) { notes.push_back(std::move(text)); }

  bool passed() const {
    for (const auto& r : residuals)
      if (!r.passed()) return false;
    return true;
  }

  double value_of(const std::string& residual_name) const;
  double max_value() const;
};

// Convention choices baked into the numerics, echoed into every CLI report.
struct ConventionLedger {
  double twisted_jacobi_c = -1.0;
  double fd_step;
  std::string orientation = "source=X(1), target=X(0)";
  std::string product_integral = "dU/dt = M(a(t)) U, U(0) = 1";
};

}  // namespace algebrokit
