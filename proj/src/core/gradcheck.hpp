#pragma once

#include <functional>
#include <span>
#include <vector>

namespace xmodal {

struct GradCheckResult {
    double max_rel_err = 0.0;
    size_t worst_index = 0;
};

// Central-difference verification of an analytic gradient:
//   numeric_i = (f(x + eps e_i) - f(x - eps e_i)) / (2 eps)
//   rel_i     = |analytic_i - numeric_i| / max(|analytic_i|, |numeric_i|, 1e-8)
// Returns the max over coordinates. Always 64-bit.
GradCheckResult finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> point,
                                  std::span<const double> analytic_grad, double eps);

}  // namespace xmodal
