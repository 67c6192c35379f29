#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "revsynth/autodiff.hpp"

namespace revsynth {

struct FdReport {
    bool pass = false;
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

// Compares backward() gradients against central finite differences for every
// component of every listed parameter. loss_fn must rebuild its graph on each
// call and be deterministic. Relative error uses max(1, |analytic|, |numeric|)
// as the denominator, so tiny gradients are compared absolutely.
FdReport finite_diff_check(const std::function<Var()>& loss_fn,
                           const std::vector<std::pair<std::string, Var>>& params,
                           double step = 1e-5, double tol = 1e-4);

} // namespace revsynth
