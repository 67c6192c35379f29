#include "revsynth/gradcheck.hpp"

#include <cmath>

namespace revsynth {

FdReport finite_diff_check(const std::function<Var()>& loss_fn,
                           const std::vector<std::pair<std::string, Var>>& params,
                           double step, double tol) {
    for (const auto& [name, var] : params) var->zero_grad();
    Var loss = loss_fn();
    backward(loss);

    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (const auto& [name, var] : params) {
        analytic.push_back(var->ensure_grad());
        var->zero_grad();
    }

    auto eval = [&]() {
        NoGradGuard guard;
        return loss_fn()->value.data[0];
    };

    FdReport report;
    report.pass = true;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Var var = params[p].second;
        for (std::size_t i = 0; i < var->value.size(); ++i) {
            double saved = var->value.data[i];
            var->value.data[i] = saved + step;
            double up = eval();
            var->value.data[i] = saved - step;
            double down = eval();
            var->value.data[i] = saved;
            double numeric = (up - down) / (2.0 * step);
            double a = analytic[p].data[i];
            double denom = std::max({1.0, std::abs(a), std::abs(numeric)});
            double rel = std::abs(a - numeric) / denom;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = params[p].first;
                report.worst_index = i;
                report.analytic_at_worst = a;
                report.numeric_at_worst = numeric;
            }
        }
    }
    report.pass = report.max_rel_error <= tol;
    return report;
}

} // namespace revsynth
