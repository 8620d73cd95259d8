#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace burstcast::baselines {

struct NelderMeadOptions {
    std::size_t max_iterations = 4000;
    /// Converged when the spread of simplex values is below
    /// f_tol * (|f_best| + f_tol) and every vertex is within x_tol of the best.
    double f_tol = 1e-10;
    double x_tol = 1e-7;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Standard reflection/expansion/contraction/shrink simplex search started
/// from x0 with per-coordinate initial steps. Deterministic.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& options = {});

}  // namespace burstcast::baselines
