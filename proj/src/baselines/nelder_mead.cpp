#include "burstcast/baselines/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace burstcast::baselines {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    if (steps.size() != n) throw std::invalid_argument("nelder_mead: step vector length differs from x0");

    // Non-finite objective values are treated as +inf so the simplex moves away.
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : HUGE_VAL;
    };

    if (n == 0) return {x0, eval(x0), 0, true};

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i] != 0.0 ? steps[i] : 1e-3;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> idx(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    NelderMeadResult res;

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> s2(n + 1);
            std::vector<double> f2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                s2[i] = std::move(simplex[idx[i]]);
                f2[i] = fv[idx[i]];
            }
            simplex = std::move(s2);
            fv = std::move(f2);
        }

        double xspread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) xspread = std::max(xspread, std::abs(simplex[i][j] - simplex[0][j]));
        if (fv[n] - fv[0] <= opt.f_tol * (std::abs(fv[0]) + opt.f_tol) && xspread <= opt.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        for (double& c : centroid) c /= static_cast<double>(n);

        const auto& worst = simplex[n];
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - worst[j]);
        const double fr = eval(xr);

        if (fr < fv[0]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - worst[j]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
            continue;
        }
        if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
            continue;
        }
        const bool outside = fr < fv[n];
        for (std::size_t j = 0; j < n; ++j)
            xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j]) : centroid[j] + 0.5 * (worst[j] - centroid[j]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[n])) {
            simplex[n] = xc;
            fv[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.value = fv[best];
    return res;
}

}  // namespace burstcast::baselines
