#include "burstcast/nn/adam.hpp"

#include <cmath>
#include <string>

#include "burstcast/core/error.hpp"

namespace burstcast::nn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s, double lr,
               const AdamConfig& c) {
    const std::size_t n = params.size();
    if (grads.size() != n || s.m.size() != n || s.v.size() != n)
        throw ShapeError("adam_step: parameter, gradient and state sizes differ");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(grads[i]))
            throw TrainingError("non-finite gradient at parameter index " + std::to_string(i));
    ++s.step;
    const double t = static_cast<double>(s.step);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * g;
        s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * g * g;
        const double mh = s.m[i] / bc1;
        const double vh = s.v[i] / bc2;
        params[i] -= lr * mh / (std::sqrt(vh) + c.epsilon);
    }
}

}  // namespace burstcast::nn
