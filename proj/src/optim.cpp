#include "gaitgraph/optim.hpp"

#include <cmath>
#include <numbers>

namespace gaitgraph {

template <typename T>
void adam_step(Parameter<T>& param, AdamState<T>& state, double lr, double weight_decay, const AdamConfig& config) {
    auto& tensor = param.tensor;
    if (tensor.grad().size() != tensor.size())
        throw OptimizerError("parameter '" + param.name + "' has no gradient");
    if (state.m.size() != tensor.size() || state.v.size() != tensor.size())
        throw OptimizerError("optimizer state for '" + param.name + "' does not match the parameter size");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    const double decay = param.weight_decay_exempt ? 0.0 : weight_decay;
    const T b1 = static_cast<T>(config.beta1), b2 = static_cast<T>(config.beta2);
    const T step_size = static_cast<T>(lr / correction1);
    const T inv_sqrt_c2 = static_cast<T>(1.0 / std::sqrt(correction2));
    const T eps = static_cast<T>(config.eps);

    auto values = tensor.values();
    auto grad = tensor.grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const T g = grad[i] + static_cast<T>(decay) * values[i];
        state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
        state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
        const T denom = std::sqrt(state.v[i]) * inv_sqrt_c2 + eps;
        values[i] -= step_size * state.m[i] / denom;
    }
}

template void adam_step(Parameter<float>&, AdamState<float>&, double, double, const AdamConfig&);
template void adam_step(Parameter<double>&, AdamState<double>&, double, double, const AdamConfig&);

void OneCycleSchedule::validate() const {
    if (!(pct_up > 0.0 && pct_up < 1.0)) throw OptimizerError("one-cycle pct_up must lie in (0, 1)");
    if (!(div_factor > 1.0) || !(final_div_factor > 1.0)) throw OptimizerError("one-cycle div factors must exceed 1");
    if (total_steps == 0) throw OptimizerError("one-cycle schedule needs at least one step");
    if (!(max_lr >= 0.0)) throw OptimizerError("one-cycle max_lr must be non-negative");
}

namespace {
// Cosine interpolation from `from` (progress 0) to `to` (progress 1).
double cosine_anneal(double from, double to, double progress) {
    return to + (from - to) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}
}  // namespace

double onecycle_lr(const OneCycleSchedule& schedule, std::uint64_t step) {
    schedule.validate();
    if (step > schedule.total_steps)
        throw OptimizerError("step " + std::to_string(step) + " beyond schedule length " +
                             std::to_string(schedule.total_steps));
    const double s = static_cast<double>(step);
    const double peak = schedule.peak_step();
    if (s <= peak) return cosine_anneal(schedule.initial_lr(), schedule.max_lr, peak > 0.0 ? s / peak : 1.0);
    const double down = static_cast<double>(schedule.total_steps) - peak;
    return cosine_anneal(schedule.max_lr, schedule.final_lr(), (s - peak) / down);
}

}  // namespace gaitgraph
