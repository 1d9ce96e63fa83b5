#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gaitgraph/tensor.hpp"

namespace gaitgraph {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
struct AdamState {
    std::vector<T> m;
    std::vector<T> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(std::size_t size) : m(size, T(0)), v(size, T(0)) {}
};

// One bias-corrected Adam update. Weight decay is L2: g <- g + decay * theta,
// skipped for decay-exempt parameters.
template <typename T>
void adam_step(Parameter<T>& param, AdamState<T>& state, double lr, double weight_decay,
               const AdamConfig& config = {});

// Cosine warm-up to max_lr, then cosine annealing to the floor.
struct OneCycleSchedule {
    double max_lr = 0.01;
    std::uint64_t total_steps = 1;
    double pct_up = 0.3;
    double div_factor = 25.0;
    double final_div_factor = 1e3;

    void validate() const;
    double initial_lr() const { return max_lr / div_factor; }
    double final_lr() const { return initial_lr() / final_div_factor; }
    double peak_step() const { return pct_up * static_cast<double>(total_steps); }
};

double onecycle_lr(const OneCycleSchedule& schedule, std::uint64_t step);

}  // namespace gaitgraph
