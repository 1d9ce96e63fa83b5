#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gaitgraph/tensor.hpp"

namespace gaitgraph {

struct GradCheckEntry {
    std::string name;
    std::size_t count = 0;
    double max_abs_error = 0.0;
    double max_relative_error = 0.0;
    std::size_t reduced_steps = 0;  // elements re-measured because +-h crossed a relu kink
};

struct GradCheckReport {
    std::string fragment;
    std::vector<GradCheckEntry> entries;

    double max_relative_error() const;
    bool passed(double tolerance) const { return max_relative_error() < tolerance; }
};

// A differentiable piece of computation in 64-bit mode. `evaluate` runs the
// forward pass and returns a scalar; `backward` must then fill the gradient
// buffers of every listed input and parameter (overwriting them).
struct GradFragment {
    std::string name;
    std::vector<std::pair<std::string, Tensor<double>*>> inputs;
    std::vector<Parameter<double>*> params;
    std::function<double()> evaluate;
    std::function<void()> backward;
};

// Compares analytic gradients against central differences with step h. The
// relative error of one element is |a - n| / max(|a|, |n|, 1e-5); gradients
// below that floor are at the level of finite-difference rounding noise.
// When a step flips the sign of any relu input the element sits next to a
// kink, so it is re-measured with h / 10 (up to three times).
GradCheckReport grad_check(GradFragment& fragment, double step = 1e-5);

// Fixed random projection used to reduce a tensor output to a scalar loss.
Tensor<double> random_like(const Shape& shape, std::uint64_t seed);
double project(const Tensor<double>& output, const Tensor<double>& direction);

// Checks every layer type, the supervised contrastive loss and a tiny full
// model (T = 8, quartered channels).
std::vector<GradCheckReport> run_gradcheck_suite(std::uint64_t seed);

std::string format_gradcheck(const std::vector<GradCheckReport>& reports, double tolerance);

}  // namespace gaitgraph
