#include "gaitgraph/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gaitgraph/ops.hpp"
#include "gaitgraph/random.hpp"

namespace gaitgraph {

double GradCheckReport::max_relative_error() const {
    double worst = 0.0;
    for (const auto& e : entries) worst = std::max(worst, e.max_relative_error);
    return worst;
}

namespace {

constexpr double kRelativeFloor = 1e-5;
constexpr int kMaxStepReductions = 3;


double evaluate_traced(const std::function<double()>& evaluate, std::vector<bool>& pattern) {
    pattern.clear();
    ops::set_relu_trace(&pattern);
    const double value = evaluate();
    ops::set_relu_trace(nullptr);
    return value;
}

GradCheckEntry check_tensor(const std::string& name, Tensor<double>& tensor, const std::vector<double>& analytic,
                            const std::function<double()>& evaluate, const std::vector<bool>& base_pattern,
                            double step) {
    GradCheckEntry entry{name, tensor.size(), 0.0, 0.0, 0};
    std::vector<bool> plus_pattern, minus_pattern;
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        const double saved = tensor[i];
        double h = step;
        double numeric = 0.0;
        for (int attempt = 0;; ++attempt) {
            tensor[i] = saved + h;
            const double plus = evaluate_traced(evaluate, plus_pattern);
            tensor[i] = saved - h;
            const double minus = evaluate_traced(evaluate, minus_pattern);
            tensor[i] = saved;
            numeric = (plus - minus) / (2.0 * h);
            const bool smooth = plus_pattern == base_pattern && minus_pattern == base_pattern;
            if (smooth || attempt == kMaxStepReductions) break;
            if (attempt == 0) ++entry.reduced_steps;
            h /= 10.0;
        }
        const double abs_err = std::abs(analytic[i] - numeric);
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kRelativeFloor});
        entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
        entry.max_relative_error = std::max(entry.max_relative_error, abs_err / scale);
    }
    return entry;
}

}  // namespace

GradCheckReport grad_check(GradFragment& fragment, double step) {
    GradCheckReport report{fragment.name, {}};
    if (fragment.inputs.empty() && fragment.params.empty()) return report;

    for (auto& [name, t] : fragment.inputs) {
        t->ensure_grad();
        t->zero_grad();
    }
    for (auto* p : fragment.params) {
        p->tensor.ensure_grad();
        p->tensor.zero_grad();
    }
    std::vector<bool> base_pattern;
    evaluate_traced(fragment.evaluate, base_pattern);
    fragment.backward();

    std::vector<std::vector<double>> analytic;
    for (auto& [name, t] : fragment.inputs) analytic.emplace_back(t->grad().begin(), t->grad().end());
    for (auto* p : fragment.params) analytic.emplace_back(p->tensor.grad().begin(), p->tensor.grad().end());

    std::size_t k = 0;
    for (auto& [name, t] : fragment.inputs)
        report.entries.push_back(check_tensor("input:" + name, *t, analytic[k++], fragment.evaluate, base_pattern, step));
    for (auto* p : fragment.params)
        report.entries.push_back(check_tensor(p->name, p->tensor, analytic[k++], fragment.evaluate, base_pattern, step));
    return report;
}

Tensor<double> random_like(const Shape& shape, std::uint64_t seed) {
    Rng rng(seed);
    Tensor<double> t(shape);
    for (auto& v : t.values()) v = normal(rng);
    return t;
}

double project(const Tensor<double>& output, const Tensor<double>& direction) {
    if (output.size() != direction.size()) throw ShapeError("project: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) acc += output[i] * direction[i];
    return acc;
}

std::string format_gradcheck(const std::vector<GradCheckReport>& reports, double tolerance) {
    std::ostringstream out;
    char line[200];
    for (const auto& r : reports) {
        std::size_t checked = 0, reduced = 0;
        for (const auto& e : r.entries) {
            checked += e.count;
            reduced += e.reduced_steps;
        }
        std::snprintf(line, sizeof(line), "%-22s elements=%-6zu kink_steps=%-4zu max_rel_err=%.3e  %s\n",
                      r.fragment.c_str(), checked, reduced, r.max_relative_error(),
                      r.passed(tolerance) ? "PASS" : "FAIL");
        out << line;
    }
    return out.str();
}

}  // namespace gaitgraph
