#include "gaitgraph/supcon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gaitgraph {

template <typename T>
SupConResult<T> supcon_loss(const Tensor<T>& features, std::span<const std::int64_t> labels, double temperature,
                            bool with_grad) {
    if (features.rank() != 2) throw ShapeError("supcon_loss: features must be B x D");
    const std::size_t batch = features.dim(0), dim = features.dim(1);
    if (labels.size() != batch) throw ShapeError("supcon_loss: label count does not match batch size");
    if (batch < 2) throw ContractError("supcon_loss: batch needs at least two samples");
    if (!(temperature > 0.0)) throw ContractError("supcon_loss: temperature must be positive");
    for (std::size_t i = 0; i < batch; ++i) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) sq += static_cast<double>(features.at(i, d)) * features.at(i, d);
        if (std::abs(std::sqrt(sq) - 1.0) > 1e-3)
            throw ContractError("supcon_loss: feature row " + std::to_string(i) + " is not unit length");
    }

    std::vector<double> logits(batch * batch);
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = 0; j < batch; ++j) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d) acc += static_cast<double>(features.at(i, d)) * features.at(j, d);
            logits[i * batch + j] = acc / temperature;
        }

    SupConResult<T> result;
    std::vector<double> coeff(batch * batch, 0.0);  // d(sum of anchor losses)/d(logit)
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        std::size_t positives = 0;
        for (std::size_t j = 0; j < batch; ++j)
            if (j != i && labels[j] == labels[i]) ++positives;
        if (positives == 0) continue;
        ++result.anchors;

        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < batch; ++j)
            if (j != i) row_max = std::max(row_max, logits[i * batch + j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < batch; ++j)
            if (j != i) denom += std::exp(logits[i * batch + j] - row_max);
        const double log_denom = std::log(denom) + row_max;

        double positive_sum = 0.0;
        for (std::size_t j = 0; j < batch; ++j)
            if (j != i && labels[j] == labels[i]) positive_sum += logits[i * batch + j] - log_denom;
        total += -positive_sum / static_cast<double>(positives);

        for (std::size_t j = 0; j < batch; ++j) {
            if (j == i) continue;
            double c = std::exp(logits[i * batch + j] - log_denom);
            if (labels[j] == labels[i]) c -= 1.0 / static_cast<double>(positives);
            coeff[i * batch + j] = c;
        }
    }
    if (result.anchors == 0) {
        if (with_grad) result.grad = Tensor<T>(features.shape());
        return result;
    }
    const double scale = 1.0 / static_cast<double>(result.anchors);
    result.loss = total * scale;
    if (!with_grad) return result;

    result.grad = Tensor<T>(features.shape());
    for (std::size_t k = 0; k < batch; ++k)
        for (std::size_t d = 0; d < dim; ++d) {
            double acc = 0.0;
            for (std::size_t j = 0; j < batch; ++j)
                acc += (coeff[k * batch + j] + coeff[j * batch + k]) * features.at(j, d);
            result.grad.at(k, d) = static_cast<T>(acc * scale / temperature);
        }
    return result;
}

template SupConResult<float> supcon_loss(const Tensor<float>&, std::span<const std::int64_t>, double, bool);
template SupConResult<double> supcon_loss(const Tensor<double>&, std::span<const std::int64_t>, double, bool);

}  // namespace gaitgraph
