#pragma once

#include <cstdint>
#include <span>

#include "gaitgraph/tensor.hpp"

namespace gaitgraph {

template <typename T>
struct SupConResult {
    double loss = 0.0;
    // d(loss)/d(features); empty when gradients were not requested.
    Tensor<T> grad;
    // Anchors with at least one positive (the averaging denominator).
    std::size_t anchors = 0;
};

// Supervised contrastive loss, mean-over-positives-outside-the-log form.
// Features are B x D rows of unit length; anchors without positives are
// skipped. Logits are shifted by each anchor's row maximum.
template <typename T>
SupConResult<T> supcon_loss(const Tensor<T>& features, std::span<const std::int64_t> labels, double temperature,
                            bool with_grad = true);

}  // namespace gaitgraph
