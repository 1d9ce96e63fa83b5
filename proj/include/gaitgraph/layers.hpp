#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gaitgraph/ops.hpp"
#include "gaitgraph/random.hpp"
#include "gaitgraph/skeleton_graph.hpp"
#include "gaitgraph/tensor.hpp"

// Stateful wrappers around the primitives in ops.hpp. Each layer caches what
// its backward pass needs during forward and accumulates parameter gradients.
namespace gaitgraph {

template <typename T>
void accumulate_grad(Parameter<T>& param, const Tensor<T>& grad) {
    param.tensor.ensure_grad();
    auto g = param.tensor.grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += grad[i];
}

// Kaiming-normal fill with the given fan-in.
template <typename T>
void kaiming_fill(Tensor<T>& tensor, std::size_t fan_in, Rng& rng) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : tensor.values()) v = static_cast<T>(normal(rng, 0.0, stddev));
}

template <typename T>
class TemporalConvLayer {
   public:
    TemporalConvLayer(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                      std::size_t stride, Rng& rng)
        : weight{name + ".weight", Tensor<T>(Shape{out_channels, in_channels, kernel, 1})}, stride_(stride) {
        kaiming_fill(weight.tensor, in_channels * kernel, rng);
    }

    Tensor<T> forward(const Tensor<T>& x) {
        input_ = x;
        return ops::temporal_conv2d(x, weight.tensor, stride_);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) {
        Tensor<T> gx, gw;
        ops::temporal_conv2d_backward(input_, weight.tensor, stride_, grad_out, &gx, &gw);
        accumulate_grad(weight, gw);
        return gx;
    }

    void collect(std::vector<Parameter<T>*>& params) { params.push_back(&weight); }

    std::size_t stride() const { return stride_; }

    Parameter<T> weight;

   private:
    std::size_t stride_;
    Tensor<T> input_;
};

template <typename T>
class GraphConvLayer {
   public:
    GraphConvLayer(const std::string& name, const AdjacencySet& adjacency, std::size_t in_channels,
                   std::size_t out_channels, Rng& rng)
        : weight{name + ".weight", Tensor<T>(Shape{adjacency.num_partitions(), in_channels, out_channels})},
          adjacency_(adjacency.partitions) {
        kaiming_fill(weight.tensor, in_channels * adjacency.num_partitions(), rng);
    }

    Tensor<T> forward(const Tensor<T>& x) {
        input_ = x;
        return ops::graph_conv(x, std::span<const Matrix>(adjacency_), weight.tensor);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) {
        Tensor<T> gx, gw;
        ops::graph_conv_backward(input_, std::span<const Matrix>(adjacency_), weight.tensor, grad_out, &gx, &gw);
        accumulate_grad(weight, gw);
        return gx;
    }

    void collect(std::vector<Parameter<T>*>& params) { params.push_back(&weight); }

    Parameter<T> weight;

   private:
    std::vector<Matrix> adjacency_;
    Tensor<T> input_;
};

template <typename T>
class BatchNormLayer {
   public:
    BatchNormLayer(const std::string& name, std::size_t channels) : state(channels), name_(name) {
        state.gamma.name = name + ".gamma";
        state.beta.name = name + ".beta";
    }

    Tensor<T> forward(const Tensor<T>& x, ops::Mode mode) { return ops::batch_norm(x, state, mode, &cache_); }

    Tensor<T> backward(const Tensor<T>& grad_out) {
        Tensor<T> gx, gg, gb;
        ops::batch_norm_backward(grad_out, state, cache_, &gx, &gg, &gb);
        accumulate_grad(state.gamma, gg);
        accumulate_grad(state.beta, gb);
        return gx;
    }

    void collect(std::vector<Parameter<T>*>& params) {
        params.push_back(&state.gamma);
        params.push_back(&state.beta);
    }

    void collect_buffers(std::vector<Buffer<T>>& buffers) {
        buffers.push_back({name_ + ".running_mean", &state.running_mean});
        buffers.push_back({name_ + ".running_var", &state.running_var});
    }

    ops::BatchNormState<T> state;

   private:
    std::string name_;
    ops::BatchNormCache<T> cache_;
};

template <typename T>
class LinearLayer {
   public:
    LinearLayer(const std::string& name, std::size_t in_features, std::size_t out_features, Rng& rng)
        : weight{name + ".weight", Tensor<T>(Shape{in_features, out_features})},
          bias{name + ".bias", Tensor<T>(Shape{out_features}), true} {
        kaiming_fill(weight.tensor, in_features, rng);
    }

    Tensor<T> forward(const Tensor<T>& x) {
        input_ = x;
        return ops::linear_map(x, weight.tensor, bias.tensor);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) {
        Tensor<T> gx, gw, gb;
        ops::linear_map_backward(input_, weight.tensor, grad_out, &gx, &gw, &gb);
        accumulate_grad(weight, gw);
        accumulate_grad(bias, gb);
        return gx;
    }

    void collect(std::vector<Parameter<T>*>& params) {
        params.push_back(&weight);
        params.push_back(&bias);
    }

    Parameter<T> weight;
    Parameter<T> bias;

   private:
    Tensor<T> input_;
};

}  // namespace gaitgraph
