#pragma once

#include <span>
#include <vector>

#include "gaitgraph/skeleton_graph.hpp"
#include "gaitgraph/tensor.hpp"

// Neural primitives on B x C x T x N activations (batch, channel, frame,
// joint). Every forward has a matching backward that returns freshly sized
// gradient tensors; callers accumulate into parameter gradients themselves.
namespace gaitgraph::ops {

// Output frame count of a temporal convolution with "same" padding.
inline std::size_t strided_length(std::size_t frames, std::size_t stride) { return (frames + stride - 1) / stride; }

// Convolution along T with an odd kernel (C_out x C_in x k x 1) and zero
// padding (k - 1) / 2. The joint axis is untouched.
template <typename T>
Tensor<T> temporal_conv2d(const Tensor<T>& x, const Tensor<T>& weight, std::size_t stride);

template <typename T>
void temporal_conv2d_backward(const Tensor<T>& x, const Tensor<T>& weight, std::size_t stride,
                              const Tensor<T>& grad_out, Tensor<T>* grad_x, Tensor<T>* grad_weight);

// Sum over partitions k of A_k X_t Theta_k at every frame. theta is K x C_in x C_out.
template <typename T>
Tensor<T> graph_conv(const Tensor<T>& x, std::span<const Matrix> adjacency, const Tensor<T>& theta);

template <typename T>
void graph_conv_backward(const Tensor<T>& x, std::span<const Matrix> adjacency, const Tensor<T>& theta,
                         const Tensor<T>& grad_out, Tensor<T>* grad_x, Tensor<T>* grad_theta);

enum class Mode { kTrain, kEval };

template <typename T>
struct BatchNormState {
    Parameter<T> gamma;
    Parameter<T> beta;
    Tensor<T> running_mean;
    Tensor<T> running_var;
    double momentum = 0.1;
    double eps = 1e-5;

    explicit BatchNormState(std::size_t channels = 0)
        : gamma{"gamma", Tensor<T>(Shape{channels}, T(1)), true},
          beta{"beta", Tensor<T>(Shape{channels}, T(0)), true},
          running_mean(Shape{channels}, T(0)),
          running_var(Shape{channels}, T(1)) {}
};

template <typename T>
struct BatchNormCache {
    Tensor<T> normalized;
    std::vector<T> inv_std;
};

// Per-channel normalization over the B, T, N axes. Train mode uses batch
// statistics and updates the running estimates; eval mode uses the latter.
template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, BatchNormState<T>& state, Mode mode, BatchNormCache<T>* cache = nullptr);

// Train-mode backward.
template <typename T>
void batch_norm_backward(const Tensor<T>& grad_out, const BatchNormState<T>& state, const BatchNormCache<T>& cache,
                         Tensor<T>* grad_x, Tensor<T>* grad_gamma, Tensor<T>* grad_beta);

// Mean over T and N: B x C x T x N -> B x C.
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

template <typename T>
Tensor<T> global_avg_pool_backward(const Shape& input_shape, const Tensor<T>& grad_out);

// X (B x C_in) W (C_in x C_out) + b.
template <typename T>
Tensor<T> linear_map(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
void linear_map_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& grad_out, Tensor<T>* grad_x,
                         Tensor<T>* grad_weight, Tensor<T>* grad_bias);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

// While set, every relu on this thread appends its sign pattern to the trace.
// Gradient checking uses it to spot steps that cross a kink.
void set_relu_trace(std::vector<bool>* trace);
std::vector<bool>* relu_trace();

// Uses the forward output as the mask.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& output, const Tensor<T>& grad_out);

// Row-wise unit-length scaling of a B x D matrix.
template <typename T>
Tensor<T> l2_normalize_rows(const Tensor<T>& x);

template <typename T>
Tensor<T> l2_normalize_rows_backward(const Tensor<T>& x, const Tensor<T>& output, const Tensor<T>& grad_out);

template <typename T>
void add_inplace(Tensor<T>& target, const Tensor<T>& other);

// B x T x N x C <-> B x C x T x N.
template <typename T>
Tensor<T> frames_to_channels_first(const Tensor<T>& x);

template <typename T>
Tensor<T> channels_first_to_frames(const Tensor<T>& x);

}  // namespace gaitgraph::ops
