#include "gaitgraph/ops.hpp"

#include <cmath>
#include <sstream>

namespace gaitgraph {

std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
    out << ']';
    return out.str();
}

namespace ops {

namespace {
thread_local std::vector<bool>* active_relu_trace = nullptr;
}

void set_relu_trace(std::vector<bool>* trace) { active_relu_trace = trace; }
std::vector<bool>* relu_trace() { return active_relu_trace; }

namespace {

void require_rank(const Shape& shape, std::size_t rank, const char* what) {
    if (shape.size() != rank)
        throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " + shape_string(shape));
}

template <typename T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
std::vector<T> dense_adjacency(std::span<const Matrix> adjacency, std::size_t nodes) {
    std::vector<T> out;
    out.reserve(adjacency.size() * nodes * nodes);
    for (const auto& a : adjacency) {
        if (a.rows() != nodes || a.cols() != nodes)
            throw ShapeError("graph_conv: adjacency is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " but input has " + std::to_string(nodes) + " joints");
        for (double v : a.values()) out.push_back(static_cast<T>(v));
    }
    return out;
}

// agg[ci, t, n] = sum_m A[n, m] x[ci, t, m] over one batch item.
template <typename T>
void aggregate(const T* adj, const T* x, T* agg, std::size_t rows, std::size_t nodes) {
    for (std::size_t r = 0; r < rows; ++r) {
        const T* xr = x + r * nodes;
        T* ar = agg + r * nodes;
        for (std::size_t n = 0; n < nodes; ++n) ar[n] = dot(adj + n * nodes, xr, nodes);
    }
}

// grad_x[ci, t, m] += sum_n A[n, m] g[ci, t, n].
template <typename T>
void aggregate_transposed(const T* adj, const T* g, T* grad_x, std::size_t rows, std::size_t nodes) {
    for (std::size_t r = 0; r < rows; ++r) {
        const T* gr = g + r * nodes;
        T* xr = grad_x + r * nodes;
        for (std::size_t n = 0; n < nodes; ++n) axpy(gr[n], adj + n * nodes, xr, nodes);
    }
}

}  // namespace

template <typename T>
Tensor<T> temporal_conv2d(const Tensor<T>& x, const Tensor<T>& weight, std::size_t stride) {
    require_rank(x.shape(), 4, "temporal_conv2d input");
    require_rank(weight.shape(), 4, "temporal_conv2d kernel");
    const std::size_t batch = x.dim(0), c_in = x.dim(1), frames = x.dim(2), nodes = x.dim(3);
    const std::size_t c_out = weight.dim(0), kernel = weight.dim(2);
    if (weight.dim(1) != c_in)
        throw ShapeError("temporal_conv2d: kernel expects " + std::to_string(weight.dim(1)) + " input channels, got " +
                         std::to_string(c_in));
    if (kernel % 2 == 0 || weight.dim(3) != 1) throw ShapeError("temporal_conv2d: kernel must be k x 1 with k odd");
    if (stride == 0) throw ShapeError("temporal_conv2d: stride must be positive");
    const std::size_t out_frames = strided_length(frames, stride);
    const long pad = static_cast<long>(kernel / 2);
    const std::size_t in_plane = frames * nodes, out_plane = out_frames * nodes;

    Tensor<T> y(Shape{batch, c_out, out_frames, nodes});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t co = 0; co < c_out; ++co) {
            T* yp = y.data() + (b * c_out + co) * out_plane;
            for (std::size_t ci = 0; ci < c_in; ++ci) {
                const T* xp = x.data() + (b * c_in + ci) * in_plane;
                const T* wp = weight.data() + (co * c_in + ci) * kernel;
                for (std::size_t k = 0; k < kernel; ++k) {
                    const T w = wp[k];
                    if (w == T(0)) continue;
                    const long shift = static_cast<long>(k) - pad;
                    if (stride == 1) {
                        const long t0 = std::max(0L, -shift);
                        const long t1 = std::min(static_cast<long>(frames), static_cast<long>(frames) - shift);
                        if (t1 > t0)
                            axpy(w, xp + (t0 + shift) * static_cast<long>(nodes), yp + t0 * static_cast<long>(nodes),
                                 static_cast<std::size_t>(t1 - t0) * nodes);
                    } else {
                        for (std::size_t t = 0; t < out_frames; ++t) {
                            const long src = static_cast<long>(t * stride) + shift;
                            if (src < 0 || src >= static_cast<long>(frames)) continue;
                            axpy(w, xp + src * static_cast<long>(nodes), yp + t * nodes, nodes);
                        }
                    }
                }
            }
        }
    return y;
}

template <typename T>
void temporal_conv2d_backward(const Tensor<T>& x, const Tensor<T>& weight, std::size_t stride,
                              const Tensor<T>& grad_out, Tensor<T>* grad_x, Tensor<T>* grad_weight) {
    const std::size_t batch = x.dim(0), c_in = x.dim(1), frames = x.dim(2), nodes = x.dim(3);
    const std::size_t c_out = weight.dim(0), kernel = weight.dim(2);
    const std::size_t out_frames = strided_length(frames, stride);
    if (grad_out.shape() != Shape{batch, c_out, out_frames, nodes})
        throw ShapeError("temporal_conv2d_backward: gradient shape " + shape_string(grad_out.shape()));
    const long pad = static_cast<long>(kernel / 2);
    const std::size_t in_plane = frames * nodes, out_plane = out_frames * nodes;

    if (grad_x) *grad_x = Tensor<T>(x.shape());
    if (grad_weight) *grad_weight = Tensor<T>(weight.shape());

    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t co = 0; co < c_out; ++co) {
            const T* gp = grad_out.data() + (b * c_out + co) * out_plane;
            for (std::size_t ci = 0; ci < c_in; ++ci) {
                const T* xp = x.data() + (b * c_in + ci) * in_plane;
                T* gxp = grad_x ? grad_x->data() + (b * c_in + ci) * in_plane : nullptr;
                const T* wp = weight.data() + (co * c_in + ci) * kernel;
                T* gwp = grad_weight ? grad_weight->data() + (co * c_in + ci) * kernel : nullptr;
                for (std::size_t k = 0; k < kernel; ++k) {
                    const long shift = static_cast<long>(k) - pad;
                    if (stride == 1) {
                        const long t0 = std::max(0L, -shift);
                        const long t1 = std::min(static_cast<long>(frames), static_cast<long>(frames) - shift);
                        if (t1 <= t0) continue;
                        const std::size_t len = static_cast<std::size_t>(t1 - t0) * nodes;
                        const T* xs = xp + (t0 + shift) * static_cast<long>(nodes);
                        const T* gs = gp + t0 * static_cast<long>(nodes);
                        if (gwp) gwp[k] += dot(gs, xs, len);
                        if (gxp) axpy(wp[k], gs, gxp + (t0 + shift) * static_cast<long>(nodes), len);
                    } else {
                        for (std::size_t t = 0; t < out_frames; ++t) {
                            const long src = static_cast<long>(t * stride) + shift;
                            if (src < 0 || src >= static_cast<long>(frames)) continue;
                            const T* gs = gp + t * nodes;
                            if (gwp) gwp[k] += dot(gs, xp + src * static_cast<long>(nodes), nodes);
                            if (gxp) axpy(wp[k], gs, gxp + src * static_cast<long>(nodes), nodes);
                        }
                    }
                }
            }
        }
}

template <typename T>
Tensor<T> graph_conv(const Tensor<T>& x, std::span<const Matrix> adjacency, const Tensor<T>& theta) {
    require_rank(x.shape(), 4, "graph_conv input");
    require_rank(theta.shape(), 3, "graph_conv weight");
    const std::size_t batch = x.dim(0), c_in = x.dim(1), frames = x.dim(2), nodes = x.dim(3);
    const std::size_t parts = theta.dim(0), c_out = theta.dim(2);
    if (adjacency.size() != parts)
        throw ShapeError("graph_conv: " + std::to_string(adjacency.size()) + " adjacency partitions but weight has " +
                         std::to_string(parts));
    if (theta.dim(1) != c_in)
        throw ShapeError("graph_conv: weight expects " + std::to_string(theta.dim(1)) + " input channels, got " +
                         std::to_string(c_in));
    const auto adj = dense_adjacency<T>(adjacency, nodes);
    const std::size_t plane = frames * nodes;

    Tensor<T> y(Shape{batch, c_out, frames, nodes});
    std::vector<T> agg(c_in * plane);
    for (std::size_t b = 0; b < batch; ++b) {
        const T* xb = x.data() + b * c_in * plane;
        T* yb = y.data() + b * c_out * plane;
        for (std::size_t k = 0; k < parts; ++k) {
            aggregate(adj.data() + k * nodes * nodes, xb, agg.data(), c_in * frames, nodes);
            const T* th = theta.data() + k * c_in * c_out;
            for (std::size_t co = 0; co < c_out; ++co)
                for (std::size_t ci = 0; ci < c_in; ++ci) {
                    const T w = th[ci * c_out + co];
                    if (w != T(0)) axpy(w, agg.data() + ci * plane, yb + co * plane, plane);
                }
        }
    }
    return y;
}

template <typename T>
void graph_conv_backward(const Tensor<T>& x, std::span<const Matrix> adjacency, const Tensor<T>& theta,
                         const Tensor<T>& grad_out, Tensor<T>* grad_x, Tensor<T>* grad_theta) {
    const std::size_t batch = x.dim(0), c_in = x.dim(1), frames = x.dim(2), nodes = x.dim(3);
    const std::size_t parts = theta.dim(0), c_out = theta.dim(2);
    if (grad_out.shape() != Shape{batch, c_out, frames, nodes})
        throw ShapeError("graph_conv_backward: gradient shape " + shape_string(grad_out.shape()));
    const auto adj = dense_adjacency<T>(adjacency, nodes);
    const std::size_t plane = frames * nodes;

    if (grad_x) *grad_x = Tensor<T>(x.shape());
    if (grad_theta) *grad_theta = Tensor<T>(theta.shape());
    std::vector<T> agg(c_in * plane), grad_agg(c_in * plane);
    for (std::size_t b = 0; b < batch; ++b) {
        const T* xb = x.data() + b * c_in * plane;
        const T* gb = grad_out.data() + b * c_out * plane;
        for (std::size_t k = 0; k < parts; ++k) {
            const T* a = adj.data() + k * nodes * nodes;
            const T* th = theta.data() + k * c_in * c_out;
            if (grad_theta) {
                aggregate(a, xb, agg.data(), c_in * frames, nodes);
                T* gth = grad_theta->data() + k * c_in * c_out;
                for (std::size_t ci = 0; ci < c_in; ++ci)
                    for (std::size_t co = 0; co < c_out; ++co)
                        gth[ci * c_out + co] += dot(agg.data() + ci * plane, gb + co * plane, plane);
            }
            if (grad_x) {
                std::fill(grad_agg.begin(), grad_agg.end(), T(0));
                for (std::size_t ci = 0; ci < c_in; ++ci)
                    for (std::size_t co = 0; co < c_out; ++co) {
                        const T w = th[ci * c_out + co];
                        if (w != T(0)) axpy(w, gb + co * plane, grad_agg.data() + ci * plane, plane);
                    }
                aggregate_transposed(a, grad_agg.data(), grad_x->data() + b * c_in * plane, c_in * frames, nodes);
            }
        }
    }
}

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, BatchNormState<T>& state, Mode mode, BatchNormCache<T>* cache) {
    require_rank(x.shape(), 4, "batch_norm input");
    const std::size_t batch = x.dim(0), channels = x.dim(1), plane = x.dim(2) * x.dim(3);
    if (state.gamma.tensor.size() != channels)
        throw ShapeError("batch_norm: state has " + std::to_string(state.gamma.tensor.size()) + " channels, input has " +
                         std::to_string(channels));
    const std::size_t count = batch * plane;

    std::vector<T> mean(channels), inv_std(channels);
    if (mode == Mode::kTrain) {
        if (count < 2) throw DegenerateError("batch_norm: train mode needs at least two values per channel");
        for (std::size_t c = 0; c < channels; ++c) {
            double sum = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* p = x.data() + (b * channels + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) sum += p[i];
            }
            const double mu = sum / static_cast<double>(count);
            double sq = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* p = x.data() + (b * channels + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    const double d = p[i] - mu;
                    sq += d * d;
                }
            }
            const double var = sq / static_cast<double>(count);
            mean[c] = static_cast<T>(mu);
            inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + state.eps));
            const double unbiased = sq / static_cast<double>(count - 1);
            state.running_mean[c] =
                static_cast<T>((1.0 - state.momentum) * state.running_mean[c] + state.momentum * mu);
            state.running_var[c] =
                static_cast<T>((1.0 - state.momentum) * state.running_var[c] + state.momentum * unbiased);
        }
    } else {
        for (std::size_t c = 0; c < channels; ++c) {
            mean[c] = state.running_mean[c];
            inv_std[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(state.running_var[c]) + state.eps));
        }
    }

    Tensor<T> y(x.shape());
    Tensor<T> normalized;
    if (cache) normalized = Tensor<T>(x.shape());
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t off = (b * channels + c) * plane;
            const T mu = mean[c], is = inv_std[c], g = state.gamma.tensor[c], be = state.beta.tensor[c];
            for (std::size_t i = 0; i < plane; ++i) {
                const T xh = (x[off + i] - mu) * is;
                if (cache) normalized[off + i] = xh;
                y[off + i] = g * xh + be;
            }
        }
    if (cache) {
        cache->normalized = std::move(normalized);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

template <typename T>
void batch_norm_backward(const Tensor<T>& grad_out, const BatchNormState<T>& state, const BatchNormCache<T>& cache,
                         Tensor<T>* grad_x, Tensor<T>* grad_gamma, Tensor<T>* grad_beta) {
    const auto& xh = cache.normalized;
    if (grad_out.shape() != xh.shape()) throw ShapeError("batch_norm_backward: gradient shape mismatch");
    const std::size_t batch = xh.dim(0), channels = xh.dim(1), plane = xh.dim(2) * xh.dim(3);
    const double count = static_cast<double>(batch * plane);
    if (grad_x) *grad_x = Tensor<T>(xh.shape());
    if (grad_gamma) *grad_gamma = Tensor<T>(Shape{channels});
    if (grad_beta) *grad_beta = Tensor<T>(Shape{channels});
    for (std::size_t c = 0; c < channels; ++c) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_g += grad_out[off + i];
                sum_gx += static_cast<double>(grad_out[off + i]) * xh[off + i];
            }
        }
        if (grad_gamma) (*grad_gamma)[c] = static_cast<T>(sum_gx);
        if (grad_beta) (*grad_beta)[c] = static_cast<T>(sum_g);
        if (!grad_x) continue;
        const T scale = state.gamma.tensor[c] * cache.inv_std[c];
        const T mean_g = static_cast<T>(sum_g / count), mean_gx = static_cast<T>(sum_gx / count);
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * plane;
            for (std::size_t i = 0; i < plane; ++i)
                (*grad_x)[off + i] = scale * (grad_out[off + i] - mean_g - xh[off + i] * mean_gx);
        }
    }
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    require_rank(x.shape(), 4, "global_avg_pool input");
    const std::size_t rows = x.dim(0) * x.dim(1), plane = x.dim(2) * x.dim(3);
    Tensor<T> y(Shape{x.dim(0), x.dim(1)});
    for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < plane; ++i) sum += x[r * plane + i];
        y[r] = static_cast<T>(sum / static_cast<double>(plane));
    }
    return y;
}

template <typename T>
Tensor<T> global_avg_pool_backward(const Shape& input_shape, const Tensor<T>& grad_out) {
    require_rank(input_shape, 4, "global_avg_pool_backward input");
    const std::size_t rows = input_shape[0] * input_shape[1], plane = input_shape[2] * input_shape[3];
    if (grad_out.size() != rows) throw ShapeError("global_avg_pool_backward: gradient shape mismatch");
    Tensor<T> gx(input_shape);
    for (std::size_t r = 0; r < rows; ++r) {
        const T g = grad_out[r] / static_cast<T>(plane);
        std::fill(gx.data() + r * plane, gx.data() + (r + 1) * plane, g);
    }
    return gx;
}

template <typename T>
Tensor<T> linear_map(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
    require_rank(x.shape(), 2, "linear_map input");
    require_rank(weight.shape(), 2, "linear_map weight");
    const std::size_t batch = x.dim(0), c_in = x.dim(1), c_out = weight.dim(1);
    if (weight.dim(0) != c_in)
        throw ShapeError("linear_map: weight expects " + std::to_string(weight.dim(0)) + " inputs, got " +
                         std::to_string(c_in));
    if (bias.size() != c_out) throw ShapeError("linear_map: bias length does not match output width");
    Tensor<T> y(Shape{batch, c_out});
    for (std::size_t b = 0; b < batch; ++b) {
        T* yr = y.data() + b * c_out;
        std::copy(bias.data(), bias.data() + c_out, yr);
        for (std::size_t i = 0; i < c_in; ++i) axpy(x[b * c_in + i], weight.data() + i * c_out, yr, c_out);
    }
    return y;
}

template <typename T>
void linear_map_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& grad_out, Tensor<T>* grad_x,
                         Tensor<T>* grad_weight, Tensor<T>* grad_bias) {
    const std::size_t batch = x.dim(0), c_in = x.dim(1), c_out = weight.dim(1);
    if (grad_out.shape() != Shape{batch, c_out}) throw ShapeError("linear_map_backward: gradient shape mismatch");
    if (grad_x) *grad_x = Tensor<T>(x.shape());
    if (grad_weight) *grad_weight = Tensor<T>(weight.shape());
    if (grad_bias) *grad_bias = Tensor<T>(Shape{c_out});
    for (std::size_t b = 0; b < batch; ++b) {
        const T* g = grad_out.data() + b * c_out;
        if (grad_bias) axpy(T(1), g, grad_bias->data(), c_out);
        for (std::size_t i = 0; i < c_in; ++i) {
            if (grad_weight) axpy(x[b * c_in + i], g, grad_weight->data() + i * c_out, c_out);
            if (grad_x) (*grad_x)[b * c_in + i] = dot(weight.data() + i * c_out, g, c_out);
        }
    }
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
    if (auto* trace = relu_trace())
        for (std::size_t i = 0; i < x.size(); ++i) trace->push_back(x[i] > T(0));
    return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& output, const Tensor<T>& grad_out) {
    Tensor<T> gx(output.shape());
    for (std::size_t i = 0; i < output.size(); ++i) gx[i] = output[i] > T(0) ? grad_out[i] : T(0);
    return gx;
}

template <typename T>
Tensor<T> l2_normalize_rows(const Tensor<T>& x) {
    require_rank(x.shape(), 2, "l2_normalize_rows input");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    Tensor<T> y(x.shape());
    for (std::size_t r = 0; r < rows; ++r) {
        const T* xr = x.data() + r * cols;
        double sq = 0.0;
        for (std::size_t c = 0; c < cols; ++c) sq += static_cast<double>(xr[c]) * xr[c];
        const double norm = std::sqrt(sq);
        if (norm == 0.0) throw DegenerateError("l2_normalize_rows: zero-length row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] = static_cast<T>(xr[c] / norm);
    }
    return y;
}

template <typename T>
Tensor<T> l2_normalize_rows_backward(const Tensor<T>& x, const Tensor<T>& output, const Tensor<T>& grad_out) {
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    Tensor<T> gx(x.shape());
    for (std::size_t r = 0; r < rows; ++r) {
        const T* xr = x.data() + r * cols;
        const T* yr = output.data() + r * cols;
        const T* gr = grad_out.data() + r * cols;
        const T norm = std::sqrt(dot(xr, xr, cols));
        const T proj = dot(yr, gr, cols);
        for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] = (gr[c] - yr[c] * proj) / norm;
    }
    return gx;
}

template <typename T>
void add_inplace(Tensor<T>& target, const Tensor<T>& other) {
    if (target.shape() != other.shape())
        throw ShapeError("add: " + shape_string(target.shape()) + " vs " + shape_string(other.shape()));
    axpy(T(1), other.data(), target.data(), target.size());
}

template <typename T>
Tensor<T> frames_to_channels_first(const Tensor<T>& x) {
    require_rank(x.shape(), 4, "frames_to_channels_first input");
    const std::size_t batch = x.dim(0), frames = x.dim(1), nodes = x.dim(2), channels = x.dim(3);
    Tensor<T> y(Shape{batch, channels, frames, nodes});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t n = 0; n < nodes; ++n)
                for (std::size_t c = 0; c < channels; ++c) y.at(b, c, t, n) = x.at(b, t, n, c);
    return y;
}

template <typename T>
Tensor<T> channels_first_to_frames(const Tensor<T>& x) {
    require_rank(x.shape(), 4, "channels_first_to_frames input");
    const std::size_t batch = x.dim(0), channels = x.dim(1), frames = x.dim(2), nodes = x.dim(3);
    Tensor<T> y(Shape{batch, frames, nodes, channels});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t t = 0; t < frames; ++t)
                for (std::size_t n = 0; n < nodes; ++n) y.at(b, t, n, c) = x.at(b, c, t, n);
    return y;
}

#define GAITGRAPH_INSTANTIATE_OPS(T)                                                                              \
    template Tensor<T> temporal_conv2d(const Tensor<T>&, const Tensor<T>&, std::size_t);                          \
    template void temporal_conv2d_backward(const Tensor<T>&, const Tensor<T>&, std::size_t, const Tensor<T>&,     \
                                           Tensor<T>*, Tensor<T>*);                                               \
    template Tensor<T> graph_conv(const Tensor<T>&, std::span<const Matrix>, const Tensor<T>&);                   \
    template void graph_conv_backward(const Tensor<T>&, std::span<const Matrix>, const Tensor<T>&,                \
                                      const Tensor<T>&, Tensor<T>*, Tensor<T>*);                                  \
    template Tensor<T> batch_norm(const Tensor<T>&, BatchNormState<T>&, Mode, BatchNormCache<T>*);                \
    template void batch_norm_backward(const Tensor<T>&, const BatchNormState<T>&, const BatchNormCache<T>&,       \
                                      Tensor<T>*, Tensor<T>*, Tensor<T>*);                                        \
    template Tensor<T> global_avg_pool(const Tensor<T>&);                                                         \
    template Tensor<T> global_avg_pool_backward(const Shape&, const Tensor<T>&);                                  \
    template Tensor<T> linear_map(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                          \
    template void linear_map_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>*,           \
                                      Tensor<T>*, Tensor<T>*);                                                    \
    template Tensor<T> relu(const Tensor<T>&);                                                                    \
    template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                         \
    template Tensor<T> l2_normalize_rows(const Tensor<T>&);                                                       \
    template Tensor<T> l2_normalize_rows_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);          \
    template void add_inplace(Tensor<T>&, const Tensor<T>&);                                                      \
    template Tensor<T> frames_to_channels_first(const Tensor<T>&);                                                \
    template Tensor<T> channels_first_to_frames(const Tensor<T>&);

GAITGRAPH_INSTANTIATE_OPS(float)
GAITGRAPH_INSTANTIATE_OPS(double)

}  // namespace ops
}  // namespace gaitgraph
