#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/layers.hpp"
#include "gaitgraph/skeleton_graph.hpp"

namespace gaitgraph {

enum class BlockKind { kBasic, kBottleneck };

std::string to_string(BlockKind kind);

struct BlockSpec {
    BlockKind kind = BlockKind::kBasic;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t temporal_stride = 1;
    bool is_input_block = false;
    // Stage number used for labelling ("Block 1", "Block 2").
    std::size_t stage = 1;

    // Bottleneck width: max(out / 8, 4).
    std::size_t inner_channels() const;
    bool operator==(const BlockSpec&) const = default;
};

struct ModelSpec {
    std::size_t num_joints = 17;
    std::size_t input_channels = 3;
    std::vector<BlockSpec> blocks;
    std::size_t embedding_dim = 128;
    std::size_t num_partitions = 3;
    std::size_t temporal_kernel = 9;

    // The ResGCN-N39-R8 layer plan for 17 joints.
    static ModelSpec resgcn_n39_r8();

    // Same plan with every block width divided by `divisor` (input width and
    // embedding size untouched).
    ModelSpec with_channel_divisor(std::size_t divisor) const;

    void validate() const;
    std::size_t output_channels() const { return blocks.empty() ? input_channels : blocks.back().out_channels; }

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& doc);
    // FNV-1a over the canonical JSON text, as 16 hex digits.
    std::string hash() const;

    bool operator==(const ModelSpec&) const = default;
};

struct TraceRow {
    std::string block;
    std::string module;
    Shape shape;
};

// Shapes are T x N x C rows, then 1 x C after pooling. Input is T x N x C.
std::vector<TraceRow> shape_trace(const ModelSpec& spec, const Shape& input_shape);

std::string format_trace(const std::vector<TraceRow>& rows);

template <typename T>
class ResGcnBlock {
   public:
    ResGcnBlock(const std::string& name, const BlockSpec& spec, const AdjacencySet& adjacency, std::size_t kernel,
                Rng& rng);

    Tensor<T> forward(const Tensor<T>& x, ops::Mode mode);
    Tensor<T> backward(const Tensor<T>& grad_out);

    void collect(std::vector<Parameter<T>*>& params);
    void collect_buffers(std::vector<Buffer<T>>& buffers);

    const BlockSpec& spec() const { return spec_; }

   private:
    enum class Residual { kNone, kIdentity, kProjection };

    BlockSpec spec_;
    Residual residual_;
    BatchNormLayer<T> pre_bn_;
    std::optional<TemporalConvLayer<T>> reduce_;
    std::optional<BatchNormLayer<T>> reduce_bn_;
    std::optional<GraphConvLayer<T>> gcn_;
    std::optional<BatchNormLayer<T>> gcn_bn_;
    std::optional<TemporalConvLayer<T>> tcn_;
    std::optional<BatchNormLayer<T>> tcn_bn_;
    std::optional<TemporalConvLayer<T>> expand_;
    std::optional<BatchNormLayer<T>> expand_bn_;
    std::optional<TemporalConvLayer<T>> projection_;
    std::optional<BatchNormLayer<T>> projection_bn_;

    Tensor<T> reduce_out_, gcn_out_, tcn_out_, expand_out_;
};

// Pose sequence batch (B x T x N x C) -> unit-length embeddings (B x E).
template <typename T>
class ResGcnNet {
   public:
    ResGcnNet(ModelSpec spec, const AdjacencySet& adjacency, std::uint64_t seed);

    Tensor<T> forward(const Tensor<T>& input, ops::Mode mode);
    // Backpropagates from d(loss)/d(embedding); returns d(loss)/d(input).
    Tensor<T> backward(const Tensor<T>& grad_embedding);

    std::vector<Parameter<T>*> parameters();
    std::vector<Buffer<T>> buffers();
    void zero_grad();

    const ModelSpec& spec() const { return spec_; }

    // B x C x T x N outputs of every block from the most recent forward.
    const std::vector<Tensor<T>>& block_outputs() const { return block_outputs_; }

    // Copies parameters and buffers from a model with the same spec.
    template <typename U>
    void copy_state_from(ResGcnNet<U>& other) {
        auto dst = parameters();
        auto src = other.parameters();
        auto dst_buf = buffers();
        auto src_buf = other.buffers();
        if (dst.size() != src.size() || dst_buf.size() != src_buf.size())
            throw ShapeError("copy_state_from: models have different layouts");
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->tensor = src[i]->tensor.template cast<T>();
        for (std::size_t i = 0; i < dst_buf.size(); ++i) *dst_buf[i].tensor = src_buf[i].tensor->template cast<T>();
    }

   private:
    ResGcnNet(ModelSpec spec, const AdjacencySet& adjacency, Rng&& rng);

    ModelSpec spec_;
    BatchNormLayer<T> input_bn_;
    std::vector<ResGcnBlock<T>> blocks_;
    std::optional<LinearLayer<T>> head_;

    std::vector<Tensor<T>> block_outputs_;
    Shape pooled_input_shape_;
    Tensor<T> head_out_, embedding_;
};

}  // namespace gaitgraph
