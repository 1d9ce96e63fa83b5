#include "gaitgraph/model.hpp"

#include <cstdio>
#include <sstream>

namespace gaitgraph {

std::string to_string(BlockKind kind) { return kind == BlockKind::kBasic ? "Basic" : "Bottleneck"; }

std::size_t BlockSpec::inner_channels() const { return std::max<std::size_t>(out_channels / 8, 4); }

ModelSpec ModelSpec::resgcn_n39_r8() {
    using enum BlockKind;
    ModelSpec spec;
    spec.blocks = {
        {kBasic, 3, 64, 1, true, 1},         {kBottleneck, 64, 64, 1, false, 1},   {kBottleneck, 64, 32, 1, false, 1},
        {kBottleneck, 32, 128, 2, false, 2}, {kBottleneck, 128, 128, 1, false, 2}, {kBottleneck, 128, 256, 2, false, 2},
        {kBottleneck, 256, 256, 1, false, 2},
    };
    return spec;
}

ModelSpec ModelSpec::with_channel_divisor(std::size_t divisor) const {
    if (divisor == 0) throw ShapeError("channel divisor must be positive");
    ModelSpec out = *this;
    auto scale = [&](std::size_t c) { return std::max<std::size_t>(c / divisor, 1); };
    for (auto& b : out.blocks) {
        if (!b.is_input_block) b.in_channels = scale(b.in_channels);
        b.out_channels = scale(b.out_channels);
    }
    return out;
}

void ModelSpec::validate() const {
    if (num_joints == 0 || input_channels == 0 || embedding_dim == 0) throw ShapeError("model spec has a zero extent");
    if (num_partitions != 1 && num_partitions != 3) throw ShapeError("num_partitions must be 1 or 3");
    if (temporal_kernel % 2 == 0) throw ShapeError("temporal kernel must be odd");
    std::size_t channels = input_channels;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        if (b.in_channels == 0 || b.out_channels == 0) throw ShapeError("block " + std::to_string(i) + " has zero width");
        if (b.temporal_stride != 1 && b.temporal_stride != 2)
            throw ShapeError("block " + std::to_string(i) + " stride must be 1 or 2");
        if (b.in_channels != channels)
            throw ShapeError("block " + std::to_string(i) + " expects " + std::to_string(b.in_channels) +
                             " channels but receives " + std::to_string(channels));
        channels = b.out_channels;
    }
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json blocks_json = nlohmann::json::array();
    for (const auto& b : blocks)
        blocks_json.push_back({{"kind", b.kind == BlockKind::kBasic ? "basic" : "bottleneck"},
                               {"in_channels", b.in_channels},
                               {"out_channels", b.out_channels},
                               {"temporal_stride", b.temporal_stride},
                               {"is_input_block", b.is_input_block},
                               {"stage", b.stage}});
    return {{"num_joints", num_joints},           {"input_channels", input_channels},
            {"blocks", blocks_json},              {"embedding_dim", embedding_dim},
            {"num_partitions", num_partitions},   {"temporal_kernel", temporal_kernel}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& doc) {
    ModelSpec spec;
    try {
        spec.num_joints = doc.at("num_joints").get<std::size_t>();
        spec.input_channels = doc.at("input_channels").get<std::size_t>();
        spec.embedding_dim = doc.at("embedding_dim").get<std::size_t>();
        spec.num_partitions = doc.at("num_partitions").get<std::size_t>();
        spec.temporal_kernel = doc.at("temporal_kernel").get<std::size_t>();
        for (const auto& b : doc.at("blocks")) {
            BlockSpec block;
            const auto kind = b.at("kind").get<std::string>();
            if (kind == "basic")
                block.kind = BlockKind::kBasic;
            else if (kind == "bottleneck")
                block.kind = BlockKind::kBottleneck;
            else
                throw FormatError("unknown block kind '" + kind + "'");
            block.in_channels = b.at("in_channels").get<std::size_t>();
            block.out_channels = b.at("out_channels").get<std::size_t>();
            block.temporal_stride = b.at("temporal_stride").get<std::size_t>();
            block.is_input_block = b.at("is_input_block").get<bool>();
            block.stage = b.value("stage", std::size_t{1});
            spec.blocks.push_back(block);
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string ModelSpec::hash() const {
    const std::string text = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<TraceRow> shape_trace(const ModelSpec& spec, const Shape& input_shape) {
    spec.validate();
    if (input_shape.size() != 3) throw ShapeError("shape_trace expects a T x N x C input shape");
    const std::size_t frames = input_shape[0], joints = input_shape[1], channels = input_shape[2];
    if (joints != spec.num_joints)
        throw ShapeError("expected " + std::to_string(spec.num_joints) + " joints, got " + std::to_string(joints));
    if (channels != spec.input_channels)
        throw ShapeError("expected " + std::to_string(spec.input_channels) + " input channels, got " +
                         std::to_string(channels));
    if (frames == 0) throw ShapeError("sequence has no frames");

    std::vector<TraceRow> rows;
    rows.push_back({"Block 0", "BatchNorm", {frames, joints, channels}});
    std::size_t t = frames;
    for (const auto& b : spec.blocks) {
        t = ops::strided_length(t, b.temporal_stride);
        rows.push_back({"Block " + std::to_string(b.stage), to_string(b.kind), {t, joints, b.out_channels}});
    }
    const std::string head_block = "Block " + std::to_string(spec.blocks.empty() ? 1 : spec.blocks.back().stage + 1);
    rows.push_back({head_block, "AvgPool2D", {1, spec.output_channels()}});
    rows.push_back({head_block, "FCN", {1, spec.embedding_dim}});
    return rows;
}

std::string format_trace(const std::vector<TraceRow>& rows) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof(line), "%-8s %-11s %s\n", "Block", "Module", "Output Dimensions");
    out << line;
    std::string previous;
    for (const auto& row : rows) {
        std::string dims;
        for (std::size_t i = 0; i < row.shape.size(); ++i) dims += (i ? " x " : "") + std::to_string(row.shape[i]);
        std::snprintf(line, sizeof(line), "%-8s %-11s %s\n", row.block == previous ? "" : row.block.c_str(),
                      row.module.c_str(), dims.c_str());
        out << line;
        previous = row.block;
    }
    return out.str();
}

namespace {
std::size_t spatial_width_in(const BlockSpec& spec) {
    return spec.kind == BlockKind::kBottleneck ? spec.inner_channels() : spec.in_channels;
}
std::size_t spatial_width_out(const BlockSpec& spec) {
    return spec.kind == BlockKind::kBottleneck ? spec.inner_channels() : spec.out_channels;
}
}  // namespace

template <typename T>
ResGcnBlock<T>::ResGcnBlock(const std::string& name, const BlockSpec& spec, const AdjacencySet& adjacency,
                            std::size_t kernel, Rng& rng)
    : spec_(spec),
      residual_(spec.is_input_block ? Residual::kNone
                : (spec.in_channels == spec.out_channels && spec.temporal_stride == 1) ? Residual::kIdentity
                                                                                        : Residual::kProjection),
      pre_bn_(name + ".pre_bn", spec.in_channels) {
    if (spec.kind == BlockKind::kBottleneck) {
        reduce_.emplace(name + ".reduce", spec.in_channels, spec.inner_channels(), 1, 1, rng);
        reduce_bn_.emplace(name + ".reduce_bn", spec.inner_channels());
    }
    gcn_.emplace(name + ".gcn", adjacency, spatial_width_in(spec), spatial_width_out(spec), rng);
    gcn_bn_.emplace(name + ".gcn_bn", spatial_width_out(spec));
    tcn_.emplace(name + ".tcn", spatial_width_out(spec), spatial_width_out(spec), kernel, spec.temporal_stride, rng);
    tcn_bn_.emplace(name + ".tcn_bn", spatial_width_out(spec));
    if (spec.kind == BlockKind::kBottleneck) {
        expand_.emplace(name + ".expand", spec.inner_channels(), spec.out_channels, 1, 1, rng);
        expand_bn_.emplace(name + ".expand_bn", spec.out_channels);
    }
    if (residual_ == Residual::kProjection) {
        projection_.emplace(name + ".residual", spec.in_channels, spec.out_channels, 1, spec.temporal_stride, rng);
        projection_bn_.emplace(name + ".residual_bn", spec.out_channels);
    }
}

template <typename T>
Tensor<T> ResGcnBlock<T>::forward(const Tensor<T>& x, ops::Mode mode) {
    if (x.dim(1) != spec_.in_channels)
        throw ShapeError("block expects " + std::to_string(spec_.in_channels) + " channels, got " +
                         std::to_string(x.dim(1)));
    Tensor<T> h = pre_bn_.forward(x, mode);
    if (reduce_) {
        reduce_out_ = ops::relu(reduce_bn_->forward(reduce_->forward(h), mode));
        h = reduce_out_;
    }
    gcn_out_ = ops::relu(gcn_bn_->forward(gcn_->forward(h), mode));
    tcn_out_ = ops::relu(tcn_bn_->forward(tcn_->forward(gcn_out_), mode));
    Tensor<T> out;
    if (expand_) {
        expand_out_ = ops::relu(expand_bn_->forward(expand_->forward(tcn_out_), mode));
        out = expand_out_;
    } else {
        out = tcn_out_;
    }
    if (residual_ == Residual::kIdentity)
        ops::add_inplace(out, x);
    else if (residual_ == Residual::kProjection)
        ops::add_inplace(out, projection_bn_->forward(projection_->forward(x), mode));
    return out;
}

template <typename T>
Tensor<T> ResGcnBlock<T>::backward(const Tensor<T>& grad_out) {
    Tensor<T> g = grad_out;
    if (expand_) g = expand_->backward(expand_bn_->backward(ops::relu_backward(expand_out_, g)));
    g = tcn_->backward(tcn_bn_->backward(ops::relu_backward(tcn_out_, g)));
    g = gcn_->backward(gcn_bn_->backward(ops::relu_backward(gcn_out_, g)));
    if (reduce_) g = reduce_->backward(reduce_bn_->backward(ops::relu_backward(reduce_out_, g)));
    Tensor<T> gx = pre_bn_.backward(g);
    if (residual_ == Residual::kIdentity)
        ops::add_inplace(gx, grad_out);
    else if (residual_ == Residual::kProjection)
        ops::add_inplace(gx, projection_->backward(projection_bn_->backward(grad_out)));
    return gx;
}

template <typename T>
void ResGcnBlock<T>::collect(std::vector<Parameter<T>*>& params) {
    pre_bn_.collect(params);
    if (reduce_) {
        reduce_->collect(params);
        reduce_bn_->collect(params);
    }
    gcn_->collect(params);
    gcn_bn_->collect(params);
    tcn_->collect(params);
    tcn_bn_->collect(params);
    if (expand_) {
        expand_->collect(params);
        expand_bn_->collect(params);
    }
    if (projection_) {
        projection_->collect(params);
        projection_bn_->collect(params);
    }
}

template <typename T>
void ResGcnBlock<T>::collect_buffers(std::vector<Buffer<T>>& buffers) {
    pre_bn_.collect_buffers(buffers);
    if (reduce_bn_) reduce_bn_->collect_buffers(buffers);
    gcn_bn_->collect_buffers(buffers);
    tcn_bn_->collect_buffers(buffers);
    if (expand_bn_) expand_bn_->collect_buffers(buffers);
    if (projection_bn_) projection_bn_->collect_buffers(buffers);
}

namespace {
const ModelSpec& validated(const ModelSpec& spec, const AdjacencySet& adjacency) {
    spec.validate();
    if (adjacency.num_partitions() != spec.num_partitions)
        throw ShapeError("adjacency has " + std::to_string(adjacency.num_partitions()) + " partitions, spec wants " +
                         std::to_string(spec.num_partitions));
    if (adjacency.num_nodes() != spec.num_joints)
        throw ShapeError("adjacency covers " + std::to_string(adjacency.num_nodes()) + " joints, spec wants " +
                         std::to_string(spec.num_joints));
    return spec;
}
}  // namespace

template <typename T>
ResGcnNet<T>::ResGcnNet(ModelSpec spec, const AdjacencySet& adjacency, std::uint64_t seed)
    : ResGcnNet(std::move(spec), adjacency, Rng(seed)) {}

template <typename T>
ResGcnNet<T>::ResGcnNet(ModelSpec spec, const AdjacencySet& adjacency, Rng&& rng)
    : spec_(validated(spec, adjacency)), input_bn_("input_bn", spec_.input_channels) {
    std::size_t index_in_stage = 0, last_stage = 0;
    blocks_.reserve(spec_.blocks.size());
    for (const auto& b : spec_.blocks) {
        if (b.stage != last_stage) index_in_stage = 0;
        last_stage = b.stage;
        blocks_.emplace_back("block" + std::to_string(b.stage) + "." + std::to_string(index_in_stage++), b, adjacency,
                             spec_.temporal_kernel, rng);
    }
    head_.emplace("fcn", spec_.output_channels(), spec_.embedding_dim, rng);
}

template <typename T>
Tensor<T> ResGcnNet<T>::forward(const Tensor<T>& input, ops::Mode mode) {
    if (input.rank() != 4) throw ShapeError("model input must be B x T x N x C, got " + shape_string(input.shape()));
    if (input.dim(2) != spec_.num_joints)
        throw ShapeError("expected " + std::to_string(spec_.num_joints) + " joints, got " + std::to_string(input.dim(2)));
    if (input.dim(3) != spec_.input_channels)
        throw ShapeError("expected " + std::to_string(spec_.input_channels) + " channels per joint, got " +
                         std::to_string(input.dim(3)));
    if (input.dim(1) < 4) throw ShapeError("sequence needs at least 4 frames, got " + std::to_string(input.dim(1)));

    Tensor<T> h = input_bn_.forward(ops::frames_to_channels_first(input), mode);
    block_outputs_.clear();
    for (auto& block : blocks_) {
        h = block.forward(h, mode);
        block_outputs_.push_back(h);
    }
    pooled_input_shape_ = h.shape();
    head_out_ = head_->forward(ops::global_avg_pool(h));
    embedding_ = ops::l2_normalize_rows(head_out_);
    return embedding_;
}

template <typename T>
Tensor<T> ResGcnNet<T>::backward(const Tensor<T>& grad_embedding) {
    Tensor<T> g = ops::l2_normalize_rows_backward(head_out_, embedding_, grad_embedding);
    g = ops::global_avg_pool_backward(pooled_input_shape_, head_->backward(g));
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = it->backward(g);
    return ops::channels_first_to_frames(input_bn_.backward(g));
}

template <typename T>
std::vector<Parameter<T>*> ResGcnNet<T>::parameters() {
    std::vector<Parameter<T>*> params;
    input_bn_.collect(params);
    for (auto& block : blocks_) block.collect(params);
    head_->collect(params);
    return params;
}

template <typename T>
std::vector<Buffer<T>> ResGcnNet<T>::buffers() {
    std::vector<Buffer<T>> buffers;
    input_bn_.collect_buffers(buffers);
    for (auto& block : blocks_) block.collect_buffers(buffers);
    return buffers;
}

template <typename T>
void ResGcnNet<T>::zero_grad() {
    for (auto* p : parameters()) {
        p->tensor.ensure_grad();
        p->tensor.zero_grad();
    }
}

template class ResGcnBlock<float>;
template class ResGcnBlock<double>;
template class ResGcnNet<float>;
template class ResGcnNet<double>;

}  // namespace gaitgraph
