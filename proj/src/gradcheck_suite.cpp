#include <algorithm>
#include <cmath>

#include "gaitgraph/gradcheck.hpp"
#include "gaitgraph/model.hpp"
#include "gaitgraph/ops.hpp"
#include "gaitgraph/supcon.hpp"

namespace gaitgraph {

namespace {

void set_grad(Tensor<double>& t, const Tensor<double>& g) {
    t.ensure_grad();
    std::copy(g.values().begin(), g.values().end(), t.grad().begin());
}

// Unit-scale projection keeps the scalar O(1) so finite-difference rounding
// stays far below the relative-error floor.
Tensor<double> direction(const Shape& shape, std::uint64_t seed) {
    auto d = random_like(shape, seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d.size()));
    for (auto& v : d.values()) v *= scale;
    return d;
}

// Keeps entries at least `margin` away from zero so ReLU kinks are not
// crossed by the finite-difference step.
Tensor<double> away_from_zero(const Shape& shape, std::uint64_t seed, double margin) {
    auto t = random_like(shape, seed);
    for (auto& v : t.values()) v = v >= 0 ? v + margin : v - margin;
    return t;
}

template <typename Block>
GradCheckReport check_block(const std::string& name, const BlockSpec& spec, const AdjacencySet& adj, Shape in_shape,
                            std::uint64_t seed) {
    Rng rng(seed);
    Block block(name, spec, adj, 3, rng);
    auto x = random_like(in_shape, seed + 1);
    Tensor<double> dir;
    std::vector<Parameter<double>*> params;
    block.collect(params);
    GradFragment f{name, {{"x", &x}}, params, {}, {}};
    f.evaluate = [&] {
        const auto y = block.forward(x, ops::Mode::kTrain);
        if (dir.empty()) dir = direction(y.shape(), seed + 2);
        return project(y, dir);
    };
    f.backward = [&] {
        for (auto* p : params) p->tensor.zero_grad();
        set_grad(x, block.backward(dir));
    };
    return grad_check(f);
}

}  // namespace

std::vector<GradCheckReport> run_gradcheck_suite(std::uint64_t seed) {
    std::vector<GradCheckReport> reports;
    const auto coco = build_adjacency(build_coco17_topology(), 3);

    {
        auto x = random_like({3, 5}, seed + 10);
        Parameter<double> w{"linear.weight", random_like({5, 4}, seed + 11)};
        Parameter<double> b{"linear.bias", random_like({4}, seed + 12), true};
        const auto dir = direction({3, 4}, seed + 13);
        GradFragment f{"linear_map", {{"x", &x}}, {&w, &b}, {}, {}};
        f.evaluate = [&] { return project(ops::linear_map(x, w.tensor, b.tensor), dir); };
        f.backward = [&] {
            Tensor<double> gx, gw, gb;
            ops::linear_map_backward(x, w.tensor, dir, &gx, &gw, &gb);
            set_grad(x, gx);
            set_grad(w.tensor, gw);
            set_grad(b.tensor, gb);
        };
        reports.push_back(grad_check(f));
    }

    for (std::size_t stride : {1, 2}) {
        const std::size_t k = stride == 1 ? 3 : 5;
        auto x = random_like({2, 3, 9, 4}, seed + 20 + stride);
        Parameter<double> w{"tcn.weight", random_like({4, 3, k, 1}, seed + 22 + stride)};
        const auto dir = direction({2, 4, ops::strided_length(9, stride), 4}, seed + 24 + stride);
        GradFragment f{"temporal_conv/s" + std::to_string(stride), {{"x", &x}}, {&w}, {}, {}};
        f.evaluate = [&] { return project(ops::temporal_conv2d(x, w.tensor, stride), dir); };
        f.backward = [&] {
            Tensor<double> gx, gw;
            ops::temporal_conv2d_backward(x, w.tensor, stride, dir, &gx, &gw);
            set_grad(x, gx);
            set_grad(w.tensor, gw);
        };
        reports.push_back(grad_check(f));
    }

    {
        auto x = random_like({2, 3, 3, 17}, seed + 30);
        Parameter<double> theta{"gcn.weight", random_like({3, 3, 2}, seed + 31)};
        const auto dir = direction({2, 2, 3, 17}, seed + 32);
        std::span<const Matrix> adj(coco.partitions);
        GradFragment f{"graph_conv", {{"x", &x}}, {&theta}, {}, {}};
        f.evaluate = [&] { return project(ops::graph_conv(x, adj, theta.tensor), dir); };
        f.backward = [&] {
            Tensor<double> gx, gt;
            ops::graph_conv_backward(x, adj, theta.tensor, dir, &gx, &gt);
            set_grad(x, gx);
            set_grad(theta.tensor, gt);
        };
        reports.push_back(grad_check(f));
    }

    {
        auto x = random_like({3, 2, 4, 3}, seed + 40);
        ops::BatchNormState<double> state(2);
        state.gamma.tensor = random_like({2}, seed + 41);
        state.beta.tensor = random_like({2}, seed + 42);
        ops::BatchNormCache<double> cache;
        const auto dir = direction({3, 2, 4, 3}, seed + 43);
        GradFragment f{"batch_norm", {{"x", &x}}, {&state.gamma, &state.beta}, {}, {}};
        f.evaluate = [&] { return project(ops::batch_norm(x, state, ops::Mode::kTrain, &cache), dir); };
        f.backward = [&] {
            Tensor<double> gx, gg, gb;
            ops::batch_norm_backward(dir, state, cache, &gx, &gg, &gb);
            set_grad(x, gx);
            set_grad(state.gamma.tensor, gg);
            set_grad(state.beta.tensor, gb);
        };
        reports.push_back(grad_check(f));
    }

    {
        auto x = random_like({2, 3, 4, 5}, seed + 50);
        const auto dir = direction({2, 3}, seed + 51);
        GradFragment f{"global_avg_pool", {{"x", &x}}, {}, {}, {}};
        f.evaluate = [&] { return project(ops::global_avg_pool(x), dir); };
        f.backward = [&] { set_grad(x, ops::global_avg_pool_backward(x.shape(), dir)); };
        reports.push_back(grad_check(f));
    }

    {
        auto x = away_from_zero({4, 6}, seed + 60, 1e-2);
        const auto dir = direction({4, 6}, seed + 61);
        GradFragment f{"relu", {{"x", &x}}, {}, {}, {}};
        f.evaluate = [&] { return project(ops::relu(x), dir); };
        f.backward = [&] { set_grad(x, ops::relu_backward(ops::relu(x), dir)); };
        reports.push_back(grad_check(f));
    }

    {
        auto x = random_like({4, 6}, seed + 70);
        const auto dir = direction({4, 6}, seed + 71);
        GradFragment f{"l2_normalize", {{"x", &x}}, {}, {}, {}};
        f.evaluate = [&] { return project(ops::l2_normalize_rows(x), dir); };
        f.backward = [&] { set_grad(x, ops::l2_normalize_rows_backward(x, ops::l2_normalize_rows(x), dir)); };
        reports.push_back(grad_check(f));
    }

    {
        auto z = ops::l2_normalize_rows(random_like({6, 5}, seed + 80));
        const std::vector<std::int64_t> labels{0, 0, 1, 1, 1, 2};
        SupConResult<double> last;
        GradFragment f{"supcon_loss", {{"z", &z}}, {}, {}, {}};
        f.evaluate = [&] {
            last = supcon_loss(z, labels, 0.1);
            return last.loss;
        };
        f.backward = [&] { set_grad(z, last.grad); };
        reports.push_back(grad_check(f));
    }

    reports.push_back(check_block<ResGcnBlock<double>>("basic_block", {BlockKind::kBasic, 3, 4, 2, false, 1}, coco,
                                                       {2, 3, 6, 17}, seed + 90));
    reports.push_back(check_block<ResGcnBlock<double>>("bottleneck_block", {BlockKind::kBottleneck, 8, 8, 1, false, 1},
                                                       coco, {2, 8, 5, 17}, seed + 100));
    reports.push_back(check_block<ResGcnBlock<double>>("bottleneck_block/s2",
                                                       {BlockKind::kBottleneck, 8, 16, 2, false, 2}, coco,
                                                       {2, 8, 5, 17}, seed + 110));

    {
        const auto spec = ModelSpec::resgcn_n39_r8().with_channel_divisor(4);
        ResGcnNet<double> model(spec, coco, seed + 120);
        auto x = random_like({2, 8, 17, 3}, seed + 121);
        const auto dir = direction({2, spec.embedding_dim}, seed + 122);
        GradFragment f{"model", {{"x", &x}}, model.parameters(), {}, {}};
        f.evaluate = [&] { return project(model.forward(x, ops::Mode::kTrain), dir); };
        f.backward = [&] {
            model.zero_grad();
            set_grad(x, model.backward(dir));
        };
        reports.push_back(grad_check(f));
    }
    return reports;
}

}  // namespace gaitgraph
