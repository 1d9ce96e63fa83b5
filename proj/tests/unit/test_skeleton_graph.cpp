#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gaitgraph/error.hpp"
#include "gaitgraph/random.hpp"
#include "gaitgraph/skeleton_graph.hpp"

using namespace gaitgraph;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix random_graph(std::size_t n, Rng& rng) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (bernoulli(rng, 0.5)) a(i, j) = a(j, i) = 1.0;
    return a;
}

// Explicit-loop reference for the normalized operator.
Matrix loop_oracle(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0;
        for (std::size_t j = 0; j < n; ++j) d += a(i, j);
        inv[i] = 1.0 / std::sqrt(d);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = inv[i] * (a(i, j) + (i == j)) * inv[j];
    return out;
}

SkeletonTopology path3() {
    SkeletonTopology t;
    t.num_joints = 3;
    t.joint_names = {"a", "b", "c"};
    t.edges = {{0, 1}, {1, 2}};
    t.center_joints = {1};
    return t;
}

}  // namespace

TEST_CASE("coco17 topology") {
    const auto topo = build_coco17_topology();
    CHECK(topo.num_joints == 17);
    CHECK(topo.edges.size() == 19);
    CHECK(topo.has_edge(coco::kLeftKnee, coco::kLeftAnkle));
    CHECK_FALSE(topo.has_edge(coco::kNose, coco::kLeftAnkle));
    const auto a = topo.adjacency();
    CHECK(a.is_symmetric());
    for (std::size_t i = 0; i < 17; ++i) CHECK(a(i, i) == 0.0);
    CHECK_NOTHROW(topo.validate());

    const auto mirror = topo.mirror_map();
    for (std::size_t i = 0; i < 17; ++i) CHECK(mirror[mirror[i]] == i);
    CHECK(mirror[coco::kNose] == coco::kNose);
    CHECK(mirror[coco::kLeftWrist] == coco::kRightWrist);
}

TEST_CASE("topology validation rejects broken graphs") {
    auto t = path3();
    CHECK_NOTHROW(t.validate());
    t.edges.push_back({1, 1});
    CHECK_THROWS_AS(t.validate(), TopologyError);
    t = path3();
    t.edges.push_back({1, 0});
    CHECK_THROWS_AS(t.validate(), TopologyError);
    t = path3();
    t.edges = {{0, 1}};
    CHECK_THROWS_AS(t.validate(), TopologyError);
}

TEST_CASE("normalize_adjacency examples") {
    const auto two = normalize_adjacency(from_rows({{0, 1}, {1, 0}}));
    for (double v : two.values()) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalize_adjacency(from_rows({{0}})) == from_rows({{1.0}}));
    CHECK(normalize_adjacency(Matrix(3, 3)) == Matrix::identity(3));
    CHECK_THROWS_AS(normalize_adjacency(Matrix(2, 3)), TopologyError);
    CHECK_THROWS_AS(normalize_adjacency(from_rows({{0, 1}, {0, 0}})), TopologyError);
}

TEST_CASE("normalize_adjacency matches the loop oracle") {
    // Exhaustive for N <= 4, sampled for N = 5, 6.
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t pairs = n * (n - 1) / 2;
        for (unsigned bits = 0; bits < (1U << pairs); ++bits) {
            Matrix a(n, n);
            std::size_t b = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j, ++b)
                    if (bits >> b & 1U) a(i, j) = a(j, i) = 1.0;
            const auto out = normalize_adjacency(a);
            CHECK(out == loop_oracle(a));
            CHECK(out.is_symmetric());
            for (double v : out.values()) CHECK((v >= 0.0 && v <= 1.0));
        }
    }
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_graph(5 + trial % 2, rng);
        CHECK(normalize_adjacency(a) == loop_oracle(a));
    }
}

TEST_CASE("regular graphs normalize to row-stochastic operators") {
    // Cycle of 6 nodes: 2-regular.
    Matrix a(6, 6);
    for (std::size_t i = 0; i < 6; ++i) a(i, (i + 1) % 6) = a((i + 1) % 6, i) = 1.0;
    const auto out = normalize_adjacency(a);
    for (std::size_t i = 0; i < 6; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 6; ++j) row += out(i, j);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("normalization commutes with joint relabelling") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + trial % 4;
        const auto a = random_graph(n, rng);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix pa(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) pa(perm[i], perm[j]) = a(i, j);
        const auto na = normalize_adjacency(a);
        const auto npa = normalize_adjacency(pa);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(npa(perm[i], perm[j]) == na(i, j));
    }
}

TEST_CASE("spatial partition of a path graph") {
    const auto set = spatial_partition(path3());
    REQUIRE(set.masks.size() == 3);
    CHECK(set.masks[0] == Matrix::identity(3));
    CHECK(set.masks[1] == from_rows({{0, 1, 0}, {0, 0, 0}, {0, 1, 0}}));
    CHECK(set.masks[2] == from_rows({{0, 0, 0}, {1, 0, 1}, {0, 0, 0}}));
    // Each part normalized with its own out/in degrees.
    CHECK(set.partitions[1](0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(set.partitions[2](1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("spatial partition of a single node") {
    SkeletonTopology t;
    t.num_joints = 1;
    t.joint_names = {"x"};
    t.center_joints = {0};
    const auto set = spatial_partition(t);
    CHECK(set.masks[0] == from_rows({{1}}));
    CHECK(set.masks[1] == Matrix(1, 1));
    CHECK(set.masks[2] == Matrix(1, 1));
}

TEST_CASE("partition masks are disjoint and sum to A + I") {
    const auto topo = build_coco17_topology();
    const auto set = spatial_partition(topo);
    const auto target = topo.adjacency() + Matrix::identity(17);
    for (std::size_t i = 0; i < 17; ++i)
        for (std::size_t j = 0; j < 17; ++j) {
            double sum = 0.0;
            for (const auto& m : set.masks) {
                CHECK((m(i, j) == 0.0 || m(i, j) == 1.0));
                sum += m(i, j);
            }
            CHECK(sum == target(i, j));
        }
    CHECK(set.full == normalize_adjacency(topo.adjacency()));

    const auto uniform = uniform_partition(topo);
    REQUIRE(uniform.num_partitions() == 1);
    CHECK(uniform.partitions[0] == set.full);
    CHECK(uniform.masks[0] == target);
}

TEST_CASE("hop distances and disconnected graphs") {
    const auto hops = hop_distances(build_coco17_topology());
    CHECK(hops[coco::kLeftHip] == 0);
    CHECK(hops[coco::kLeftKnee] == 1);
    CHECK(hops[coco::kLeftAnkle] == 2);
    CHECK(hops[coco::kLeftShoulder] == 1);
    auto t = path3();
    t.edges = {{0, 1}};
    CHECK_THROWS_AS(hop_distances(t), TopologyError);
}

TEST_CASE("topology json export") {
    const auto doc = nlohmann::json::parse(topology_to_json(build_coco17_topology()));
    CHECK(doc["joints"].size() == 17);
    CHECK(doc["joints"][15] == "left_ankle");
    CHECK(doc["edges"].size() == 19);
}
