#include "gaitgraph/skeleton_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix sum: extent mismatch");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matrix product: inner extent mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

void SkeletonTopology::validate() const {
    if (num_joints == 0) throw TopologyError("topology has no joints");
    if (!joint_names.empty() && joint_names.size() != num_joints)
        throw TopologyError("joint name count does not match joint count");
    std::set<Edge> seen;
    for (auto [a, b] : edges) {
        if (a >= num_joints || b >= num_joints)
            throw TopologyError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        if (a == b) throw TopologyError("self-edge on joint " + std::to_string(a));
        Edge key{std::min(a, b), std::max(a, b)};
        if (!seen.insert(key).second)
            throw TopologyError("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    std::vector<int> lateral(num_joints, 0);
    for (auto [l, r] : left_right_pairs) {
        if (l >= num_joints || r >= num_joints || l == r)
            throw TopologyError("invalid left/right pair");
        if (++lateral[l] > 1 || ++lateral[r] > 1)
            throw TopologyError("joint listed in more than one left/right pair");
    }
    if (center_joints.empty()) throw TopologyError("no center joints");
    for (auto c : center_joints)
        if (c >= num_joints) throw TopologyError("center joint out of range");
    hop_distances(*this);
}

Matrix SkeletonTopology::adjacency() const {
    Matrix a(num_joints, num_joints);
    for (auto [i, j] : edges) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

std::vector<std::size_t> SkeletonTopology::mirror_map() const {
    std::vector<std::size_t> map(num_joints);
    for (std::size_t i = 0; i < num_joints; ++i) map[i] = i;
    for (auto [l, r] : left_right_pairs) {
        map[l] = r;
        map[r] = l;
    }
    return map;
}

bool SkeletonTopology::has_edge(std::size_t a, std::size_t b) const {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
        return (e.first == a && e.second == b) || (e.first == b && e.second == a);
    });
}

SkeletonTopology build_coco17_topology() {
    using namespace coco;
    SkeletonTopology t;
    t.num_joints = kNumJoints;
    t.joint_names = {"nose",          "left_eye",       "right_eye",  "left_ear",    "right_ear",
                     "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
                     "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
                     "left_ankle",    "right_ankle"};
    t.edges = {{kNose, kLeftEye},
               {kNose, kRightEye},
               {kLeftEye, kRightEye},
               {kLeftEye, kLeftEar},
               {kRightEye, kRightEar},
               {kLeftEar, kLeftShoulder},
               {kRightEar, kRightShoulder},
               {kLeftShoulder, kRightShoulder},
               {kLeftShoulder, kLeftElbow},
               {kLeftElbow, kLeftWrist},
               {kRightShoulder, kRightElbow},
               {kRightElbow, kRightWrist},
               {kLeftShoulder, kLeftHip},
               {kRightShoulder, kRightHip},
               {kLeftHip, kRightHip},
               {kLeftHip, kLeftKnee},
               {kLeftKnee, kLeftAnkle},
               {kRightHip, kRightKnee},
               {kRightKnee, kRightAnkle}};
    t.left_right_pairs = {{kLeftEye, kRightEye},         {kLeftEar, kRightEar},     {kLeftShoulder, kRightShoulder},
                          {kLeftElbow, kRightElbow},     {kLeftWrist, kRightWrist}, {kLeftHip, kRightHip},
                          {kLeftKnee, kRightKnee},       {kLeftAnkle, kRightAnkle}};
    t.center_joints = {kLeftHip, kRightHip};
    return t;
}

SkeletonTopology permute_topology(const SkeletonTopology& topology, const std::vector<std::size_t>& perm) {
    if (perm.size() != topology.num_joints) throw TopologyError("permutation length does not match joint count");
    SkeletonTopology out;
    out.num_joints = topology.num_joints;
    if (!topology.joint_names.empty()) {
        out.joint_names.resize(topology.num_joints);
        for (std::size_t i = 0; i < perm.size(); ++i) out.joint_names[perm[i]] = topology.joint_names[i];
    }
    for (auto [a, b] : topology.edges) out.edges.emplace_back(perm[a], perm[b]);
    for (auto [l, r] : topology.left_right_pairs) out.left_right_pairs.emplace_back(perm[l], perm[r]);
    for (auto c : topology.center_joints) out.center_joints.push_back(perm[c]);
    return out;
}

Matrix normalize_adjacency(const Matrix& adjacency) {
    if (!adjacency.is_square()) throw TopologyError("adjacency matrix is not square");
    if (!adjacency.is_symmetric()) throw TopologyError("adjacency matrix is not symmetric");
    const std::size_t n = adjacency.rows();
    Matrix with_loops = adjacency + Matrix::identity(n);
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) degree += with_loops(i, j);
        inv_sqrt[i] = 1.0 / std::sqrt(degree);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = inv_sqrt[i] * with_loops(i, j) * inv_sqrt[j];
    return out;
}

Matrix normalize_mask(const Matrix& mask) {
    if (!mask.is_square()) throw TopologyError("mask is not square");
    const std::size_t n = mask.rows();
    std::vector<double> row_scale(n, 0.0), col_scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += mask(i, j);
            col += mask(j, i);
        }
        row_scale[i] = row > 0.0 ? 1.0 / std::sqrt(row) : 0.0;
        col_scale[i] = col > 0.0 ? 1.0 / std::sqrt(col) : 0.0;
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = row_scale[i] * mask(i, j) * col_scale[j];
    return out;
}

std::vector<std::size_t> hop_distances(const SkeletonTopology& topology) {
    constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
    const std::size_t n = topology.num_joints;
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (auto [a, b] : topology.edges) {
        neighbors[a].push_back(b);
        neighbors[b].push_back(a);
    }
    std::vector<std::size_t> hops(n, kUnreached);
    std::deque<std::size_t> queue;
    for (auto c : topology.center_joints) {
        if (c >= n) throw TopologyError("center joint out of range");
        hops[c] = 0;
        queue.push_back(c);
    }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto u : neighbors[v])
            if (hops[u] == kUnreached) {
                hops[u] = hops[v] + 1;
                queue.push_back(u);
            }
    }
    for (std::size_t v = 0; v < n; ++v)
        if (hops[v] == kUnreached) throw TopologyError("graph is disconnected: joint " + std::to_string(v) + " unreachable");
    return hops;
}

AdjacencySet spatial_partition(const SkeletonTopology& topology) {
    if (topology.center_joints.empty()) throw TopologyError("spatial partition needs at least one center joint");
    const auto hops = hop_distances(topology);
    const std::size_t n = topology.num_joints;
    const Matrix a = topology.adjacency();

    AdjacencySet set;
    set.full = normalize_adjacency(a);
    set.masks.assign(kNumSpatialPartitions, Matrix(n, n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Partition part;
            if (i == j)
                part = Partition::kRoot;
            else if (a(i, j) == 0.0)
                continue;
            else if (hops[j] < hops[i])
                part = Partition::kCentripetal;
            else
                part = Partition::kCentrifugal;
            set.masks[static_cast<std::size_t>(part)](i, j) = 1.0;
        }
    for (const auto& mask : set.masks) set.partitions.push_back(normalize_mask(mask));
    return set;
}

AdjacencySet uniform_partition(const SkeletonTopology& topology) {
    hop_distances(topology);
    const Matrix a = topology.adjacency();
    AdjacencySet set;
    set.full = normalize_adjacency(a);
    set.masks = {a + Matrix::identity(topology.num_joints)};
    set.partitions = {set.full};
    return set;
}

AdjacencySet build_adjacency(const SkeletonTopology& topology, std::size_t num_partitions) {
    if (num_partitions == kNumSpatialPartitions) return spatial_partition(topology);
    if (num_partitions == 1) return uniform_partition(topology);
    throw TopologyError("unsupported partition count " + std::to_string(num_partitions) + " (expected 1 or 3)");
}

std::string topology_to_json(const SkeletonTopology& topology) {
    nlohmann::json doc;
    doc["joints"] = topology.joint_names;
    auto edges = nlohmann::json::array();
    for (auto [a, b] : topology.edges) edges.push_back({a, b});
    doc["edges"] = edges;
    return doc.dump(2);
}

}  // namespace gaitgraph
