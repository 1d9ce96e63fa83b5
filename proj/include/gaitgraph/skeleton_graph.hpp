#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gaitgraph {

// Dense row-major real matrix. Only used for N x N graph operators, so no
// attempt is made at blocking or expression templates.
class Matrix {
   public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    const std::vector<double>& values() const { return values_; }

    bool is_square() const { return rows_ == cols_; }
    bool is_symmetric() const;

    bool operator==(const Matrix& other) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

using Edge = std::pair<std::size_t, std::size_t>;

struct SkeletonTopology {
    std::size_t num_joints = 0;
    std::vector<std::string> joint_names;
    std::vector<Edge> edges;
    std::vector<Edge> left_right_pairs;
    std::vector<std::size_t> center_joints;

    // Throws TopologyError when an invariant does not hold.
    void validate() const;

    // Binary adjacency A (symmetric, zero diagonal).
    Matrix adjacency() const;

    // Joint index -> mirrored joint index (identity for central joints).
    std::vector<std::size_t> mirror_map() const;

    bool has_edge(std::size_t a, std::size_t b) const;
};

namespace coco {
enum Joint : std::size_t {
    kNose = 0,
    kLeftEye,
    kRightEye,
    kLeftEar,
    kRightEar,
    kLeftShoulder,
    kRightShoulder,
    kLeftElbow,
    kRightElbow,
    kLeftWrist,
    kRightWrist,
    kLeftHip,
    kRightHip,
    kLeftKnee,
    kRightKnee,
    kLeftAnkle,
    kRightAnkle,
};
inline constexpr std::size_t kNumJoints = 17;
}  // namespace coco

SkeletonTopology build_coco17_topology();

// Relabel joints: joint i of the input becomes joint perm[i] of the output.
SkeletonTopology permute_topology(const SkeletonTopology& topology,
                                  const std::vector<std::size_t>& perm);

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
Matrix normalize_adjacency(const Matrix& adjacency);

// Normalizes a (possibly asymmetric) binary mask with its own degrees:
// D_out^{-1/2} M D_in^{-1/2}. Zero-degree rows and columns stay zero. For a
// symmetric mask this is the usual symmetric normalization.
Matrix normalize_mask(const Matrix& mask);

// Minimum hop distance from every joint to the nearest center joint.
// Throws TopologyError when some joint is unreachable.
std::vector<std::size_t> hop_distances(const SkeletonTopology& topology);

enum class Partition : std::size_t { kRoot = 0, kCentripetal = 1, kCentrifugal = 2 };
inline constexpr std::size_t kNumSpatialPartitions = 3;

struct AdjacencySet {
    Matrix full;
    std::vector<Matrix> partitions;
    std::vector<Matrix> masks;

    std::size_t num_partitions() const { return partitions.size(); }
    std::size_t num_nodes() const { return full.rows(); }
};

// Root / centripetal / centrifugal split of A + I, each part normalized.
AdjacencySet spatial_partition(const SkeletonTopology& topology);

// Single partition holding normalize_adjacency(A); mask is A + I.
AdjacencySet uniform_partition(const SkeletonTopology& topology);

AdjacencySet build_adjacency(const SkeletonTopology& topology, std::size_t num_partitions);

// {"joints": [...], "edges": [[i, j], ...]}
std::string topology_to_json(const SkeletonTopology& topology);

}  // namespace gaitgraph
