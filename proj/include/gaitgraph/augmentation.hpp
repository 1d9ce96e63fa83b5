#pragma once

#include <cstddef>

#include "gaitgraph/pose.hpp"
#include "gaitgraph/random.hpp"
#include "gaitgraph/skeleton_graph.hpp"

namespace gaitgraph {

struct AugmentConfig {
    double p_reverse = 0.5;
    double p_mirror = 0.5;
    double sigma_frame = 0.005;
    double sigma_sequence = 0.01;
    std::size_t window = 60;
    bool noise_on_confidence = false;

    void validate() const;
};

enum class WindowMode { kRandom, kCenter };

PoseSequence reverse_time(const PoseSequence& seq);

// Reflects x about each frame's mean x and swaps left/right joints.
PoseSequence mirror_pose(const PoseSequence& seq, const SkeletonTopology& topology);

// Per-frame noise N(0, sigma_frame^2) plus one per-joint offset
// N(0, sigma_sequence^2) shared by all frames; x and y only unless
// noise_on_confidence (confidence is then clamped to [0, 1]).
PoseSequence jitter_joints(const PoseSequence& seq, double sigma_frame, double sigma_sequence, Rng& rng,
                           bool noise_on_confidence = false);

// Contiguous window; shorter sequences are cyclically repeated.
PoseSequence sample_window(const PoseSequence& seq, std::size_t window, WindowMode mode, Rng& rng);

// Subtracts the sequence-wide mean (x, y) and divides by the largest
// per-frame vertical extent.
PoseSequence normalize_coords(const PoseSequence& seq);

// Applies a random frame permutation.
PoseSequence shuffle_frames(const PoseSequence& seq, Rng& rng);

// Training view: random window, optional reversal and mirroring, then noise.
PoseSequence augment(const PoseSequence& seq, const AugmentConfig& config, const SkeletonTopology& topology, Rng& rng);

}  // namespace gaitgraph
