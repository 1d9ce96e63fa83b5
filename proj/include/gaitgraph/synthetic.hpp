#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaitgraph/pose.hpp"

namespace gaitgraph {

// kGait: each subject has its own body proportions, swing amplitudes and
// stride period. kTemporal: every subject shares one body and swing; only
// the stride period differs, so identity lives in frame order alone.
enum class SyntheticKind { kGait, kTemporal };

struct SyntheticConfig {
    SyntheticKind kind = SyntheticKind::kGait;
    int subjects = 10;
    std::uint64_t seed = 0;
    std::size_t min_frames = 70;
    std::size_t max_frames = 90;
    double noise_px = 0.5;
    double period_base = 10.0;  // frames per stride
    double period_step = 1.0;   // between neighbouring period slots
    double period_jitter = 0.01;
    double pixels_per_unit = 100.0;
};

// Subjects that lt_partition places in the test split get period slots
// between those of the training subjects.
double subject_period(const SyntheticConfig& config, int subject);

// 3D stick figure walking in place, drawn from the side and then mapped by an
// invertible per-view affine transform; conditions alter arm swing (BG) and
// torso width (CL).
PoseSequence synthesize_sequence(const SyntheticConfig& config, const SequenceKey& key);

// All 110 CASIA-B style sequences for subjects 1..S.
std::vector<PoseSequence> synthesize_corpus(const SyntheticConfig& config);

// Writes "SSS-cc-NN-VVV.csv" files; returns the number written.
std::size_t write_corpus(const std::filesystem::path& root, const std::vector<PoseSequence>& sequences);

}  // namespace gaitgraph
