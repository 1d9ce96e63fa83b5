#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gaitgraph {

enum class Condition { kNM = 0, kBG = 1, kCL = 2 };
inline constexpr Condition kAllConditions[] = {Condition::kNM, Condition::kBG, Condition::kCL};

std::string to_string(Condition condition);       // "nm", "bg", "cl"
std::string condition_label(Condition condition);  // "NM", "BG", "CL"
std::optional<Condition> parse_condition(const std::string& text);

struct SequenceKey {
    int subject = 0;
    Condition condition = Condition::kNM;
    int seq_index = 1;
    int view = 0;

    auto operator<=>(const SequenceKey&) const = default;
};

std::string to_string(const SequenceKey& key);  // "001-nm-01-090"

// Stable per-sequence seed so per-sequence randomness does not depend on
// iteration order.
std::uint64_t sequence_seed(std::uint64_t seed, const SequenceKey& key);

inline constexpr std::size_t kPoseChannels = 3;  // x, y, confidence

// T x N x 3 frames (x, y, confidence) with the identifying metadata.
struct PoseSequence {
    SequenceKey key;
    std::size_t frames = 0;
    std::size_t joints = 17;
    std::vector<double> values;

    PoseSequence() = default;
    PoseSequence(std::size_t frames, std::size_t joints) : frames(frames), joints(joints), values(frames * joints * 3) {}

    double& at(std::size_t t, std::size_t n, std::size_t c) { return values[(t * joints + n) * 3 + c]; }
    double at(std::size_t t, std::size_t n, std::size_t c) const { return values[(t * joints + n) * 3 + c]; }

    bool operator==(const PoseSequence&) const = default;
};

// One row per frame: frame index, then x, y, confidence for each joint.
PoseSequence parse_pose_csv(std::istream& in, std::size_t joints = 17);
PoseSequence read_pose_csv(const std::string& path, std::size_t joints = 17);
void write_pose_csv(std::ostream& out, const PoseSequence& seq);
void write_pose_csv_file(const std::string& path, const PoseSequence& seq);

}  // namespace gaitgraph
