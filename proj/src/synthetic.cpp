#include "gaitgraph/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "gaitgraph/dataset.hpp"
#include "gaitgraph/error.hpp"
#include "gaitgraph/random.hpp"
#include "gaitgraph/skeleton_graph.hpp"

namespace gaitgraph {

namespace {

constexpr double kPi = std::numbers::pi;

struct Body {
    double leg = 0.95;
    double thigh_ratio = 0.5;
    double torso = 0.58;
    double neck = 0.2;
    double shoulder_w = 0.2;
    double hip_w = 0.11;
    double upper_arm = 0.31;
    double forearm = 0.27;
    double thigh_amp = 0.45;
    double knee_amp = 0.7;
    double arm_amp = 0.45;
    double elbow_bend = 0.25;
    double bob = 0.02;
};

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Body subject_body(const SyntheticConfig& config, int subject) {
    Body body;
    if (config.kind == SyntheticKind::kTemporal) return body;
    Rng rng(sequence_seed(config.seed ^ 0xb0d1e5ULL, SequenceKey{subject, Condition::kNM, 0, 0}));
    body.leg = uniform(rng, 0.85, 1.05);
    body.thigh_ratio = uniform(rng, 0.45, 0.55);
    body.torso = uniform(rng, 0.5, 0.66);
    body.shoulder_w = uniform(rng, 0.16, 0.24);
    body.hip_w = uniform(rng, 0.08, 0.14);
    body.upper_arm = uniform(rng, 0.27, 0.35);
    body.forearm = uniform(rng, 0.23, 0.31);
    body.thigh_amp = uniform(rng, 0.3, 0.6);
    body.knee_amp = uniform(rng, 0.5, 0.9);
    body.arm_amp = uniform(rng, 0.25, 0.65);
    body.elbow_bend = uniform(rng, 0.1, 0.4);
    body.bob = uniform(rng, 0.01, 0.04);
    return body;
}

struct Vec3 {
    double x, y, z;  // lateral (left positive), up, forward
};

Vec3 limb(const Vec3& from, double length, double angle) {
    return {from.x, from.y - length * std::cos(angle), from.z + length * std::sin(angle)};
}

constexpr double kParallax = 0.25;

struct Affine {
    double xx, xy, yy;
};

// Foreshortening toward the frontal views, a view-dependent shear, and a
// horizontal flip once the subject walks the other way (views past 90).
Affine view_affine(int view_degrees) {
    const double v = view_degrees * kPi / 180.0;
    const double direction = view_degrees > 90 ? -1.0 : 1.0;
    return {direction * (0.45 + 0.55 * std::sin(v)), 0.2 * std::cos(v), 0.9 + 0.1 * std::sin(v)};
}

}  // namespace

double subject_period(const SyntheticConfig& config, int subject) {
    const int train = static_cast<int>(std::ceil(0.6 * config.subjects));
    const int slot = subject <= train ? 2 * (subject - 1) : 2 * (subject - train - 1) + 1;
    return config.period_base + config.period_step * slot;
}

PoseSequence synthesize_sequence(const SyntheticConfig& config, const SequenceKey& key) {
    if (config.min_frames == 0 || config.max_frames < config.min_frames)
        throw ContractError("synthetic frame range is empty");
    Body body = subject_body(config, key.subject);
    double left_arm = body.arm_amp, right_arm = body.arm_amp;
    if (key.condition == Condition::kBG) {
        left_arm *= 0.3;  // hand on the bag strap
    } else if (key.condition == Condition::kCL) {
        body.shoulder_w *= 1.15;
        body.hip_w *= 1.3;
        left_arm *= 0.7;
        right_arm *= 0.7;
    }

    Rng rng(sequence_seed(config.seed, key));
    const std::size_t frames = config.min_frames + uniform_index(rng, config.max_frames - config.min_frames + 1);
    const double period = subject_period(config, key.subject) * (1.0 + config.period_jitter * normal(rng));
    const double phase0 = uniform(rng, 0.0, 2.0 * kPi);
    const auto view_map = view_affine(key.view);
    const double thigh = body.leg * body.thigh_ratio, shin = body.leg - thigh;

    PoseSequence seq(frames, coco::kNumJoints);
    seq.key = key;
    std::vector<Vec3> p(coco::kNumJoints);
    for (std::size_t t = 0; t < frames; ++t) {
        const double ph = phase0 + 2.0 * kPi * static_cast<double>(t) / period;
        const double lift = body.bob * std::cos(2.0 * ph);
        const Vec3 hip_c{0.0, body.leg + lift, 0.0};
        const Vec3 sh_c{0.0, hip_c.y + body.torso, 0.0};

        for (int side = 0; side < 2; ++side) {
            const double sgn = side == 0 ? 1.0 : -1.0;
            const double leg_ph = ph + side * kPi;
            const double hip_a = body.thigh_amp * std::sin(leg_ph);
            const double knee_flex = body.knee_amp * std::max(0.0, std::sin(leg_ph + 0.5 * kPi));
            const Vec3 hip{sgn * body.hip_w, hip_c.y, 0.0};
            const Vec3 knee = limb(hip, thigh, hip_a);
            const Vec3 ankle = limb(knee, shin, hip_a - knee_flex);

            const double arm_a = (side == 0 ? left_arm : right_arm) * std::sin(leg_ph + kPi);
            const Vec3 shoulder{sgn * body.shoulder_w, sh_c.y, 0.0};
            const Vec3 elbow = limb(shoulder, body.upper_arm, arm_a);
            const Vec3 wrist = limb(elbow, body.forearm, arm_a + body.elbow_bend);

            p[coco::kLeftHip + side] = hip;
            p[coco::kLeftKnee + side] = knee;
            p[coco::kLeftAnkle + side] = ankle;
            p[coco::kLeftShoulder + side] = shoulder;
            p[coco::kLeftElbow + side] = elbow;
            p[coco::kLeftWrist + side] = wrist;
            p[coco::kLeftEye + side] = {sgn * 0.035, sh_c.y + body.neck + 0.03, 0.08};
            p[coco::kLeftEar + side] = {sgn * 0.075, sh_c.y + body.neck, 0.0};
        }
        p[coco::kNose] = {0.0, sh_c.y + body.neck, 0.11};

        for (std::size_t n = 0; n < coco::kNumJoints; ++n) {
            // Side-view coordinates with a little lateral parallax, then the
            // view's affine map.
            const double side_x = p[n].z + kParallax * p[n].x;
            const double img_x = view_map.xx * side_x + view_map.xy * p[n].y;
            const double img_y = view_map.yy * p[n].y;
            seq.at(t, n, 0) = 320.0 + config.pixels_per_unit * img_x + config.noise_px * normal(rng);
            seq.at(t, n, 1) = 400.0 - config.pixels_per_unit * img_y + config.noise_px * normal(rng);
            seq.at(t, n, 2) = uniform(rng, 0.7, 1.0);
        }
    }
    return seq;
}

std::vector<PoseSequence> synthesize_corpus(const SyntheticConfig& config) {
    if (config.subjects < 1) throw ContractError("synthetic corpus needs at least one subject");
    struct Slot {
        Condition condition;
        int count;
    };
    constexpr Slot slots[] = {{Condition::kNM, 6}, {Condition::kBG, 2}, {Condition::kCL, 2}};
    std::vector<PoseSequence> out;
    out.reserve(static_cast<std::size_t>(config.subjects) * kSequencesPerSubject);
    for (int s = 1; s <= config.subjects; ++s)
        for (const auto& slot : slots)
            for (int i = 1; i <= slot.count; ++i)
                for (int view : kCasiaViews) out.push_back(synthesize_sequence(config, {s, slot.condition, i, view}));
    return out;
}

std::size_t write_corpus(const std::filesystem::path& root, const std::vector<PoseSequence>& sequences) {
    std::filesystem::create_directories(root);
    for (const auto& seq : sequences) write_pose_csv_file((root / (to_string(seq.key) + ".csv")).string(), seq);
    return sequences.size();
}

}  // namespace gaitgraph
