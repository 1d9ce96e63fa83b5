#include "gaitgraph/augmentation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

void AugmentConfig::validate() const {
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(p_reverse) || !is_prob(p_mirror)) throw ContractError("augmentation probabilities must lie in [0, 1]");
    if (!(sigma_frame >= 0.0) || !(sigma_sequence >= 0.0)) throw ContractError("noise sigmas must be non-negative");
    if (window < 4) throw ContractError("window must be at least 4 frames");
}

PoseSequence reverse_time(const PoseSequence& seq) {
    PoseSequence out = seq;
    const std::size_t stride = seq.joints * kPoseChannels;
    for (std::size_t t = 0; t < seq.frames; ++t)
        std::copy_n(seq.values.begin() + static_cast<long>((seq.frames - 1 - t) * stride), stride,
                    out.values.begin() + static_cast<long>(t * stride));
    return out;
}

PoseSequence mirror_pose(const PoseSequence& seq, const SkeletonTopology& topology) {
    if (topology.num_joints != seq.joints) throw ShapeError("mirror_pose: topology joint count differs from sequence");
    const auto map = topology.mirror_map();
    PoseSequence out = seq;
    for (std::size_t t = 0; t < seq.frames; ++t) {
        double cx = 0.0;
        for (std::size_t n = 0; n < seq.joints; ++n) cx += seq.at(t, n, 0);
        cx /= static_cast<double>(seq.joints);
        for (std::size_t n = 0; n < seq.joints; ++n) {
            const std::size_t m = map[n];
            out.at(t, m, 0) = 2.0 * cx - seq.at(t, n, 0);
            out.at(t, m, 1) = seq.at(t, n, 1);
            out.at(t, m, 2) = seq.at(t, n, 2);
        }
    }
    return out;
}

PoseSequence jitter_joints(const PoseSequence& seq, double sigma_frame, double sigma_sequence, Rng& rng,
                           bool noise_on_confidence) {
    if (!(sigma_frame >= 0.0) || !(sigma_sequence >= 0.0)) throw ContractError("noise sigmas must be non-negative");
    PoseSequence out = seq;
    const std::size_t channels = noise_on_confidence ? 3 : 2;
    std::vector<double> offsets(seq.joints * channels, 0.0);
    if (sigma_sequence > 0.0)
        for (auto& o : offsets) o = normal(rng, 0.0, sigma_sequence);
    for (std::size_t t = 0; t < seq.frames; ++t)
        for (std::size_t n = 0; n < seq.joints; ++n)
            for (std::size_t c = 0; c < channels; ++c) {
                double v = out.at(t, n, c) + offsets[n * channels + c];
                if (sigma_frame > 0.0) v += normal(rng, 0.0, sigma_frame);
                if (c == 2) v = std::clamp(v, 0.0, 1.0);
                out.at(t, n, c) = v;
            }
    return out;
}

PoseSequence sample_window(const PoseSequence& seq, std::size_t window, WindowMode mode, Rng& rng) {
    if (seq.frames == 0) throw DegenerateError("cannot window an empty sequence");
    if (window == 0) throw ContractError("window must be positive");
    PoseSequence out(window, seq.joints);
    out.key = seq.key;
    std::size_t start = 0;
    if (seq.frames > window)
        start = mode == WindowMode::kCenter ? (seq.frames - window) / 2 : uniform_index(rng, seq.frames - window + 1);
    const std::size_t stride = seq.joints * kPoseChannels;
    for (std::size_t t = 0; t < window; ++t) {
        const std::size_t src = seq.frames > window ? start + t : t % seq.frames;
        std::copy_n(seq.values.begin() + static_cast<long>(src * stride), stride,
                    out.values.begin() + static_cast<long>(t * stride));
    }
    return out;
}

PoseSequence normalize_coords(const PoseSequence& seq) {
    if (seq.frames == 0 || seq.joints == 0) throw DegenerateError("cannot normalize an empty sequence");
    bool any_confident = false;
    double sx = 0.0, sy = 0.0, extent = 0.0;
    for (std::size_t t = 0; t < seq.frames; ++t) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t n = 0; n < seq.joints; ++n) {
            sx += seq.at(t, n, 0);
            sy += seq.at(t, n, 1);
            lo = std::min(lo, seq.at(t, n, 1));
            hi = std::max(hi, seq.at(t, n, 1));
            any_confident = any_confident || seq.at(t, n, 2) > 0.0;
        }
        extent = std::max(extent, hi - lo);
    }
    if (!any_confident) throw DegenerateError(to_string(seq.key) + ": no joint has positive confidence");
    if (!(extent > 0.0)) throw DegenerateError(to_string(seq.key) + ": zero vertical extent");
    const double count = static_cast<double>(seq.frames * seq.joints);
    const double mx = sx / count, my = sy / count;
    PoseSequence out = seq;
    for (std::size_t t = 0; t < seq.frames; ++t)
        for (std::size_t n = 0; n < seq.joints; ++n) {
            out.at(t, n, 0) = (seq.at(t, n, 0) - mx) / extent;
            out.at(t, n, 1) = (seq.at(t, n, 1) - my) / extent;
        }
    return out;
}

PoseSequence shuffle_frames(const PoseSequence& seq, Rng& rng) {
    std::vector<std::size_t> order(seq.frames);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    PoseSequence out = seq;
    const std::size_t stride = seq.joints * kPoseChannels;
    for (std::size_t t = 0; t < seq.frames; ++t)
        std::copy_n(seq.values.begin() + static_cast<long>(order[t] * stride), stride,
                    out.values.begin() + static_cast<long>(t * stride));
    return out;
}

PoseSequence augment(const PoseSequence& seq, const AugmentConfig& config, const SkeletonTopology& topology,
                     Rng& rng) {
    PoseSequence out = sample_window(seq, config.window, WindowMode::kRandom, rng);
    if (bernoulli(rng, config.p_reverse)) out = reverse_time(out);
    if (bernoulli(rng, config.p_mirror)) out = mirror_pose(out, topology);
    return jitter_joints(out, config.sigma_frame, config.sigma_sequence, rng, config.noise_on_confidence);
}

}  // namespace gaitgraph
