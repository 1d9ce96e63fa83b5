#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/augmentation.hpp"
#include "gaitgraph/dataset.hpp"
#include "gaitgraph/model.hpp"
#include "gaitgraph/optim.hpp"

namespace gaitgraph {

struct Cycle {
    std::size_t epochs = 0;
    double max_lr = 0.0;
    bool operator==(const Cycle&) const = default;
};

// "300:0.01,100:1e-5"
std::vector<Cycle> parse_cycles(const std::string& text);
std::string format_cycles(const std::vector<Cycle>& cycles);

struct TrainConfig {
    double temperature = 0.01;
    std::size_t batch_size = 128;
    std::vector<Cycle> cycles{{300, 0.01}, {100, 1e-5}};
    double weight_decay = 1e-5;
    std::uint64_t seed = 0;
    double epochs_scale = 1.0;
    std::size_t subjects_per_batch = 32;
    std::size_t sequences_per_subject = 2;
    std::size_t checkpoint_every = 10;
    std::size_t min_frames = 10;
    double pct_up = 0.3;
    double div_factor = 25.0;
    double final_div_factor = 1e3;

    void validate() const;
    // Cycle list after applying epochs_scale (at least one epoch per cycle).
    std::vector<Cycle> effective_cycles() const;
};

struct HistoryEntry {
    std::uint64_t step = 0;
    std::size_t epoch = 0;
    std::size_t cycle = 0;
    double lr = 0.0;
    double loss = 0.0;

    nlohmann::json to_json() const;
    static HistoryEntry from_json(const nlohmann::json& doc);
    bool operator==(const HistoryEntry&) const = default;
};

// Model, optimizer moments, counters and the data random source.
class Trainer {
   public:
    Trainer(const ModelSpec& spec, const SkeletonTopology& topology, TrainConfig config, AugmentConfig augment);

    // Forward, loss, backward and one Adam update at the given rate.
    double train_step(const Batch& batch, double lr);

    ResGcnNet<float>& model() { return model_; }
    const TrainConfig& config() const { return config_; }
    const AugmentConfig& augment_config() const { return augment_; }
    const SkeletonTopology& topology() const { return topology_; }
    Rng& data_rng() { return data_rng_; }

    std::uint64_t global_step() const { return global_step_; }

    // Sidecar with Adam moments and trainer counters (format GGO1).
    void save_optimizer(std::ostream& out, const nlohmann::json& progress) const;
    nlohmann::json load_optimizer(std::istream& in);

   private:
    TrainConfig config_;
    AugmentConfig augment_;
    SkeletonTopology topology_;
    ResGcnNet<float> model_;
    std::vector<AdamState<float>> adam_;
    Rng data_rng_;
    std::uint64_t global_step_ = 0;
};

struct FitOptions {
    // Checkpoints, history and final weights go here when set.
    std::optional<std::filesystem::path> out_dir;
    bool resume = false;
    // Stop after this many completed epochs in total (simulated interruption).
    std::optional<std::size_t> stop_after_epochs;
    std::function<void(const std::string&)> log;
};

struct FitResult {
    std::vector<HistoryEntry> history;
    std::size_t epochs_completed = 0;
    std::size_t checkpoints_written = 0;
    bool finished = false;
};

std::size_t steps_per_epoch(std::size_t num_sequences, const TrainConfig& config);

// Runs every cycle as its own one-cycle schedule; optimizer moments carry
// over between cycles. One epoch is one pass over the training sequences.
FitResult fit(Trainer& trainer, const std::vector<PoseSequence>& train_sequences, const FitOptions& options);

}  // namespace gaitgraph
