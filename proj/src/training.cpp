#include "gaitgraph/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gaitgraph/supcon.hpp"
#include "gaitgraph/weights_io.hpp"

namespace gaitgraph {

namespace fs = std::filesystem;

std::vector<Cycle> parse_cycles(const std::string& text) {
    std::vector<Cycle> cycles;
    std::stringstream list(text);
    std::string item;
    while (std::getline(list, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ContractError("cycle '" + item + "' is not EPOCHS:MAX_LR");
        try {
            std::size_t used = 0;
            const long epochs = std::stol(item.substr(0, colon), &used);
            if (used != colon || epochs <= 0) throw std::invalid_argument("epochs");
            const std::string lr_text = item.substr(colon + 1);
            const double lr = std::stod(lr_text, &used);
            if (used != lr_text.size() || !(lr >= 0.0)) throw std::invalid_argument("lr");
            cycles.push_back({static_cast<std::size_t>(epochs), lr});
        } catch (const std::logic_error&) {
            throw ContractError("cycle '" + item + "' is not EPOCHS:MAX_LR");
        }
    }
    if (cycles.empty()) throw ContractError("no training cycles given");
    return cycles;
}

std::string format_cycles(const std::vector<Cycle>& cycles) {
    std::ostringstream out;
    for (std::size_t i = 0; i < cycles.size(); ++i) out << (i ? "," : "") << cycles[i].epochs << ':' << cycles[i].max_lr;
    return out.str();
}

void TrainConfig::validate() const {
    if (!(temperature > 0.0)) throw ContractError("temperature must be positive");
    if (cycles.empty()) throw ContractError("at least one training cycle is required");
    for (const auto& c : cycles)
        if (c.epochs == 0) throw ContractError("cycle epochs must be positive");
    if (!(epochs_scale > 0.0)) throw ContractError("epochs scale must be positive");
    if (batch_size != 2 * subjects_per_batch * sequences_per_subject)
        throw ContractError("batch size " + std::to_string(batch_size) + " must equal 2 x P x K = " +
                            std::to_string(2 * subjects_per_batch * sequences_per_subject));
    if (checkpoint_every == 0) throw ContractError("checkpoint cadence must be positive");
}

std::vector<Cycle> TrainConfig::effective_cycles() const {
    std::vector<Cycle> out;
    for (const auto& c : cycles)
        out.push_back({std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                                    static_cast<double>(c.epochs) * epochs_scale))),
                       c.max_lr});
    return out;
}

nlohmann::json HistoryEntry::to_json() const {
    return {{"step", step}, {"epoch", epoch}, {"cycle", cycle}, {"lr", lr}, {"loss", loss}};
}

HistoryEntry HistoryEntry::from_json(const nlohmann::json& doc) {
    return {doc.at("step").get<std::uint64_t>(), doc.at("epoch").get<std::size_t>(), doc.at("cycle").get<std::size_t>(),
            doc.at("lr").get<double>(), doc.at("loss").get<double>()};
}

Trainer::Trainer(const ModelSpec& spec, const SkeletonTopology& topology, TrainConfig config, AugmentConfig augment)
    : config_(std::move(config)),
      augment_(augment),
      topology_(topology),
      model_(spec, build_adjacency(topology, spec.num_partitions), config_.seed),
      data_rng_(config_.seed ^ 0x5deece66dULL) {
    config_.validate();
    augment_.validate();
    for (auto* p : model_.parameters()) adam_.emplace_back(p->tensor.size());
}

double Trainer::train_step(const Batch& batch, double lr) {
    model_.zero_grad();
    const auto embedding = model_.forward(batch.features, ops::Mode::kTrain);
    const auto loss = supcon_loss(embedding, batch.labels, config_.temperature);
    model_.backward(loss.grad);
    auto params = model_.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) adam_step(*params[i], adam_[i], lr, config_.weight_decay);
    ++global_step_;
    return loss.loss;
}

void Trainer::save_optimizer(std::ostream& out, const nlohmann::json& progress) const {
    auto& model = const_cast<ResGcnNet<float>&>(model_);
    const auto params = model.parameters();
    std::vector<TensorRecord> records;
    std::vector<std::span<const float>> arrays;
    std::vector<std::uint64_t> steps;
    for (std::size_t i = 0; i < params.size(); ++i) {
        records.push_back({"m/" + params[i]->name, params[i]->tensor.shape()});
        arrays.emplace_back(adam_[i].m);
        records.push_back({"v/" + params[i]->name, params[i]->tensor.shape()});
        arrays.emplace_back(adam_[i].v);
        steps.push_back(adam_[i].step);
    }
    nlohmann::json header{{"version", 1},
                          {"spec_hash", model_.spec().hash()},
                          {"adam_steps", steps},
                          {"global_step", global_step_},
                          {"data_rng", rng_state(data_rng_)},
                          {"progress", progress}};
    write_tensor_file(out, kOptimizerMagic, std::move(header), records, arrays);
}

nlohmann::json Trainer::load_optimizer(std::istream& in) {
    const auto file = read_tensor_file(in, kOptimizerMagic);
    const auto params = model_.parameters();
    if (file.header.value("spec_hash", std::string()) != model_.spec().hash())
        throw FormatError("optimizer state belongs to a different model spec");
    if (file.records.size() != 2 * params.size()) throw ShapeError("optimizer state has the wrong tensor count");
    const auto steps = file.header.at("adam_steps").get<std::vector<std::uint64_t>>();
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (file.records[2 * i].name != "m/" + params[i]->name || file.records[2 * i].shape != params[i]->tensor.shape())
            throw ShapeError("optimizer state mismatch for '" + params[i]->name + "'");
        adam_[i].m = file.arrays[2 * i];
        adam_[i].v = file.arrays[2 * i + 1];
        adam_[i].step = steps.at(i);
    }
    global_step_ = file.header.at("global_step").get<std::uint64_t>();
    restore_rng_state(data_rng_, file.header.at("data_rng").get<std::string>());
    return file.header.at("progress");
}

std::size_t steps_per_epoch(std::size_t num_sequences, const TrainConfig& config) {
    const std::size_t per_step = config.subjects_per_batch * config.sequences_per_subject;
    return std::max<std::size_t>(1, (num_sequences + per_step - 1) / per_step);
}

namespace {

void write_history(const fs::path& path, const std::vector<HistoryEntry>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    for (const auto& h : history) out << h.to_json().dump() << '\n';
}

std::vector<HistoryEntry> read_history(const fs::path& path, std::uint64_t up_to_step) {
    std::vector<HistoryEntry> history;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto entry = HistoryEntry::from_json(nlohmann::json::parse(line));
        if (entry.step <= up_to_step) history.push_back(entry);
    }
    return history;
}

struct Progress {
    std::size_t cycle = 0;
    std::size_t epoch_in_cycle = 0;
    std::size_t epochs_completed = 0;

    nlohmann::json to_json() const {
        return {{"cycle", cycle}, {"epoch_in_cycle", epoch_in_cycle}, {"epochs_completed", epochs_completed}};
    }
    static Progress from_json(const nlohmann::json& doc) {
        return {doc.at("cycle").get<std::size_t>(), doc.at("epoch_in_cycle").get<std::size_t>(),
                doc.at("epochs_completed").get<std::size_t>()};
    }
};

std::string checkpoint_stem(std::size_t epochs_completed) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "epoch_%04zu", epochs_completed);
    return buf;
}

}  // namespace

FitResult fit(Trainer& trainer, const std::vector<PoseSequence>& train_sequences, const FitOptions& options) {
    if (train_sequences.empty()) throw ContractError("training set is empty");
    const auto& config = trainer.config();
    const SubjectPool pool(train_sequences);
    const std::size_t spe = steps_per_epoch(pool.num_sequences(), config);
    const auto cycles = config.effective_cycles();
    auto log = [&](const std::string& msg) {
        if (options.log) options.log(msg);
    };

    FitResult result;
    Progress progress;
    fs::path ckpt_dir;
    if (options.out_dir) {
        ckpt_dir = *options.out_dir / "checkpoints";
        fs::create_directories(ckpt_dir);
    }

    if (options.resume && options.out_dir && fs::exists(ckpt_dir / "latest.json")) {
        std::ifstream latest_in(ckpt_dir / "latest.json");
        const auto latest = nlohmann::json::parse(latest_in);
        std::ifstream w(ckpt_dir / latest.at("weights").get<std::string>(), std::ios::binary);
        load_weights_into(w, trainer.model());
        std::ifstream o(ckpt_dir / latest.at("optimizer").get<std::string>(), std::ios::binary);
        progress = Progress::from_json(trainer.load_optimizer(o));
        result.history = read_history(*options.out_dir / "history.jsonl", trainer.global_step());
        result.epochs_completed = progress.epochs_completed;
        log("resumed at epoch " + std::to_string(progress.epochs_completed) + ", step " +
            std::to_string(trainer.global_step()));
    }

    auto checkpoint = [&] {
        if (!options.out_dir) return;
        const auto stem = checkpoint_stem(progress.epochs_completed);
        {
            std::ofstream w(ckpt_dir / (stem + ".ggw"), std::ios::binary | std::ios::trunc);
            save_weights(trainer.model(), w);
            std::ofstream o(ckpt_dir / (stem + ".ggo"), std::ios::binary | std::ios::trunc);
            trainer.save_optimizer(o, progress.to_json());
        }
        std::ofstream latest(ckpt_dir / "latest.json", std::ios::trunc);
        latest << nlohmann::json{{"weights", stem + ".ggw"}, {"optimizer", stem + ".ggo"}}.dump() << '\n';
        write_history(*options.out_dir / "history.jsonl", result.history);
        ++result.checkpoints_written;
    };

    while (progress.cycle < cycles.size()) {
        const auto& cycle = cycles[progress.cycle];
        OneCycleSchedule schedule;
        schedule.max_lr = cycle.max_lr;
        schedule.total_steps = cycle.epochs * spe;
        schedule.pct_up = config.pct_up;
        schedule.div_factor = config.div_factor;
        schedule.final_div_factor = config.final_div_factor;

        while (progress.epoch_in_cycle < cycle.epochs) {
            double epoch_loss = 0.0;
            for (std::size_t s = 0; s < spe; ++s) {
                const double lr = onecycle_lr(schedule, progress.epoch_in_cycle * spe + s);
                const auto batch = sample_batch(pool, config.subjects_per_batch, config.sequences_per_subject,
                                                trainer.augment_config(), trainer.topology(), trainer.data_rng());
                const double loss = trainer.train_step(batch, lr);
                epoch_loss += loss;
                result.history.push_back({trainer.global_step(), progress.epochs_completed, progress.cycle, lr, loss});
            }
            ++progress.epoch_in_cycle;
            ++progress.epochs_completed;
            result.epochs_completed = progress.epochs_completed;
            log("cycle " + std::to_string(progress.cycle + 1) + " epoch " + std::to_string(progress.epoch_in_cycle) +
                "/" + std::to_string(cycle.epochs) + " mean loss " + std::to_string(epoch_loss / static_cast<double>(spe)));

            const bool cycle_done = progress.epoch_in_cycle == cycle.epochs;
            if (cycle_done) {
                ++progress.cycle;
                progress.epoch_in_cycle = 0;
            }
            if (cycle_done || progress.epochs_completed % config.checkpoint_every == 0) checkpoint();
            if (options.stop_after_epochs && progress.epochs_completed >= *options.stop_after_epochs &&
                progress.cycle < cycles.size())
                return result;
            if (cycle_done) break;
        }
    }

    if (options.out_dir) {
        save_weights_file(trainer.model(), (*options.out_dir / "weights.ggw").string());
        write_history(*options.out_dir / "history.jsonl", result.history);
    }
    result.finished = true;
    return result;
}

}  // namespace gaitgraph
