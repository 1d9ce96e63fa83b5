#include "gaitgraph/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

namespace {

template <typename V>
V as(const nlohmann::json& value, const std::string& key) {
    try {
        if constexpr (std::is_same_v<V, std::size_t> || std::is_same_v<V, std::uint64_t>) {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0))
                throw ContractError("");
        }
        return value.get<V>();
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "' has an invalid value: " + value.dump());
    }
}

using Setter = std::function<void(RunConfig&, const nlohmann::json&, const std::string&)>;

template <typename V>
Setter set(V RunConfig::*field) {
    return [field](RunConfig& c, const nlohmann::json& v, const std::string& k) { c.*field = as<V>(v, k); };
}

template <typename Sub, typename V>
Setter set(Sub RunConfig::*sub, V Sub::*field) {
    return [sub, field](RunConfig& c, const nlohmann::json& v, const std::string& k) { c.*sub.*field = as<V>(v, k); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"corpus", set(&RunConfig::corpus)},
        {"out", set(&RunConfig::out)},
        {"seed", set(&RunConfig::seed)},
        {"threads", set(&RunConfig::threads)},
        {"model.channel_divisor", set(&RunConfig::channel_divisor)},
        {"model.partitions", set(&RunConfig::partitions)},
        {"train.temperature", set(&RunConfig::train, &TrainConfig::temperature)},
        {"train.batch_size", set(&RunConfig::train, &TrainConfig::batch_size)},
        {"train.cycles",
         [](RunConfig& c, const nlohmann::json& v, const std::string& k) {
             c.train.cycles = parse_cycles(as<std::string>(v, k));
         }},
        {"train.weight_decay", set(&RunConfig::train, &TrainConfig::weight_decay)},
        {"train.epochs_scale", set(&RunConfig::train, &TrainConfig::epochs_scale)},
        {"train.subjects_per_batch", set(&RunConfig::train, &TrainConfig::subjects_per_batch)},
        {"train.sequences_per_subject", set(&RunConfig::train, &TrainConfig::sequences_per_subject)},
        {"train.checkpoint_every", set(&RunConfig::train, &TrainConfig::checkpoint_every)},
        {"train.min_frames", set(&RunConfig::train, &TrainConfig::min_frames)},
        {"train.pct_up", set(&RunConfig::train, &TrainConfig::pct_up)},
        {"train.div_factor", set(&RunConfig::train, &TrainConfig::div_factor)},
        {"train.final_div_factor", set(&RunConfig::train, &TrainConfig::final_div_factor)},
        {"augment.p_reverse", set(&RunConfig::augment, &AugmentConfig::p_reverse)},
        {"augment.p_mirror", set(&RunConfig::augment, &AugmentConfig::p_mirror)},
        {"augment.sigma_frame", set(&RunConfig::augment, &AugmentConfig::sigma_frame)},
        {"augment.sigma_sequence", set(&RunConfig::augment, &AugmentConfig::sigma_sequence)},
        {"augment.window", set(&RunConfig::augment, &AugmentConfig::window)},
        {"augment.noise_on_confidence", set(&RunConfig::augment, &AugmentConfig::noise_on_confidence)},
        {"eval.mode",
         [](RunConfig& c, const nlohmann::json& v, const std::string& k) {
             const auto text = as<std::string>(v, k);
             if (text == "sort") c.eval.mode = OrderMode::kSort;
             else if (text == "shuffle") c.eval.mode = OrderMode::kShuffle;
             else throw ContractError("config key 'eval.mode' must be sort or shuffle, got '" + text + "'");
         }},
        {"eval.probes_only", set(&RunConfig::eval, &EvalOptions::probes_only)},
        {"eval.window", set(&RunConfig::eval, &EvalOptions::window)},
        {"eval.batch_size", set(&RunConfig::eval, &EvalOptions::batch_size)},
    };
    return table;
}

}  // namespace

void RunConfig::apply(const nlohmann::json& flat) {
    if (!flat.is_object()) throw ContractError("config must be a JSON object with dotted keys");
    for (const auto& [key, value] : flat.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) throw ContractError("unknown config key '" + key + "'");
        it->second(*this, value, key);
    }
    const bool sampler_changed = flat.contains("train.subjects_per_batch") || flat.contains("train.sequences_per_subject");
    if (sampler_changed && !flat.contains("train.batch_size"))
        train.batch_size = 2 * train.subjects_per_batch * train.sequences_per_subject;
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"corpus", corpus},
        {"out", out},
        {"seed", seed},
        {"threads", threads},
        {"model.channel_divisor", channel_divisor},
        {"model.partitions", partitions},
        {"train.temperature", train.temperature},
        {"train.batch_size", train.batch_size},
        {"train.cycles", format_cycles(train.cycles)},
        {"train.weight_decay", train.weight_decay},
        {"train.epochs_scale", train.epochs_scale},
        {"train.subjects_per_batch", train.subjects_per_batch},
        {"train.sequences_per_subject", train.sequences_per_subject},
        {"train.checkpoint_every", train.checkpoint_every},
        {"train.min_frames", train.min_frames},
        {"train.pct_up", train.pct_up},
        {"train.div_factor", train.div_factor},
        {"train.final_div_factor", train.final_div_factor},
        {"augment.p_reverse", augment.p_reverse},
        {"augment.p_mirror", augment.p_mirror},
        {"augment.sigma_frame", augment.sigma_frame},
        {"augment.sigma_sequence", augment.sigma_sequence},
        {"augment.window", augment.window},
        {"augment.noise_on_confidence", augment.noise_on_confidence},
        {"eval.mode", to_string(eval.mode)},
        {"eval.probes_only", eval.probes_only},
        {"eval.window", eval.window},
        {"eval.batch_size", eval.batch_size},
    };
}

void RunConfig::validate() const {
    if (threads == 0) throw ContractError("threads must be at least 1");
    if (channel_divisor == 0) throw ContractError("model.channel_divisor must be positive");
    if (partitions != 1 && partitions != 3) throw ContractError("model.partitions must be 1 or 3");
    if (eval.window < 4) throw ContractError("eval.window must be at least 4");
    if (eval.batch_size == 0) throw ContractError("eval.batch_size must be positive");
    model_spec().validate();
    train_config().validate();
    augment.validate();
}

ModelSpec RunConfig::model_spec() const {
    auto spec = ModelSpec::resgcn_n39_r8().with_channel_divisor(channel_divisor);
    spec.num_partitions = partitions;
    return spec;
}

TrainConfig RunConfig::train_config() const {
    auto t = train;
    t.seed = seed;
    return t;
}

EvalOptions RunConfig::eval_options() const {
    auto e = eval;
    e.seed = seed;
    return e;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractError("config file " + path + " is not valid JSON: " + e.what());
    }
    RunConfig config;
    config.apply(doc);
    return config;
}

}  // namespace gaitgraph
