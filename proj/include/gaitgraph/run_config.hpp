#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "gaitgraph/augmentation.hpp"
#include "gaitgraph/evaluation.hpp"
#include "gaitgraph/model.hpp"
#include "gaitgraph/training.hpp"

namespace gaitgraph {

// Everything a run depends on. Serialized as one flat JSON object with dotted
// keys ("train.temperature", "augment.window", ...).
struct RunConfig {
    std::string corpus;
    std::string out = "run";
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t channel_divisor = 1;
    std::size_t partitions = 3;
    TrainConfig train;
    AugmentConfig augment;
    EvalOptions eval;

    // Later keys win. Unknown keys and ill-typed values raise ContractError.
    // Setting P or K without train.batch_size re-derives the batch as 2 P K.
    void apply(const nlohmann::json& flat);
    nlohmann::json to_json() const;
    void validate() const;

    ModelSpec model_spec() const;
    TrainConfig train_config() const;  // with the run seed
    EvalOptions eval_options() const;  // with the run seed
};

RunConfig load_run_config(const std::string& path);

}  // namespace gaitgraph
