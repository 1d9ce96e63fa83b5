#include <doctest.h>

#include <fstream>

#include "gaitgraph/error.hpp"
#include "gaitgraph/run_config.hpp"
#include "test_util.hpp"

using namespace gaitgraph;

TEST_CASE("run config defaults") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.train.temperature == 0.01);
    CHECK(cfg.train.batch_size == 128);
    CHECK(cfg.train.weight_decay == 1e-5);
    CHECK(cfg.augment.window == 60);
    CHECK(cfg.model_spec() == ModelSpec::resgcn_n39_r8());
}

TEST_CASE("run config apply and serialize") {
    RunConfig cfg;
    cfg.apply({{"seed", 7},
               {"model.channel_divisor", 4},
               {"train.cycles", "5:0.01"},
               {"eval.mode", "shuffle"},
               {"augment.window", 40}});
    CHECK(cfg.seed == 7);
    CHECK(cfg.train_config().seed == 7);
    CHECK(cfg.eval_options().seed == 7);
    CHECK(cfg.eval_options().mode == OrderMode::kShuffle);
    CHECK(cfg.train.cycles == std::vector<Cycle>{{5, 0.01}});
    CHECK(cfg.model_spec() == ModelSpec::resgcn_n39_r8().with_channel_divisor(4));

    RunConfig copy;
    copy.apply(cfg.to_json());
    CHECK(copy.to_json() == cfg.to_json());

    cfg.apply({{"train.subjects_per_batch", 6}, {"train.sequences_per_subject", 4}});
    CHECK(cfg.train.batch_size == 48);
    cfg.apply({{"train.subjects_per_batch", 3}, {"train.batch_size", 12}});
    CHECK(cfg.train.batch_size == 12);

    CHECK_THROWS_AS(cfg.apply({{"train.tempreature", 0.1}}), ContractError);
    CHECK_THROWS_AS(cfg.apply({{"seed", "seven"}}), ContractError);
    CHECK_THROWS_AS(cfg.apply({{"eval.mode", "random"}}), ContractError);

    RunConfig bad;
    bad.apply({{"model.partitions", 2}});
    CHECK_THROWS(bad.validate());
}

TEST_CASE("run config files") {
    TempDir dir("config");
    const auto path = (dir.path / "run.json").string();
    std::ofstream(path) << R"({"corpus": "data", "train.temperature": 0.05})";
    const auto cfg = load_run_config(path);
    CHECK(cfg.corpus == "data");
    CHECK(cfg.train.temperature == 0.05);
    std::ofstream(path) << "{broken";
    CHECK_THROWS(load_run_config(path));
    CHECK_THROWS(load_run_config((dir.path / "missing.json").string()));
}
