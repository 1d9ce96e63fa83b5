#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gaitgraph/synthetic.hpp"
#include "gaitgraph/weights_io.hpp"
#include "test_util.hpp"

using namespace gaitgraph;

namespace {

struct RunResult {
    int status = -1;
    std::string output;  // stdout followed by stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(GAITGRAPH_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string small_weights(const TempDir& dir, std::size_t divisor) {
    const auto topo = build_coco17_topology();
    ResGcnNet<float> net(ModelSpec::resgcn_n39_r8().with_channel_divisor(divisor), build_adjacency(topo, 3), 1);
    const auto path = (dir.path / ("w" + std::to_string(divisor) + ".ggw")).string();
    save_weights_file(net, path);
    return path;
}

std::string write_sequence(const TempDir& dir, std::size_t joints) {
    SyntheticConfig cfg;
    cfg.min_frames = 30;
    cfg.max_frames = 30;
    auto seq = synthesize_sequence(cfg, {1, Condition::kNM, 1, 90});
    if (joints != seq.joints) {
        PoseSequence cut(seq.frames, joints);
        for (std::size_t t = 0; t < seq.frames; ++t)
            for (std::size_t n = 0; n < joints; ++n)
                for (std::size_t c = 0; c < 3; ++c) cut.at(t, n, c) = seq.at(t, n, c);
        seq = cut;
    }
    const auto path = (dir.path / ("seq" + std::to_string(joints) + ".csv")).string();
    write_pose_csv_file(path, seq);
    return path;
}

}  // namespace

TEST_CASE("cli print-config shows the defaults") {
    const auto r = run_cli("train --print-config");
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.output);
    CHECK(doc.at("train.temperature") == 0.01);
    CHECK(doc.at("train.batch_size") == 128);
    CHECK(doc.at("train.cycles") == "300:0.01,100:1e-05");
    CHECK(doc.at("augment.window") == 60);
}

TEST_CASE("cli inspect traces the temporal axis") {
    const auto r = run_cli("inspect --frames 20");
    REQUIRE(r.status == 0);
    CHECK(r.output.find("20 x 17 x 64") != std::string::npos);
    CHECK(r.output.find("10 x 17 x 128") != std::string::npos);
    CHECK(r.output.find("5 x 17 x 256") != std::string::npos);
    CHECK(r.output.find("1 x 128") != std::string::npos);
}

TEST_CASE("cli embed") {
    TempDir dir("cli_embed");
    const auto weights = small_weights(dir, 8);
    const auto good = write_sequence(dir, 17);
    const auto first = run_cli("embed --weights " + weights + " " + good);
    REQUIRE(first.status == 0);
    const auto values = nlohmann::json::parse(first.output).get<std::vector<double>>();
    REQUIRE(values.size() == 128);
    double sq = 0.0;
    for (double v : values) sq += v * v;
    CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-5);
    CHECK(run_cli("embed --weights " + weights + " " + good).output == first.output);

    const auto bad = run_cli("embed --weights " + weights + " " + write_sequence(dir, 16));
    CHECK(bad.status != 0);
    CHECK(bad.output.find("expected 17 joints") != std::string::npos);
}

TEST_CASE("cli evaluate rejects a mismatched spec") {
    TempDir dir("cli_eval");
    const auto weights = small_weights(dir, 8);
    const auto r = run_cli("evaluate --weights " + weights + " --channel-divisor 4 --corpus " + dir.path.string());
    CHECK(r.status != 0);
    const auto expected = ModelSpec::resgcn_n39_r8().with_channel_divisor(4).hash();
    const auto found = ModelSpec::resgcn_n39_r8().with_channel_divisor(8).hash();
    CHECK(r.output.find("expected " + expected + ", found " + found) != std::string::npos);
}

TEST_CASE("cli prepare") {
    TempDir empty("cli_empty");
    const auto none = run_cli("prepare --corpus " + empty.path.string() + " --out " + (empty.path / "o").string());
    CHECK(none.status != 0);
    CHECK(none.output.find("sequences: 0") != std::string::npos);

    TempDir dir("cli_prepare");
    SyntheticConfig cfg;
    cfg.subjects = 2;
    cfg.min_frames = 12;
    cfg.max_frames = 12;
    write_corpus(dir.path / "corpus", synthesize_corpus(cfg));
    std::ofstream(dir.path / "corpus" / "002-bg-01-036.csv") << "not,a,pose\n";
    const auto r = run_cli("prepare --corpus " + (dir.path / "corpus").string() + " --out " + (dir.path / "o").string());
    CHECK(r.status == 0);
    CHECK(r.output.find("sequences: 220") != std::string::npos);
    CHECK(r.output.find("002-bg-01-036") != std::string::npos);
}
