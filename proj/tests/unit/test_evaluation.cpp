#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gaitgraph/error.hpp"
#include "gaitgraph/evaluation.hpp"
#include "gaitgraph/synthetic.hpp"

using namespace gaitgraph;

namespace {

std::vector<float> unit(std::vector<float> v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    for (auto& x : v) x = static_cast<float>(x / std::sqrt(sq));
    return v;
}

// Subject s sits on axis s; small per-view offsets keep entries distinct.
EmbeddingGallery clustered(const std::vector<int>& subjects, const std::vector<int>& views, Condition c,
                           int seq_index, float wobble) {
    EmbeddingGallery g;
    for (int s : subjects)
        for (int v : views) {
            std::vector<float> f(8, 0.0f);
            f[static_cast<std::size_t>(s)] = 1.0f;
            f[7] = wobble * static_cast<float>(v % 7);
            g.entries.push_back({{s, c, seq_index, v}, unit(f)});
        }
    return g;
}

}  // namespace

TEST_CASE("rank-1 with separated clusters is perfect") {
    const auto gallery = clustered({1, 2, 3}, {0, 90, 180}, Condition::kNM, 1, 0.05f);
    const auto probes = clustered({1, 2, 3}, {0, 90, 180}, Condition::kBG, 1, 0.1f);
    const auto table = rank1_cross_view(gallery, probes);
    REQUIRE(table.views == std::vector<int>{0, 90, 180});
    for (double a : table.accuracy) CHECK(a == 100.0);
    CHECK(table.mean == 100.0);

    const auto single = rank1_cross_view(clustered({2}, {0, 18}, Condition::kNM, 1, 0.0f),
                                         clustered({2}, {0, 18}, Condition::kNM, 5, 0.0f));
    CHECK(single.mean == 100.0);
}

TEST_CASE("rank-1 excludes same-view matches") {
    // The probe's same-view twin belongs to another subject.
    EmbeddingGallery gallery, probes;
    gallery.entries.push_back({{1, Condition::kNM, 1, 0}, unit({1, 0, 0})});
    gallery.entries.push_back({{2, Condition::kNM, 1, 0}, unit({0, 1, 0})});
    gallery.entries.push_back({{1, Condition::kNM, 1, 90}, unit({0, 1, 0.2f})});
    gallery.entries.push_back({{2, Condition::kNM, 1, 90}, unit({0, 0, 1})});
    probes.entries.push_back({{1, Condition::kNM, 5, 0}, unit({0, 1, 0})});
    const auto table = rank1_cross_view(gallery, probes);
    REQUIRE(table.views == std::vector<int>{0});
    CHECK(table.accuracy[0] == 100.0);
}

TEST_CASE("rank-1 invariances and errors") {
    auto gallery = clustered({1, 2, 3, 4}, {0, 54, 90}, Condition::kNM, 1, 0.3f);
    auto probes = clustered({1, 2, 3, 4}, {0, 54, 90}, Condition::kCL, 1, 0.6f);
    const auto base = rank1_cross_view(gallery, probes);

    auto reordered = gallery;
    std::reverse(reordered.entries.begin(), reordered.entries.end());
    CHECK(rank1_cross_view(reordered, probes).accuracy == base.accuracy);

    auto relabelled_g = gallery, relabelled_p = probes;
    for (auto& e : relabelled_g.entries) e.key.subject += 100;
    for (auto& e : relabelled_p.entries) e.key.subject += 100;
    CHECK(rank1_cross_view(relabelled_g, relabelled_p).accuracy == base.accuracy);

    EmbeddingGallery missing = gallery;
    std::erase_if(missing.entries, [](const EmbeddingEntry& e) { return e.key.view == 54; });
    try {
        rank1_cross_view(missing, probes);
        FAIL("expected a protocol error");
    } catch (const ProtocolError& e) {
        CHECK(std::string(e.what()).find("54") != std::string::npos);
    }
    CHECK_THROWS_AS(rank1_cross_view(clustered({1}, {0}, Condition::kNM, 1, 0), clustered({1}, {0}, Condition::kNM, 5, 0)),
                    ProtocolError);
}

TEST_CASE("palindromic sequence embeds like a single pass") {
    const auto topo = build_coco17_topology();
    ResGcnNet<float> net(ModelSpec::resgcn_n39_r8().with_channel_divisor(8), build_adjacency(topo, 3), 7);
    SyntheticConfig cfg;
    cfg.min_frames = 10;
    cfg.max_frames = 10;
    auto seq = normalize_coords(synthesize_sequence(cfg, {1, Condition::kNM, 1, 90}));
    PoseSequence pal(20, 17);
    for (std::size_t t = 0; t < 10; ++t)
        for (std::size_t i = 0; i < 17 * 3; ++i) {
            pal.values[t * 51 + i] = seq.values[t * 51 + i];
            pal.values[(19 - t) * 51 + i] = seq.values[t * 51 + i];
        }
    CHECK(reverse_time(pal) == pal);
    const auto feature = embed_sequence(net, pal);
    const auto direct = net.forward(stack_sequences({pal}), ops::Mode::kEval);
    for (std::size_t d = 0; d < feature.size(); ++d) CHECK(feature[d] == doctest::Approx(direct.at(0, d)).epsilon(1e-6));

    CHECK(embed_sequence(net, pal) == feature);
}

TEST_CASE("protocol evaluation on a tiny corpus") {
    const auto topo = build_coco17_topology();
    ResGcnNet<float> net(ModelSpec::resgcn_n39_r8().with_channel_divisor(8), build_adjacency(topo, 3), 7);
    SyntheticConfig cfg;
    cfg.subjects = 2;
    cfg.min_frames = 20;
    cfg.max_frames = 24;
    std::vector<PoseSequence> test;
    for (auto& s : synthesize_corpus(cfg))
        if (s.key.condition != Condition::kCL && (s.key.view == 0 || s.key.view == 90 || s.key.view == 180))
            test.push_back(normalize_coords(s));
    EvalOptions opts;
    opts.window = 16;
    const auto sorted = evaluate_protocol(net, test, opts);
    REQUIRE(sorted.tables.size() == 2);
    CHECK(sorted.tables[0].condition == "NM");
    CHECK(sorted.tables[1].condition == "BG");
    REQUIRE(sorted.warnings.size() == 1);
    CHECK(sorted.warnings[0].find("CL") != std::string::npos);
    CHECK(sorted.gallery.entries.size() == 2 * 4 * 3);
    CHECK_NOTHROW(sorted.gallery.validate());

    const auto again = evaluate_protocol(net, test, opts);
    CHECK(again.to_json() == sorted.to_json());

    opts.mode = OrderMode::kShuffle;
    const auto shuffled = evaluate_protocol(net, test, opts);
    CHECK(shuffled.mode == OrderMode::kShuffle);
    CHECK(shuffled.gallery.entries[0].feature != sorted.gallery.entries[0].feature);
    opts.probes_only = true;
    const auto probes_only = evaluate_protocol(net, test, opts);
    CHECK(probes_only.gallery.entries[0].feature == sorted.gallery.entries[0].feature);

    const auto text = format_tables(sorted);
    CHECK(text.find("NM") != std::string::npos);
    CHECK(text.find("180") != std::string::npos);

    std::ostringstream csv;
    write_distance_csv(csv, sorted.gallery, sorted.probes.at(Condition::kNM));
    CHECK(csv.str().rfind("probe,gallery,distance\n", 0) == 0);
}
