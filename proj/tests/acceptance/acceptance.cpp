// Acceptance suite: one PASS/FAIL line per criterion.
//
//   gaitgraph_acceptance --cli PATH [--work DIR] [--only 1,2,...]
//
// Criteria 6, 7 and 9 drive the command-line tool end to end; the rest call
// the library directly against independent oracles.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/augmentation.hpp"
#include "gaitgraph/evaluation.hpp"
#include "gaitgraph/gradcheck.hpp"
#include "gaitgraph/model.hpp"
#include "gaitgraph/ops.hpp"
#include "gaitgraph/skeleton_graph.hpp"
#include "gaitgraph/supcon.hpp"
#include "gaitgraph/synthetic.hpp"
#include "gaitgraph/weights_io.hpp"

namespace fs = std::filesystem;
using namespace gaitgraph;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    std::string cli;
    fs::path work;
};

std::string fmt(const char* pattern, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, value);
    return buf;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the CLI with stdout/stderr captured to files under the work dir.
int run_cli(const Context& ctx, const std::string& args, const std::string& tag) {
    const auto out = ctx.work / (tag + ".stdout");
    const auto err = ctx.work / (tag + ".stderr");
    const std::string cmd = "\"" + ctx.cli + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) std::cerr << "command failed (" << rc << "): " << cmd << '\n' << slurp(err);
    return rc;
}

// ---------------------------------------------------------------------------
// 1. Architecture conformance

Outcome criterion_architecture(const Context& ctx) {
    // Reference output dimensions of the default plan, top to bottom.
    const std::vector<Shape> expected = {{60, 17, 3},  {60, 17, 64},  {60, 17, 64},  {60, 17, 32}, {30, 17, 128},
                                         {30, 17, 128}, {15, 17, 256}, {15, 17, 256}, {1, 256},     {1, 128}};
    const std::vector<std::string> modules = {"BatchNorm",  "Basic",      "Bottleneck", "Bottleneck", "Bottleneck",
                                              "Bottleneck", "Bottleneck", "Bottleneck", "AvgPool2D",  "FCN"};
    const auto rows = shape_trace(ModelSpec::resgcn_n39_r8(), {60, 17, 3});
    if (rows.size() != expected.size()) return {false, "trace has " + std::to_string(rows.size()) + " rows"};
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].shape != expected[i] || rows[i].module != modules[i])
            return {false, "row " + std::to_string(i) + " is " + rows[i].module + " " + shape_string(rows[i].shape)};

    if (run_cli(ctx, "inspect", "inspect") != 0) return {false, "inspect exited nonzero"};
    const std::string text = slurp(ctx.work / "inspect.stdout");
    const std::vector<std::string> lines = {"60 x 17 x 3",   "60 x 17 x 64",  "60 x 17 x 64",  "60 x 17 x 32",
                                            "30 x 17 x 128", "30 x 17 x 128", "15 x 17 x 256", "15 x 17 x 256",
                                            "1 x 256",       "1 x 128"};
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!std::getline(in, line)) return {false, "inspect output ends early"};
        if (line.find(modules[i]) == std::string::npos || line.size() < lines[i].size() ||
            line.compare(line.size() - lines[i].size(), lines[i].size(), lines[i]) != 0)
            return {false, "inspect row " + std::to_string(i) + " reads '" + line + "'"};
    }
    return {true, "10 rows match (library trace and CLI inspect)"};
}

// ---------------------------------------------------------------------------
// 2. Gradient correctness

Outcome criterion_gradients(const Context&) {
    const auto reports = run_gradcheck_suite(0);
    const std::set<std::string> required = {"linear_map",       "temporal_conv/s1",    "temporal_conv/s2",
                                            "graph_conv",       "batch_norm",          "global_avg_pool",
                                            "relu",             "l2_normalize",        "supcon_loss",
                                            "basic_block",      "bottleneck_block",    "bottleneck_block/s2",
                                            "model"};
    std::set<std::string> seen;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& r : reports) {
        seen.insert(r.fragment);
        if (r.max_relative_error() >= worst) {
            worst = r.max_relative_error();
            worst_name = r.fragment;
        }
    }
    for (const auto& name : required)
        if (!seen.count(name)) return {false, "fragment " + name + " missing"};
    return {worst < 1e-4, std::to_string(reports.size()) + " fragments, max relative error " + fmt("%.2e", worst) +
                              " (" + worst_name + ")"};
}

// ---------------------------------------------------------------------------
// 3. Adjacency oracle

// Literal D^{-1/2} (A + I) D^{-1/2} as two dense matrix products.
Matrix adjacency_oracle(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix m(n, n), d(n, n), left(n, n), out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j) + (i == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += m(i, j);
        d(i, i) = 1.0 / std::sqrt(deg);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) left(i, j) += d(i, k) * m(k, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) out(i, j) += left(i, k) * d(k, j);
    return out;
}

Matrix graph_from_bits(std::size_t n, std::uint64_t bits) {
    Matrix a(n, n);
    std::size_t b = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++b)
            if (bits >> b & 1U) a(i, j) = a(j, i) = 1.0;
    return a;
}

Outcome criterion_adjacency(const Context&) {
    std::size_t graphs = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t pairs = n * (n - 1) / 2;
        for (std::uint64_t bits = 0; bits < (1ULL << pairs); ++bits, ++graphs) {
            const auto a = graph_from_bits(n, bits);
            if (!(normalize_adjacency(a) == adjacency_oracle(a)))
                return {false, "mismatch for N=" + std::to_string(n) + " graph " + std::to_string(bits)};
        }
    }
    const std::size_t exhaustive = graphs;
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial, ++graphs) {
        const std::size_t n = 5 + (trial % 2);
        const auto a = graph_from_bits(n, rng() & ((1ULL << (n * (n - 1) / 2)) - 1));
        if (!(normalize_adjacency(a) == adjacency_oracle(a)))
            return {false, "mismatch for random N=" + std::to_string(n) + " graph, trial " + std::to_string(trial)};
    }

    const auto topo = build_coco17_topology();
    const auto adj = build_adjacency(topo, 3);
    const auto a = topo.adjacency();
    for (std::size_t i = 0; i < topo.num_joints; ++i)
        for (std::size_t j = 0; j < topo.num_joints; ++j) {
            double sum = 0.0;
            for (const auto& m : adj.masks) sum += m(i, j);
            if (sum != a(i, j) + (i == j ? 1.0 : 0.0)) return {false, "COCO-17 mask sum differs from A+I"};
        }
    return {true, std::to_string(exhaustive) + " exhaustive + 100 random graphs exact; COCO-17 masks sum to A+I"};
}

// ---------------------------------------------------------------------------
// 4. Loss oracle

// Direct double summation without any stabilization.
double supcon_oracle(const std::vector<std::vector<double>>& z, const std::vector<std::int64_t>& labels, double tau) {
    const std::size_t b = z.size();
    auto dot = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t k = 0; k < z[i].size(); ++k) s += z[i][k] * z[j][k];
        return s;
    };
    double total = 0.0;
    std::size_t anchors = 0;
    for (std::size_t i = 0; i < b; ++i) {
        double denom = 0.0;
        for (std::size_t a = 0; a < b; ++a)
            if (a != i) denom += std::exp(dot(i, a) / tau);
        double term = 0.0;
        std::size_t positives = 0;
        for (std::size_t p = 0; p < b; ++p)
            if (p != i && labels[p] == labels[i]) {
                term += std::log(std::exp(dot(i, p) / tau) / denom);
                ++positives;
            }
        if (positives == 0) continue;
        total += -term / static_cast<double>(positives);
        ++anchors;
    }
    return anchors ? total / static_cast<double>(anchors) : 0.0;
}

double supcon_gradient_error(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t b = 4 + uniform_index(rng, 6);
    auto z = ops::l2_normalize_rows(random_like({b, 6}, seed + 100));
    std::vector<std::int64_t> labels(b);
    for (auto& l : labels) l = static_cast<std::int64_t>(uniform_index(rng, 3));
    SupConResult<double> last;
    GradFragment f{"supcon", {{"z", &z}}, {}, {}, {}};
    f.evaluate = [&] {
        last = supcon_loss(z, labels, 0.1);
        return last.loss;
    };
    f.backward = [&] {
        z.ensure_grad();
        std::copy(last.grad.values().begin(), last.grad.values().end(), z.grad().begin());
    };
    return grad_check(f).max_relative_error();
}

Outcome criterion_loss(const Context&) {
    Rng rng(77);
    const double taus[] = {0.01, 0.1, 0.5, 1.0};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t b = 2 + uniform_index(rng, 15);
        const std::size_t d = 2 + uniform_index(rng, 15);
        const std::size_t classes = 1 + uniform_index(rng, 4);
        std::vector<std::vector<double>> z(b, std::vector<double>(d));
        std::vector<std::int64_t> labels(b);
        Tensor<double> features({b, d});
        for (std::size_t i = 0; i < b; ++i) {
            double norm = 0.0;
            for (auto& v : z[i]) {
                v = normal(rng);
                norm += v * v;
            }
            for (std::size_t k = 0; k < d; ++k) features.at(i, k) = z[i][k] /= std::sqrt(norm);
            labels[i] = static_cast<std::int64_t>(uniform_index(rng, classes));
        }
        const double tau = taus[trial % 4];
        const double got = supcon_loss(features, labels, tau, false).loss;
        worst = std::max(worst, std::abs(got - supcon_oracle(z, labels, tau)));
    }
    if (worst > 1e-6) return {false, "max deviation from oracle " + fmt("%.3e", worst)};

    Tensor<double> pair({2, 3}, std::vector<double>{0.6, 0.8, 0.0, 0.0, 0.0, 1.0});
    const std::vector<std::int64_t> same{5, 5};
    const double pair_loss = supcon_loss(pair, same, 0.01, false).loss;
    if (pair_loss != 0.0) return {false, "same-label pair loss " + fmt("%.3e", pair_loss)};

    double grad_err = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) grad_err = std::max(grad_err, supcon_gradient_error(seed));
    if (grad_err >= 1e-4) return {false, "gradient check " + fmt("%.3e", grad_err)};
    return {true, "100 batches within " + fmt("%.1e", worst) + " of oracle; pair loss exactly 0; gradient error " +
                      fmt("%.1e", grad_err)};
}

// ---------------------------------------------------------------------------
// 5. Retrieval oracle

double rank1_oracle_cell(const EmbeddingGallery& gallery, const EmbeddingGallery& probes, int probe_view,
                         const std::vector<int>& views) {
    double sum = 0.0;
    int used = 0;
    for (int gv : views) {
        if (gv == probe_view) continue;
        int correct = 0, total = 0;
        for (const auto& p : probes.entries) {
            if (p.key.view != probe_view) continue;
            ++total;
            std::size_t best = gallery.entries.size();
            double best_d = 0.0;
            for (std::size_t g = 0; g < gallery.entries.size(); ++g) {
                if (gallery.entries[g].key.view != gv) continue;
                double d = 0.0;
                for (std::size_t k = 0; k < p.feature.size(); ++k) {
                    const double diff = static_cast<double>(p.feature[k]) - gallery.entries[g].feature[k];
                    d += diff * diff;
                }
                if (best == gallery.entries.size() || d < best_d) {
                    best = g;
                    best_d = d;
                }
            }
            if (gallery.entries[best].key.subject == p.key.subject) ++correct;
        }
        sum += 100.0 * correct / total;
        ++used;
    }
    return sum / used;
}

Outcome criterion_retrieval(const Context&) {
    int instances = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed, ++instances) {
        Rng rng(seed);
        const int subjects = 1 + static_cast<int>(uniform_index(rng, 10));
        const int num_views = 2 + static_cast<int>(uniform_index(rng, 4));
        std::vector<int> views;
        for (int v = 0; v < num_views; ++v) views.push_back(v * 18);
        const std::size_t dim = 4;
        std::vector<std::vector<float>> centers(subjects, std::vector<float>(dim));
        for (auto& c : centers)
            for (auto& v : c) v = static_cast<float>(normal(rng));
        auto sample = [&](int s, double spread) {
            std::vector<float> f(dim);
            double norm = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                f[k] = centers[s][k] + static_cast<float>(spread * normal(rng));
                norm += double(f[k]) * f[k];
            }
            for (auto& v : f) v = static_cast<float>(v / std::sqrt(norm));
            return f;
        };
        EmbeddingGallery gallery, probes;
        for (int s = 0; s < subjects; ++s)
            for (int v : views)
                for (int i = 1; i <= 2; ++i) {
                    gallery.entries.push_back({{s + 1, Condition::kNM, i, v}, sample(s, 0.8)});
                    if (uniform01(rng) < 0.15) gallery.entries.push_back(gallery.entries.back());  // exact tie
                    if (uniform01(rng) < 0.8) probes.entries.push_back({{s + 1, Condition::kNM, 4 + i, v}, sample(s, 0.8)});
                }
        std::set<int> probe_views;
        for (const auto& p : probes.entries) probe_views.insert(p.key.view);
        const auto table = rank1_cross_view(gallery, probes);
        if (table.views != std::vector<int>(probe_views.begin(), probe_views.end()))
            return {false, "view list differs on instance " + std::to_string(seed)};
        double sum = 0.0;
        for (std::size_t i = 0; i < table.views.size(); ++i) {
            const double cell = rank1_oracle_cell(gallery, probes, table.views[i], views);
            if (cell != table.accuracy[i]) return {false, "cell differs on instance " + std::to_string(seed)};
            sum += cell;
        }
        if (sum / table.views.size() != table.mean) return {false, "mean differs on instance " + std::to_string(seed)};
    }
    return {true, std::to_string(instances) + " instances (1-10 subjects, 2-5 views, with ties) match exactly"};
}

// ---------------------------------------------------------------------------
// 6, 7, 9. End-to-end runs through the CLI

const std::string kTrainRecipe =
    "--epochs-scale 0.02 --channel-divisor 4 --subjects-per-batch 6 --sequences-per-subject 4 --window 40";
const std::string kEvalRecipe = "--window 40";
constexpr int kSeed = 1;

struct RunResult {
    bool ok = false;
    nlohmann::json tables;
    fs::path weights;
};

RunResult train_and_evaluate(const Context& ctx, const std::string& kind, const std::string& run,
                             const std::string& mode) {
    const auto corpus = ctx.work / ("corpus_" + kind);
    const auto out = ctx.work / run;
    const std::string seed = "--seed " + std::to_string(kSeed) + " ";
    if (!fs::exists(corpus / "010-cl-02-180.csv") &&
        run_cli(ctx, seed + "--out \"" + corpus.string() + "\" synthesize --kind " + kind + " --subjects 10",
                "synth_" + kind) != 0)
        return {};
    fs::remove_all(out);
    if (run_cli(ctx, seed + "--out \"" + out.string() + "\" train --corpus \"" + corpus.string() + "\" " + kTrainRecipe,
                "train_" + run) != 0)
        return {};
    if (run_cli(ctx,
                seed + "--out \"" + out.string() + "\" evaluate --corpus \"" + corpus.string() + "\" --weights \"" +
                    (out / "weights.ggw").string() + "\" --mode " + mode + " " + kEvalRecipe,
                "eval_" + run) != 0)
        return {};
    std::ifstream in(out / "evaluation.json");
    return {true, nlohmann::json::parse(in), out / "weights.ggw"};
}

double mean_of(const nlohmann::json& result) {
    double sum = 0.0;
    for (const auto& t : result.at("tables")) sum += t.at("mean").get<double>();
    return sum / static_cast<double>(result.at("tables").size());
}

std::map<std::string, RunResult> cached_runs;

const RunResult& run_once(const Context& ctx, const std::string& kind, const std::string& run, const std::string& mode) {
    auto it = cached_runs.find(run);
    if (it == cached_runs.end()) it = cached_runs.emplace(run, train_and_evaluate(ctx, kind, run, mode)).first;
    return it->second;
}

Outcome criterion_end_to_end(const Context& ctx) {
    const auto& r = run_once(ctx, "gait", "run_gait_a", "sort");
    if (!r.ok) return {false, "train/evaluate pipeline failed"};
    const auto& sort = r.tables.at("sort");
    std::string detail;
    bool pass = sort.at("tables").size() == 3;
    for (const auto& t : sort.at("tables")) {
        const double m = t.at("mean").get<double>();
        detail += t.at("condition").get<std::string>() + " " + fmt("%.1f", m) + "  ";
        pass = pass && m >= 95.0;
    }
    return {pass, detail + "mean " + fmt("%.1f", mean_of(sort)) + " (threshold 95 per condition)"};
}

Outcome criterion_temporal(const Context& ctx) {
    const auto& r = run_once(ctx, "temporal", "run_temporal", "shuffle");
    if (!r.ok) return {false, "train/evaluate pipeline failed"};
    const double sort = mean_of(r.tables.at("sort"));
    const double shuffle = mean_of(r.tables.at("shuffle"));
    return {sort - shuffle >= 20.0,
            "sort " + fmt("%.1f", sort) + ", shuffle " + fmt("%.1f", shuffle) + ", drop " + fmt("%.1f", sort - shuffle) +
                " points (threshold 20)"};
}

Outcome criterion_determinism(const Context& ctx) {
    const auto& a = run_once(ctx, "gait", "run_gait_a", "sort");
    const auto& b = run_once(ctx, "gait", "run_gait_b", "sort");
    if (!a.ok || !b.ok) return {false, "train/evaluate pipeline failed"};
    const std::string wa = slurp(a.weights), wb = slurp(b.weights);
    if (wa.empty() || wa != wb) return {false, "weight files differ"};
    if (a.tables.at("sort").at("tables") != b.tables.at("sort").at("tables")) return {false, "accuracy tables differ"};
    return {true, "weight files byte-identical (" + std::to_string(wa.size()) + " bytes); tables identical"};
}

// ---------------------------------------------------------------------------
// 8. Involutions and invariances

PoseSequence random_sequence(std::size_t frames, Rng& rng) {
    PoseSequence s(frames, 17);
    s.key = {3, Condition::kBG, 2, 54};
    for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t n = 0; n < 17; ++n) {
            s.at(t, n, 0) = 100.0 + 50.0 * normal(rng);
            s.at(t, n, 1) = 200.0 + 80.0 * normal(rng);
            s.at(t, n, 2) = uniform01(rng);
        }
    return s;
}

double max_abs_diff(const PoseSequence& a, const PoseSequence& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

Outcome criterion_invariances(const Context&) {
    Rng rng(8);
    const auto topo = build_coco17_topology();
    double mirror_err = 0.0, coord_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_sequence(1 + uniform_index(rng, 40), rng);
        if (!(reverse_time(reverse_time(s)) == s)) return {false, "reverse_time is not an involution"};
        mirror_err = std::max(mirror_err, max_abs_diff(mirror_pose(mirror_pose(s, topo), topo), s));

        const auto base = normalize_coords(s);
        auto moved = s;
        const double scale = 0.5 + 3.0 * uniform01(rng), dx = 500.0 * normal(rng), dy = 500.0 * normal(rng);
        for (std::size_t t = 0; t < moved.frames; ++t)
            for (std::size_t n = 0; n < 17; ++n) {
                moved.at(t, n, 0) = scale * moved.at(t, n, 0) + dx;
                moved.at(t, n, 1) = scale * moved.at(t, n, 1) + dy;
            }
        coord_err = std::max(coord_err, max_abs_diff(normalize_coords(moved), base));
    }
    // Reflection about the frame mean is exact in real arithmetic; the two
    // floating-point reflections round, so allow a few ulps.
    if (mirror_err > 1e-12) return {false, "mirror_pose round trip error " + fmt("%.2e", mirror_err)};
    if (coord_err > 1e-6) return {false, "normalize_coords invariance error " + fmt("%.2e", coord_err)};

    // Joint relabelling: same weights, permuted topology and input.
    const auto spec = ModelSpec::resgcn_n39_r8().with_channel_divisor(4);
    std::vector<std::size_t> perm(17);
    for (std::size_t i = 0; i < 17; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    ResGcnNet<float> net(spec, build_adjacency(topo, 3), 11);
    ResGcnNet<float> permuted(spec, build_adjacency(permute_topology(topo, perm), 3), 11);
    Tensor<float> x({3, 24, 17, 3}), px({3, 24, 17, 3});
    for (auto& v : x.values()) v = static_cast<float>(normal(rng));
    net.forward(x, ops::Mode::kTrain);  // move the running statistics off their defaults
    permuted.copy_state_from(net);
    for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t t = 0; t < 24; ++t)
            for (std::size_t n = 0; n < 17; ++n)
                for (std::size_t c = 0; c < 3; ++c) px.at(b, t, perm[n], c) = x.at(b, t, n, c);
    const auto e1 = net.forward(x, ops::Mode::kEval);
    const auto e2 = permuted.forward(px, ops::Mode::kEval);
    double embed_err = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) embed_err = std::max(embed_err, double(std::abs(e1[i] - e2[i])));
    if (embed_err > 1e-5) return {false, "permutation changes the embedding by " + fmt("%.2e", embed_err)};

    std::stringstream first;
    save_weights(net, first);
    const std::string bytes = first.str();
    ResGcnNet<float> reloaded(spec, build_adjacency(topo, 3), 99);
    std::stringstream in(bytes);
    load_weights_into(in, reloaded);
    std::stringstream second;
    save_weights(reloaded, second);
    auto p1 = net.parameters();
    auto p2 = reloaded.parameters();
    for (std::size_t i = 0; i < p1.size(); ++i)
        if (!(p1[i]->tensor == p2[i]->tensor)) return {false, "parameter " + p1[i]->name + " changed in round trip"};
    if (second.str() != bytes) return {false, "re-saved weight file differs"};

    return {true, "reverse exact; mirror within " + fmt("%.1e", mirror_err) + "; normalize_coords within " +
                      fmt("%.1e", coord_err) + "; permuted embedding within " + fmt("%.1e", embed_err) +
                      "; weight round trip bit-exact"};
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            ctx.cli = argv[++i];
        } else if (arg == "--work" && i + 1 < argc) {
            ctx.work = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            std::string item;
            while (std::getline(list, item, ',')) only.insert(std::stoi(item));
        } else {
            std::cerr << "usage: gaitgraph_acceptance --cli PATH [--work DIR] [--only 1,2,...]\n";
            return 2;
        }
    }
    if (ctx.cli.empty()) {
        std::cerr << "--cli is required\n";
        return 2;
    }
    if (ctx.work.empty()) ctx.work = fs::temp_directory_path() / "gaitgraph_acceptance";
    fs::create_directories(ctx.work);

    const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
        {"architecture conformance", criterion_architecture},
        {"gradient correctness", criterion_gradients},
        {"adjacency oracle", criterion_adjacency},
        {"loss oracle", criterion_loss},
        {"retrieval oracle", criterion_retrieval},
        {"synthetic end-to-end learning", criterion_end_to_end},
        {"temporal sensitivity", criterion_temporal},
        {"involutions and invariances", criterion_invariances},
        {"determinism", criterion_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second(ctx);
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d [%s] %s (%.1fs): %s\n", number, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), secs, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
