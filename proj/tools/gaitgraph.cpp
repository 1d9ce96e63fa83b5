// gaitgraph command-line entry point: prepare, train, evaluate, embed,
// gradcheck, inspect, synthesize. Results go to stdout, diagnostics to stderr.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "gaitgraph/dataset.hpp"
#include "gaitgraph/error.hpp"
#include "gaitgraph/evaluation.hpp"
#include "gaitgraph/gradcheck.hpp"
#include "gaitgraph/run_config.hpp"
#include "gaitgraph/synthetic.hpp"
#include "gaitgraph/training.hpp"
#include "gaitgraph/weights_io.hpp"

namespace fs = std::filesystem;
using namespace gaitgraph;

namespace {

struct Globals {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
};

// Flag values that were actually given, keyed by their config name.
struct Overrides {
    nlohmann::json flat = nlohmann::json::object();

    template <typename V>
    void add(const std::string& key, const std::optional<V>& value) {
        if (value) flat[key] = *value;
    }
};

RunConfig resolve(const Globals& g, Overrides o) {
    RunConfig config = g.config_path ? load_run_config(*g.config_path) : RunConfig{};
    if (!g.threads) {
        if (const char* env = std::getenv("GAITGRAPH_THREADS")) {
            try {
                config.threads = std::stoul(env);
            } catch (const std::exception&) {
                throw ContractError(std::string("GAITGRAPH_THREADS is not a count: ") + env);
            }
        }
    }
    o.add("seed", g.seed);
    o.add("out", g.out);
    o.add("threads", g.threads);
    config.apply(o.flat);
    config.validate();
    return config;
}

// True when the model shape came from the user rather than the defaults.
bool spec_was_configured(const Globals& g, const Overrides& o) {
    if (o.flat.contains("model.channel_divisor") || o.flat.contains("model.partitions")) return true;
    if (!g.config_path) return false;
    std::ifstream in(*g.config_path);
    const auto doc = nlohmann::json::parse(in);
    return doc.contains("model.channel_divisor") || doc.contains("model.partitions");
}

void log(const std::string& message) { std::cerr << message << '\n'; }

std::string require_corpus(const RunConfig& config) {
    if (config.corpus.empty()) throw ContractError("no corpus given (use --corpus or the 'corpus' config key)");
    if (!fs::is_directory(config.corpus)) throw ContractError("corpus directory not found: " + config.corpus);
    return config.corpus;
}

int cmd_prepare(const RunConfig& config) {
    const auto index = index_corpus(require_corpus(config));
    for (const auto& w : index.warnings) log("warning: " + w);

    LoadReport report;
    const auto sequences = load_sequences(index, config.train.min_frames, &report, config.threads);

    std::map<int, std::map<Condition, int>> per_subject;
    std::map<int, int> per_view;
    for (const auto& r : index.records) {
        ++per_subject[r.key.subject][r.key.condition];
        ++per_view[r.key.view];
    }
    std::cout << "corpus: " << index.root << '\n';
    std::cout << "sequences: " << index.size() << "  subjects: " << per_subject.size()
              << "  loadable: " << sequences.size() << '\n';
    char line[96];
    for (const auto& [subject, counts] : per_subject) {
        int total = 0;
        for (const auto& [c, n] : counts) total += n;
        std::snprintf(line, sizeof(line), "subject %03d: %3d  (nm %d, bg %d, cl %d)\n", subject, total,
                      counts.count(Condition::kNM) ? counts.at(Condition::kNM) : 0,
                      counts.count(Condition::kBG) ? counts.at(Condition::kBG) : 0,
                      counts.count(Condition::kCL) ? counts.at(Condition::kCL) : 0);
        std::cout << line;
    }
    std::cout << "views:";
    for (const auto& [view, n] : per_view) std::cout << ' ' << view << ':' << n;
    std::cout << '\n';
    for (const auto& f : report.failures) std::cout << "unreadable: " << f << '\n';
    for (const auto& e : report.excluded) std::cout << "excluded (short): " << e << '\n';

    fs::create_directories(config.out);
    const auto cache = fs::path(config.out) / "index.json";
    std::ofstream(cache) << index.to_json().dump(1) << '\n';
    log("index cache written to " + cache.string());
    if (index.empty()) {
        log("error: corpus contains no pose sequences");
        return 1;
    }
    return 0;
}

int cmd_train(const RunConfig& config, bool resume, std::optional<std::size_t> stop_after) {
    const auto index = index_corpus(require_corpus(config));
    for (const auto& w : index.warnings) log("warning: " + w);
    const auto split = lt_partition(index);
    LoadReport report;
    const auto train = load_sequences(split.train, config.train.min_frames, &report, config.threads);
    for (const auto& f : report.failures) log("warning: skipped " + f);
    for (const auto& e : report.excluded) log("warning: excluded short sequence " + e);
    log("training on " + std::to_string(train.size()) + " sequences of " + std::to_string(split.train.subjects().size()) +
        " subjects");

    const fs::path out = config.out;
    fs::create_directories(out);
    std::ofstream(out / "config.json") << config.to_json().dump(2) << '\n';

    Trainer trainer(config.model_spec(), build_coco17_topology(), config.train_config(), config.augment);
    FitOptions options;
    options.out_dir = out;
    options.resume = resume;
    options.stop_after_epochs = stop_after;
    options.log = log;
    const auto result = fit(trainer, train, options);
    std::cout << "epochs: " << result.epochs_completed << "  steps: " << trainer.global_step()
              << "  checkpoints: " << result.checkpoints_written << '\n';
    if (!result.history.empty()) std::cout << "final loss: " << result.history.back().loss << '\n';
    if (result.finished) std::cout << "weights: " << (out / "weights.ggw").string() << '\n';
    else std::cout << "stopped early; resume with --resume\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config, bool check_spec, const std::string& weights_path,
                 std::optional<std::string> json_path, std::optional<std::string> distances_path) {
    const auto header = read_weight_header_file(weights_path);
    if (check_spec) {
        const auto expected = config.model_spec().hash();
        if (expected != header.spec_hash)
            throw FormatError("model spec hash mismatch: expected " + expected + ", found " + header.spec_hash);
    }
    auto model = load_weights_file(weights_path, build_coco17_topology());

    const auto index = index_corpus(require_corpus(config));
    const auto split = lt_partition(index);
    LoadReport report;
    const auto test = load_sequences(split.test, 1, &report, config.threads);
    for (const auto& f : report.failures) log("warning: skipped " + f);

    std::vector<ProtocolResult> results;
    auto options = config.eval_options();
    if (options.mode == OrderMode::kShuffle) {
        auto sorted = options;
        sorted.mode = OrderMode::kSort;
        results.push_back(evaluate_protocol(model, test, sorted));
    }
    results.push_back(evaluate_protocol(model, test, options));

    nlohmann::json doc = nlohmann::json::object();
    for (const auto& r : results) {
        for (const auto& w : r.warnings) log("warning: " + w);
        std::cout << format_tables(r) << '\n';
        doc[to_string(r.mode)] = r.to_json();
    }
    const fs::path json_out = json_path ? fs::path(*json_path) : fs::path(config.out) / "evaluation.json";
    if (json_out.has_parent_path()) fs::create_directories(json_out.parent_path());
    std::ofstream(json_out) << doc.dump(2) << '\n';
    log("accuracy tables written to " + json_out.string());

    if (distances_path) {
        std::ofstream csv(*distances_path);
        const auto& r = results.back();
        for (const auto& [condition, probes] : r.probes) write_distance_csv(csv, r.gallery, probes);
        log("distance matrix written to " + *distances_path);
    }
    return 0;
}

int cmd_embed(const RunConfig& config, const std::string& weights_path, const std::string& sequence_path) {
    auto model = load_weights_file(weights_path, build_coco17_topology());
    const auto seq = normalize_coords(read_pose_csv(sequence_path, model.spec().num_joints));
    const auto feature = embed_sequence(model, prepare_for_embedding(seq, config.eval.window));
    std::string line = "[";
    char buf[32];
    for (std::size_t i = 0; i < feature.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.9g", i ? "," : "", static_cast<double>(feature[i]));
        line += buf;
    }
    std::cout << line << "]\n";
    return 0;
}

int cmd_gradcheck(const RunConfig& config) {
    constexpr double kTolerance = 1e-4;
    const auto reports = run_gradcheck_suite(config.seed);
    std::cout << format_gradcheck(reports, kTolerance);
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.passed(kTolerance);
    std::cout << (ok ? "all fragments within 1e-4\n" : "gradient check FAILED\n");
    return ok ? 0 : 1;
}

int cmd_inspect(const RunConfig& config, std::size_t frames) {
    const auto spec = config.model_spec();
    std::cout << format_trace(shape_trace(spec, {frames, spec.num_joints, spec.input_channels}));
    std::cout << "spec hash: " << spec.hash() << '\n';
    return 0;
}

int cmd_synthesize(const RunConfig& config, const std::string& kind, int subjects) {
    SyntheticConfig s;
    if (kind == "gait") s.kind = SyntheticKind::kGait;
    else if (kind == "temporal") s.kind = SyntheticKind::kTemporal;
    else throw ContractError("--kind must be gait or temporal");
    s.subjects = subjects;
    s.seed = config.seed;
    const auto count = write_corpus(config.out, synthesize_corpus(s));
    std::cout << "wrote " << count << " sequences of " << subjects << " subjects to " << config.out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skeleton gait embedding: training and cross-view evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON file of dotted config keys");
    app.add_option("--seed", g.seed, "Seed for every random draw");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--threads", g.threads, "Parsing threads (fallback: GAITGRAPH_THREADS)");

    Overrides o;
    std::optional<std::string> corpus;
    auto add_corpus = [&](CLI::App* cmd) { cmd->add_option("--corpus", corpus, "Corpus root directory"); };

    auto* prepare = app.add_subcommand("prepare", "Index a corpus and report counts");
    add_corpus(prepare);
    std::optional<std::size_t> min_frames;
    prepare->add_option("--min-frames", min_frames, "Shortest sequence kept for training");

    auto* train = app.add_subcommand("train", "Train on the LT training subjects");
    add_corpus(train);
    std::optional<std::string> cycles;
    std::optional<double> epochs_scale, temperature, weight_decay;
    std::optional<std::size_t> divisor, partitions, window, subjects_per_batch, seqs_per_subject, checkpoint_every,
        stop_after;
    bool resume = false, print_config = false;
    train->add_option("--cycles", cycles, "EPOCHS:MAX_LR[,EPOCHS:MAX_LR...]");
    train->add_option("--epochs-scale", epochs_scale, "Multiplier on every cycle's epoch count");
    train->add_option("--temperature", temperature, "SupCon temperature");
    train->add_option("--weight-decay", weight_decay, "L2 weight decay");
    train->add_option("--channel-divisor", divisor, "Divide every block width by this");
    train->add_option("--partitions", partitions, "3 (spatial) or 1 (single adjacency)");
    train->add_option("--window", window, "Training window length");
    train->add_option("--subjects-per-batch", subjects_per_batch, "P");
    train->add_option("--sequences-per-subject", seqs_per_subject, "K");
    train->add_option("--checkpoint-every", checkpoint_every, "Checkpoint cadence in epochs");
    train->add_option("--stop-after", stop_after, "Stop after this many epochs (resumable)");
    train->add_flag("--resume", resume, "Continue from the last checkpoint in --out");
    train->add_flag("--print-config", print_config, "Print the resolved config and exit");

    auto* evaluate = app.add_subcommand("evaluate", "Cross-view rank-1 tables on the LT test subjects");
    add_corpus(evaluate);
    std::string weights;
    std::optional<std::string> mode, json_path, distances_path;
    std::optional<std::size_t> eval_window;
    bool probes_only = false;
    evaluate->add_option("--weights", weights, "Weight file")->required();
    evaluate->add_option("--mode", mode, "sort or shuffle")->check(CLI::IsMember({"sort", "shuffle"}));
    evaluate->add_flag("--probes-only", probes_only, "In shuffle mode keep the gallery in order");
    evaluate->add_option("--window", eval_window, "Evaluation window length");
    evaluate->add_option("--json", json_path, "Where to write the JSON tables");
    evaluate->add_option("--distances", distances_path, "Write the probe x gallery distance CSV here");
    evaluate->add_option("--channel-divisor", divisor, "Expected model width divisor");
    evaluate->add_option("--partitions", partitions, "Expected partition count");

    auto* embed = app.add_subcommand("embed", "Print the embedding of one pose file");
    std::string sequence_path;
    embed->add_option("--weights", weights, "Weight file")->required();
    embed->add_option("sequence", sequence_path, "Pose CSV")->required();
    embed->add_option("--window", eval_window, "Window length");

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every layer and a tiny model");

    auto* inspect = app.add_subcommand("inspect", "Print the layer shape trace");
    std::size_t frames = 60;
    inspect->add_option("--frames", frames, "Input sequence length");
    inspect->add_option("--channel-divisor", divisor, "Divide every block width by this");
    inspect->add_option("--partitions", partitions, "3 or 1");

    auto* synthesize = app.add_subcommand("synthesize", "Write a synthetic CASIA-B style corpus to --out");
    std::string kind = "gait";
    int subjects = 10;
    synthesize->add_option("--kind", kind, "gait or temporal");
    synthesize->add_option("--subjects", subjects, "Number of subjects");

    CLI11_PARSE(app, argc, argv);

    try {
        o.add("corpus", corpus);
        o.add("train.min_frames", min_frames);
        o.add("train.cycles", cycles);
        o.add("train.epochs_scale", epochs_scale);
        o.add("train.temperature", temperature);
        o.add("train.weight_decay", weight_decay);
        o.add("model.channel_divisor", divisor);
        o.add("model.partitions", partitions);
        o.add("augment.window", window);
        o.add("train.subjects_per_batch", subjects_per_batch);
        o.add("train.sequences_per_subject", seqs_per_subject);
        o.add("train.checkpoint_every", checkpoint_every);
        o.add("eval.mode", mode);
        o.add("eval.window", eval_window);
        if (probes_only) o.flat["eval.probes_only"] = true;
        const RunConfig config = resolve(g, o);

        if (*prepare) return cmd_prepare(config);
        if (*train) {
            if (print_config) {
                std::cout << config.to_json().dump(2) << '\n';
                return 0;
            }
            return cmd_train(config, resume, stop_after);
        }
        if (*evaluate)
            return cmd_evaluate(config, spec_was_configured(g, o), weights, json_path, distances_path);
        if (*embed) return cmd_embed(config, weights, sequence_path);
        if (*gradcheck) return cmd_gradcheck(config);
        if (*inspect) return cmd_inspect(config, frames);
        if (*synthesize) return cmd_synthesize(config, kind, subjects);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
