#include "gaitgraph/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "gaitgraph/augmentation.hpp"

namespace gaitgraph {

void EmbeddingGallery::validate() const {
    for (const auto& e : entries) {
        double sq = 0.0;
        for (float v : e.feature) sq += static_cast<double>(v) * v;
        if (std::abs(std::sqrt(sq) - 1.0) > 1e-5)
            throw ContractError("embedding for " + to_string(e.key) + " is not unit length");
    }
}

nlohmann::json AccuracyTable::to_json() const {
    return {{"condition", condition}, {"views", views}, {"accuracy", accuracy}, {"mean", mean}};
}

PoseSequence prepare_for_embedding(const PoseSequence& normalized, std::size_t window) {
    Rng unused(0);
    return sample_window(normalized, window, WindowMode::kCenter, unused);
}

std::vector<std::vector<float>> embed_sequences(ResGcnNet<float>& model, const std::vector<PoseSequence>& prepared,
                                                std::size_t batch_size) {
    std::vector<std::vector<float>> out;
    out.reserve(prepared.size());
    batch_size = std::max<std::size_t>(batch_size, 1);
    for (std::size_t start = 0; start < prepared.size(); start += batch_size) {
        const std::size_t end = std::min(prepared.size(), start + batch_size);
        std::vector<PoseSequence> forward(prepared.begin() + static_cast<long>(start),
                                          prepared.begin() + static_cast<long>(end));
        std::vector<PoseSequence> backward;
        backward.reserve(forward.size());
        for (const auto& s : forward) backward.push_back(reverse_time(s));
        const auto a = model.forward(stack_sequences(forward), ops::Mode::kEval);
        const auto b = model.forward(stack_sequences(backward), ops::Mode::kEval);
        const std::size_t dim = a.dim(1);
        for (std::size_t i = 0; i < forward.size(); ++i) {
            std::vector<double> mean(dim);
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                mean[d] = 0.5 * (static_cast<double>(a.at(i, d)) + b.at(i, d));
                sq += mean[d] * mean[d];
            }
            const double norm = std::sqrt(sq);
            if (norm == 0.0) throw DegenerateError("sequence and its reversal have opposite embeddings");
            std::vector<float> feature(dim);
            for (std::size_t d = 0; d < dim; ++d) feature[d] = static_cast<float>(mean[d] / norm);
            out.push_back(std::move(feature));
        }
    }
    return out;
}

std::vector<float> embed_sequence(ResGcnNet<float>& model, const PoseSequence& prepared) {
    return embed_sequences(model, {prepared}, 1).front();
}

namespace {
double squared_distance(const std::vector<float>& a, const std::vector<float>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        acc += d * d;
    }
    return acc;
}
}  // namespace

AccuracyTable rank1_cross_view(const EmbeddingGallery& gallery, const EmbeddingGallery& probes) {
    std::set<int> view_set;
    std::map<int, std::vector<std::size_t>> gallery_by_view, probes_by_view;
    for (std::size_t i = 0; i < gallery.entries.size(); ++i) {
        view_set.insert(gallery.entries[i].key.view);
        gallery_by_view[gallery.entries[i].key.view].push_back(i);
    }
    for (std::size_t i = 0; i < probes.entries.size(); ++i) {
        view_set.insert(probes.entries[i].key.view);
        probes_by_view[probes.entries[i].key.view].push_back(i);
    }
    for (int v : view_set)
        if (gallery_by_view[v].empty()) throw ProtocolError("gallery has no entries for view " + std::to_string(v));
    if (view_set.size() < 2) throw ProtocolError("cross-view evaluation needs at least two views");

    AccuracyTable table;
    for (const auto& [probe_view, probe_ids] : probes_by_view) {
        double cell = 0.0;
        std::size_t gallery_views = 0;
        for (int gallery_view : view_set) {
            if (gallery_view == probe_view) continue;
            const auto& candidates = gallery_by_view[gallery_view];
            std::size_t correct = 0;
            for (std::size_t p : probe_ids) {
                const auto& probe = probes.entries[p];
                double best = std::numeric_limits<double>::infinity();
                int best_subject = -1;
                for (std::size_t g : candidates) {
                    const double d = squared_distance(probe.feature, gallery.entries[g].feature);
                    if (d < best) {
                        best = d;
                        best_subject = gallery.entries[g].key.subject;
                    }
                }
                if (best_subject == probe.key.subject) ++correct;
            }
            cell += 100.0 * static_cast<double>(correct) / static_cast<double>(probe_ids.size());
            ++gallery_views;
        }
        table.views.push_back(probe_view);
        table.accuracy.push_back(cell / static_cast<double>(gallery_views));
    }
    double sum = 0.0;
    for (double a : table.accuracy) sum += a;
    table.mean = table.accuracy.empty() ? 0.0 : sum / static_cast<double>(table.accuracy.size());
    return table;
}

std::string to_string(OrderMode mode) { return mode == OrderMode::kSort ? "sort" : "shuffle"; }

nlohmann::json ProtocolResult::to_json() const {
    auto tabs = nlohmann::json::array();
    for (const auto& t : tables) tabs.push_back(t.to_json());
    return {{"mode", to_string(mode)}, {"tables", tabs}, {"warnings", warnings}};
}

double ProtocolResult::mean_of_means() const {
    if (tables.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : tables) sum += t.mean;
    return sum / static_cast<double>(tables.size());
}

namespace {

EmbeddingGallery embed_set(ResGcnNet<float>& model, const std::vector<const PoseSequence*>& seqs,
                           const EvalOptions& options, bool shuffle) {
    std::vector<PoseSequence> prepared;
    prepared.reserve(seqs.size());
    for (const auto* s : seqs) {
        auto p = prepare_for_embedding(*s, options.window);
        if (shuffle) {
            Rng rng(sequence_seed(options.seed, s->key));
            p = shuffle_frames(p, rng);
        }
        prepared.push_back(std::move(p));
    }
    EmbeddingGallery gallery;
    if (prepared.empty()) return gallery;
    auto features = embed_sequences(model, prepared, options.batch_size);
    for (std::size_t i = 0; i < seqs.size(); ++i) gallery.entries.push_back({seqs[i]->key, std::move(features[i])});
    return gallery;
}

}  // namespace

ProtocolResult evaluate_protocol(ResGcnNet<float>& model, const std::vector<PoseSequence>& test_sequences,
                                 const EvalOptions& options) {
    ProtocolResult result;
    result.mode = options.mode;
    const bool shuffle = options.mode == OrderMode::kShuffle;

    std::vector<const PoseSequence*> gallery_seqs;
    std::map<Condition, std::vector<const PoseSequence*>> probe_seqs;
    for (const auto& s : test_sequences) {
        const auto& k = s.key;
        if (k.condition == Condition::kNM && k.seq_index <= 4)
            gallery_seqs.push_back(&s);
        else if (k.condition == Condition::kNM && (k.seq_index == 5 || k.seq_index == 6))
            probe_seqs[Condition::kNM].push_back(&s);
        else if (k.condition != Condition::kNM && k.seq_index <= 2)
            probe_seqs[k.condition].push_back(&s);
    }
    if (gallery_seqs.empty()) throw ProtocolError("test set has no NM #1-4 gallery sequences");
    result.gallery = embed_set(model, gallery_seqs, options, shuffle && !options.probes_only);
    for (Condition c : kAllConditions) {
        if (probe_seqs[c].empty()) {
            result.warnings.push_back("no " + condition_label(c) + " probes; table skipped");
            continue;
        }
        auto& probes = result.probes[c] = embed_set(model, probe_seqs[c], options, shuffle);
        auto table = rank1_cross_view(result.gallery, probes);
        table.condition = condition_label(c);
        result.tables.push_back(std::move(table));
    }
    return result;
}

ProtocolResult evaluate_protocol(ResGcnNet<float>& model, const DatasetIndex& test_index, const EvalOptions& options) {
    LoadReport report;
    const auto sequences = load_sequences(test_index, 1, &report);
    auto result = evaluate_protocol(model, sequences, options);
    for (const auto& f : report.failures) result.warnings.push_back("skipped " + f);
    return result;
}

std::string format_tables(const ProtocolResult& result) {
    std::ostringstream out;
    std::set<int> views;
    for (const auto& t : result.tables) views.insert(t.views.begin(), t.views.end());
    char cell[32];
    out << "Rank-1 accuracy (%), identical views excluded [" << to_string(result.mode) << "]\n";
    out << "Probe ";
    for (int v : views) {
        std::snprintf(cell, sizeof(cell), "%7d", v);
        out << cell;
    }
    out << "   mean\n";
    for (const auto& t : result.tables) {
        std::snprintf(cell, sizeof(cell), "%-6s", t.condition.c_str());
        out << cell;
        for (int v : views) {
            const auto it = std::find(t.views.begin(), t.views.end(), v);
            if (it == t.views.end())
                std::snprintf(cell, sizeof(cell), "%7s", "-");
            else
                std::snprintf(cell, sizeof(cell), "%7.1f", t.accuracy[static_cast<std::size_t>(it - t.views.begin())]);
            out << cell;
        }
        std::snprintf(cell, sizeof(cell), "%7.1f\n", t.mean);
        out << cell;
    }
    return out.str();
}

void write_distance_csv(std::ostream& out, const EmbeddingGallery& gallery, const EmbeddingGallery& probes) {
    out << "probe,gallery,distance\n";
    char buf[32];
    for (const auto& p : probes.entries)
        for (const auto& g : gallery.entries) {
            std::snprintf(buf, sizeof(buf), "%.6f", std::sqrt(squared_distance(p.feature, g.feature)));
            out << to_string(p.key) << ',' << to_string(g.key) << ',' << buf << '\n';
        }
}

}  // namespace gaitgraph
