#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/dataset.hpp"
#include "gaitgraph/model.hpp"

namespace gaitgraph {

struct EmbeddingEntry {
    SequenceKey key;
    std::vector<float> feature;
};

struct EmbeddingGallery {
    std::vector<EmbeddingEntry> entries;

    // Throws ContractError unless every feature is unit length within 1e-5.
    void validate() const;
    std::size_t size() const { return entries.size(); }
};

struct AccuracyTable {
    std::string condition;
    std::vector<int> views;
    std::vector<double> accuracy;  // percent, one per view
    double mean = 0.0;

    nlohmann::json to_json() const;
    bool operator==(const AccuracyTable&) const = default;
};

// Center window of the coordinate-normalized sequence (cyclic repeat when short).
PoseSequence prepare_for_embedding(const PoseSequence& normalized, std::size_t window);

// Mean of the embeddings of each sequence and its time reversal, re-normalized.
// Sequences must share one length. Eval-mode forward only.
std::vector<std::vector<float>> embed_sequences(ResGcnNet<float>& model, const std::vector<PoseSequence>& prepared,
                                                std::size_t batch_size = 64);

std::vector<float> embed_sequence(ResGcnNet<float>& model, const PoseSequence& prepared);

// Rank-1 accuracy per probe view, averaged over every gallery view other than
// the probe's own. Nearest neighbour by Euclidean distance; ties go to the
// lower gallery index.
AccuracyTable rank1_cross_view(const EmbeddingGallery& gallery, const EmbeddingGallery& probes);

enum class OrderMode { kSort, kShuffle };

std::string to_string(OrderMode mode);

struct EvalOptions {
    OrderMode mode = OrderMode::kSort;
    bool probes_only = false;  // shuffle probes but keep gallery order
    std::size_t window = 60;
    std::uint64_t seed = 0;
    std::size_t batch_size = 64;
};

struct ProtocolResult {
    OrderMode mode = OrderMode::kSort;
    std::vector<AccuracyTable> tables;  // NM, BG, CL (missing conditions skipped)
    std::vector<std::string> warnings;
    EmbeddingGallery gallery;
    std::map<Condition, EmbeddingGallery> probes;

    nlohmann::json to_json() const;
    double mean_of_means() const;
};

// Gallery NM #1-4 against probe sets NM #5-6, BG #1-2, CL #1-2 of the given
// (already normalized) test sequences.
ProtocolResult evaluate_protocol(ResGcnNet<float>& model, const std::vector<PoseSequence>& test_sequences,
                                 const EvalOptions& options);

ProtocolResult evaluate_protocol(ResGcnNet<float>& model, const DatasetIndex& test_index, const EvalOptions& options);

// Plain-text table: one row per condition, one column per view, then mean.
std::string format_tables(const ProtocolResult& result);

// probe key, gallery key, distance
void write_distance_csv(std::ostream& out, const EmbeddingGallery& gallery, const EmbeddingGallery& probes);

}  // namespace gaitgraph
