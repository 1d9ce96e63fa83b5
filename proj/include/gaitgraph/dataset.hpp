#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/augmentation.hpp"
#include "gaitgraph/pose.hpp"
#include "gaitgraph/tensor.hpp"

namespace gaitgraph {

inline constexpr int kCasiaViews[] = {0, 18, 36, 54, 72, 90, 108, 126, 144, 162, 180};
inline constexpr std::size_t kSequencesPerSubject = 110;  // 11 views x (6 NM + 2 BG + 2 CL)

struct SequenceRecord {
    SequenceKey key;
    std::string path;
};

struct DatasetIndex {
    std::string root;
    std::vector<SequenceRecord> records;  // sorted by key
    std::vector<std::string> warnings;

    std::vector<int> subjects() const;
    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    nlohmann::json to_json() const;
    static DatasetIndex from_json(const nlohmann::json& doc);
};

// "SSS-cc-NN-VVV.csv" or "SSS/cc-NN/VVV.csv" relative to the corpus root.
std::optional<SequenceKey> parse_sequence_path(const std::filesystem::path& relative);

// Scans root for pose files. Subjects with fewer than the full 110 sequences
// are reported in `warnings`; unrecognised .csv names raise IndexingError.
DatasetIndex index_corpus(const std::filesystem::path& root);

struct SubjectSplit {
    DatasetIndex train;
    DatasetIndex test;
};

// The 124-subject corpus splits 74 / 50; other corpora put the first
// ceil(0.6 S) subjects (by id) into training.
SubjectSplit lt_partition(const DatasetIndex& index);

struct GalleryProbeSplit {
    DatasetIndex gallery;                      // NM #1-4
    std::map<Condition, DatasetIndex> probes;  // NM #5-6, BG #1-2, CL #1-2
};

GalleryProbeSplit gallery_probe_split(const DatasetIndex& test);

struct LoadReport {
    std::vector<std::string> failures;  // "path: reason"
    std::vector<std::string> excluded;  // too short for training
};

// Parses and coordinate-normalizes every record. Files that fail to parse or
// normalize are listed in the report and skipped; sequences shorter than
// min_frames are excluded likewise.
std::vector<PoseSequence> load_sequences(const DatasetIndex& index, std::size_t min_frames, LoadReport* report,
                                         std::size_t threads = 1);

struct Batch {
    Tensor<float> features;  // B x T x N x C
    std::vector<std::int64_t> labels;
    std::vector<int> views;
};

// Training sequences grouped by subject for P x K sampling.
class SubjectPool {
   public:
    explicit SubjectPool(const std::vector<PoseSequence>& sequences);

    std::size_t num_subjects() const { return subjects_.size(); }
    std::size_t num_sequences() const { return total_; }
    const std::vector<int>& subjects() const { return subjects_; }
    const std::vector<const PoseSequence*>& sequences_of(std::size_t subject_slot) const {
        return by_subject_[subject_slot];
    }

   private:
    std::vector<int> subjects_;
    std::vector<std::vector<const PoseSequence*>> by_subject_;
    std::size_t total_ = 0;
};

// Draws P subjects x K sequences; each sequence yields two independently
// augmented views carrying the subject label, so B = 2 P K.
Batch sample_batch(const SubjectPool& pool, std::size_t subjects_per_batch, std::size_t sequences_per_subject,
                   const AugmentConfig& config, const SkeletonTopology& topology, Rng& rng);

// Stacks equally long sequences into a B x T x N x C tensor.
Tensor<float> stack_sequences(const std::vector<PoseSequence>& sequences);

}  // namespace gaitgraph
