#include "gaitgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <numeric>
#include <thread>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

namespace fs = std::filesystem;

std::vector<int> DatasetIndex::subjects() const {
    std::set<int> ids;
    for (const auto& r : records) ids.insert(r.key.subject);
    return {ids.begin(), ids.end()};
}

nlohmann::json DatasetIndex::to_json() const {
    auto recs = nlohmann::json::array();
    for (const auto& r : records)
        recs.push_back({{"subject", r.key.subject},
                        {"condition", to_string(r.key.condition)},
                        {"seq", r.key.seq_index},
                        {"view", r.key.view},
                        {"path", r.path}});
    return {{"root", root}, {"records", recs}, {"warnings", warnings}};
}

DatasetIndex DatasetIndex::from_json(const nlohmann::json& doc) {
    DatasetIndex index;
    try {
        index.root = doc.value("root", std::string());
        for (const auto& r : doc.at("records")) {
            const auto cond = parse_condition(r.at("condition").get<std::string>());
            if (!cond) throw FormatError("unknown condition in index cache");
            index.records.push_back({{r.at("subject").get<int>(), *cond, r.at("seq").get<int>(), r.at("view").get<int>()},
                                     r.at("path").get<std::string>()});
        }
        index.warnings = doc.value("warnings", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed index cache: ") + e.what());
    }
    std::sort(index.records.begin(), index.records.end(),
              [](const SequenceRecord& a, const SequenceRecord& b) { return a.key < b.key; });
    return index;
}

std::optional<SequenceKey> parse_sequence_path(const fs::path& relative) {
    static const std::regex flat(R"(^(\d{3})-([a-zA-Z]{2})-(\d{2})-(\d{3})\.csv$)");
    static const std::regex cond_seq(R"(^([a-zA-Z]{2})-(\d{2})$)");
    static const std::regex view_file(R"(^(\d{3})\.csv$)");
    static const std::regex subject_dir(R"(^\d{3}$)");

    std::vector<std::string> parts;
    for (const auto& p : relative) parts.push_back(p.string());
    std::smatch m;
    SequenceKey key;
    std::optional<Condition> cond;
    if (std::regex_match(parts.back(), m, flat)) {
        key.subject = std::stoi(m[1]);
        cond = parse_condition(m[2]);
        key.seq_index = std::stoi(m[3]);
        key.view = std::stoi(m[4]);
    } else if (parts.size() >= 3 && std::regex_match(parts[parts.size() - 3], subject_dir)) {
        std::smatch cs, vf;
        const auto& mid = parts[parts.size() - 2];
        const auto& leaf = parts.back();
        if (!std::regex_match(mid, cs, cond_seq) || !std::regex_match(leaf, vf, view_file)) return std::nullopt;
        key.subject = std::stoi(parts[parts.size() - 3]);
        cond = parse_condition(cs[1]);
        key.seq_index = std::stoi(cs[2]);
        key.view = std::stoi(vf[1]);
    } else {
        return std::nullopt;
    }
    if (!cond || key.subject <= 0 || key.seq_index <= 0 || key.view < 0 || key.view > 180) return std::nullopt;
    key.condition = *cond;
    return key;
}

DatasetIndex index_corpus(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IndexingError("corpus root '" + root.string() + "' is not a readable directory");
    DatasetIndex index;
    index.root = root.string();
    std::vector<std::string> offenders;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (!it->is_regular_file() || it->path().extension() != ".csv") continue;
        const auto rel = fs::relative(it->path(), root);
        if (auto key = parse_sequence_path(rel))
            index.records.push_back({*key, it->path().string()});
        else
            offenders.push_back(rel.string());
    }
    if (ec) throw IndexingError("failed to scan '" + root.string() + "': " + ec.message());
    if (!offenders.empty()) {
        std::sort(offenders.begin(), offenders.end());
        std::string msg = "unrecognised pose file names:";
        for (const auto& o : offenders) msg += " " + o;
        throw IndexingError(msg);
    }
    std::sort(index.records.begin(), index.records.end(),
              [](const SequenceRecord& a, const SequenceRecord& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < index.records.size(); ++i)
        if (index.records[i].key == index.records[i - 1].key)
            throw IndexingError("duplicate sequence " + to_string(index.records[i].key) + ": " +
                                index.records[i - 1].path + " and " + index.records[i].path);
    if (index.records.empty()) index.warnings.push_back("no pose files found under " + root.string());

    std::map<int, std::size_t> per_subject;
    for (const auto& r : index.records) ++per_subject[r.key.subject];
    for (auto [subject, count] : per_subject)
        if (count < kSequencesPerSubject)
            index.warnings.push_back("subject " + std::to_string(subject) + ": " + std::to_string(count) + " of " +
                                     std::to_string(kSequencesPerSubject) + " sequences present");
    return index;
}

namespace {
DatasetIndex subset(const DatasetIndex& index, const auto& keep) {
    DatasetIndex out;
    out.root = index.root;
    for (const auto& r : index.records)
        if (keep(r.key)) out.records.push_back(r);
    return out;
}
}  // namespace

SubjectSplit lt_partition(const DatasetIndex& index) {
    const auto subjects = index.subjects();
    const std::size_t count = subjects.size();
    const std::size_t n_train =
        count == 124 ? 74 : static_cast<std::size_t>(std::ceil(0.6 * static_cast<double>(count) - 1e-9));
    const std::set<int> train_ids(subjects.begin(), subjects.begin() + static_cast<long>(n_train));
    return {subset(index, [&](const SequenceKey& k) { return train_ids.count(k.subject) > 0; }),
            subset(index, [&](const SequenceKey& k) { return train_ids.count(k.subject) == 0; })};
}

GalleryProbeSplit gallery_probe_split(const DatasetIndex& test) {
    GalleryProbeSplit split;
    split.gallery = subset(test, [](const SequenceKey& k) { return k.condition == Condition::kNM && k.seq_index <= 4; });
    split.probes[Condition::kNM] =
        subset(test, [](const SequenceKey& k) { return k.condition == Condition::kNM && (k.seq_index == 5 || k.seq_index == 6); });
    split.probes[Condition::kBG] =
        subset(test, [](const SequenceKey& k) { return k.condition == Condition::kBG && k.seq_index <= 2; });
    split.probes[Condition::kCL] =
        subset(test, [](const SequenceKey& k) { return k.condition == Condition::kCL && k.seq_index <= 2; });
    return split;
}

std::vector<PoseSequence> load_sequences(const DatasetIndex& index, std::size_t min_frames, LoadReport* report,
                                         std::size_t threads) {
    const std::size_t n = index.records.size();
    std::vector<std::optional<PoseSequence>> loaded(n);
    std::vector<std::string> errors(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& rec = index.records[i];
            try {
                auto seq = normalize_coords([&] {
                    auto s = read_pose_csv(rec.path);
                    s.key = rec.key;
                    return s;
                }());
                loaded[i] = std::move(seq);
            } catch (const Error& e) {
                errors[i] = rec.path + ": " + e.what();
            }
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, std::min(n, t * chunk), std::min(n, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    std::vector<PoseSequence> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!loaded[i]) {
            if (report) report->failures.push_back(errors[i]);
            continue;
        }
        if (loaded[i]->frames < min_frames) {
            if (report)
                report->excluded.push_back(to_string(loaded[i]->key) + ": " + std::to_string(loaded[i]->frames) +
                                           " frames < " + std::to_string(min_frames));
            continue;
        }
        out.push_back(std::move(*loaded[i]));
    }
    return out;
}

SubjectPool::SubjectPool(const std::vector<PoseSequence>& sequences) {
    std::map<int, std::vector<const PoseSequence*>> grouped;
    for (const auto& s : sequences) grouped[s.key.subject].push_back(&s);
    for (auto& [subject, seqs] : grouped) {
        subjects_.push_back(subject);
        total_ += seqs.size();
        by_subject_.push_back(std::move(seqs));
    }
}

Batch sample_batch(const SubjectPool& pool, std::size_t subjects_per_batch, std::size_t sequences_per_subject,
                   const AugmentConfig& config, const SkeletonTopology& topology, Rng& rng) {
    config.validate();
    if (subjects_per_batch == 0 || sequences_per_subject == 0) throw ContractError("P and K must be positive");
    if (pool.num_subjects() < subjects_per_batch)
        throw ContractError("batch needs " + std::to_string(subjects_per_batch) + " subjects, only " +
                            std::to_string(pool.num_subjects()) + " available");

    std::vector<std::size_t> slots(pool.num_subjects());
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < subjects_per_batch; ++i) std::swap(slots[i], slots[i + uniform_index(rng, slots.size() - i)]);

    std::vector<PoseSequence> views;
    Batch batch;
    for (std::size_t p = 0; p < subjects_per_batch; ++p) {
        const auto& seqs = pool.sequences_of(slots[p]);
        std::vector<std::size_t> order(seqs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t k = 0; k < sequences_per_subject; ++k) {
            std::size_t pick;
            if (k < order.size()) {
                std::swap(order[k], order[k + uniform_index(rng, order.size() - k)]);
                pick = order[k];
            } else {
                pick = uniform_index(rng, order.size());
            }
            for (int v = 0; v < 2; ++v) {
                views.push_back(augment(*seqs[pick], config, topology, rng));
                batch.labels.push_back(pool.subjects()[slots[p]]);
                batch.views.push_back(seqs[pick]->key.view);
            }
        }
    }
    batch.features = stack_sequences(views);
    return batch;
}

Tensor<float> stack_sequences(const std::vector<PoseSequence>& sequences) {
    if (sequences.empty()) throw ShapeError("cannot stack an empty sequence list");
    const std::size_t frames = sequences.front().frames, joints = sequences.front().joints;
    Tensor<float> out(Shape{sequences.size(), frames, joints, kPoseChannels});
    std::size_t offset = 0;
    for (const auto& s : sequences) {
        if (s.frames != frames || s.joints != joints) throw ShapeError("stack_sequences: sequences differ in shape");
        for (double v : s.values) out[offset++] = static_cast<float>(v);
    }
    return out;
}

}  // namespace gaitgraph
