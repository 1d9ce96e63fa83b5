#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>

#include "gaitgraph/augmentation.hpp"
#include "gaitgraph/dataset.hpp"
#include "gaitgraph/error.hpp"
#include "gaitgraph/evaluation.hpp"
#include "gaitgraph/gradcheck.hpp"
#include "gaitgraph/run_config.hpp"
#include "gaitgraph/supcon.hpp"
#include "gaitgraph/synthetic.hpp"
#include "gaitgraph/training.hpp"
#include "gaitgraph/weights_io.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace gaitgraph;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = a.at(i, j);
    return m;
}

// T x N x 3 array <-> PoseSequence.
PoseSequence to_sequence(const Array& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeError("expected a T x N x 3 pose array");
    PoseSequence s(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), s.values.begin());
    return s;
}

Array to_array(const PoseSequence& s) {
    Array out({s.frames, s.joints, kPoseChannels});
    std::copy(s.values.begin(), s.values.end(), out.mutable_data());
    return out;
}

template <typename T>
py::array_t<T> to_array(const Tensor<T>& t) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    py::array_t<T> out(shape);
    std::copy(t.data(), t.data() + t.size(), out.mutable_data());
    return out;
}

py::object json_to_py(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

nlohmann::json py_to_json(const py::object& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

SyntheticKind parse_kind(const std::string& kind) {
    if (kind == "gait") return SyntheticKind::kGait;
    if (kind == "temporal") return SyntheticKind::kTemporal;
    throw ContractError("synthetic kind must be 'gait' or 'temporal'");
}

Condition condition_from(const std::string& text) {
    const auto c = parse_condition(text);
    if (!c) throw ContractError("unknown condition '" + text + "'");
    return *c;
}

EmbeddingGallery gallery_from(const FloatArray& features, const std::vector<int>& subjects,
                              const std::vector<int>& views) {
    if (features.ndim() != 2) throw ShapeError("features must be a 2-D array");
    const auto rows = static_cast<std::size_t>(features.shape(0)), dim = static_cast<std::size_t>(features.shape(1));
    if (subjects.size() != rows || views.size() != rows)
        throw ShapeError("subjects and views must have one entry per feature row");
    EmbeddingGallery g;
    for (std::size_t i = 0; i < rows; ++i) {
        EmbeddingEntry e;
        e.key.subject = subjects[i];
        e.key.view = views[i];
        e.feature.assign(features.data() + i * dim, features.data() + (i + 1) * dim);
        g.entries.push_back(std::move(e));
    }
    return g;
}

// Model plus the topology it was built on.
class PyModel {
   public:
    PyModel(std::size_t channel_divisor, std::size_t partitions, std::uint64_t seed)
        : topology_(build_coco17_topology()),
          model_(make_spec(channel_divisor, partitions), build_adjacency(topology_, partitions), seed) {}

    explicit PyModel(ResGcnNet<float>&& model) : topology_(build_coco17_topology()), model_(std::move(model)) {}

    static PyModel load(const std::string& path) {
        return PyModel(load_weights_file(path, build_coco17_topology()));
    }

    void save(const std::string& path) { save_weights_file(model_, path); }

    FloatArray forward(const FloatArray& batch) {
        if (batch.ndim() != 4) throw ShapeError("expected a B x T x N x 3 batch");
        Shape shape;
        for (py::ssize_t i = 0; i < 4; ++i) shape.push_back(static_cast<std::size_t>(batch.shape(i)));
        Tensor<float> x(shape, std::vector<float>(batch.data(), batch.data() + batch.size()));
        return to_array(model_.forward(x, ops::Mode::kEval));
    }

    FloatArray embed(const Array& sequence, std::size_t window) {
        const auto seq = normalize_coords(to_sequence(sequence));
        const auto feature = embed_sequence(model_, prepare_for_embedding(seq, window));
        FloatArray out(static_cast<py::ssize_t>(feature.size()));
        std::copy(feature.begin(), feature.end(), out.mutable_data());
        return out;
    }

    py::dict evaluate(const std::string& corpus, const std::string& mode, std::size_t window, bool probes_only,
                      std::uint64_t seed) {
        if (mode != "sort" && mode != "shuffle") throw ContractError("mode must be 'sort' or 'shuffle'");
        EvalOptions options;
        options.mode = mode == "shuffle" ? OrderMode::kShuffle : OrderMode::kSort;
        options.window = window;
        options.probes_only = probes_only;
        options.seed = seed;
        const auto split = lt_partition(index_corpus(corpus));
        const auto result = evaluate_protocol(model_, split.test, options);
        return json_to_py(result.to_json());
    }

    std::string spec_hash() const { return model_.spec().hash(); }
    py::object spec() const { return json_to_py(model_.spec().to_json()); }

    py::dict state_dict() {
        py::dict out;
        for (auto* p : model_.parameters()) out[py::str(p->name)] = to_array(p->tensor);
        for (auto& b : model_.buffers()) out[py::str(b.name)] = to_array(*b.tensor);
        return out;
    }

   private:
    static ModelSpec make_spec(std::size_t divisor, std::size_t partitions) {
        auto spec = ModelSpec::resgcn_n39_r8().with_channel_divisor(divisor);
        spec.num_partitions = partitions;
        return spec;
    }

    SkeletonTopology topology_;
    ResGcnNet<float> model_;
};

py::dict train(const py::dict& overrides, bool resume, std::optional<std::size_t> stop_after) {
    RunConfig config;
    config.apply(py_to_json(overrides));
    config.validate();
    if (config.corpus.empty()) throw ContractError("config needs a 'corpus' key");
    const auto split = lt_partition(index_corpus(config.corpus));
    LoadReport report;
    const auto sequences = load_sequences(split.train, config.train.min_frames, &report, config.threads);

    const fs::path out = config.out;
    fs::create_directories(out);
    std::ofstream(out / "config.json") << config.to_json().dump(2) << '\n';
    Trainer trainer(config.model_spec(), build_coco17_topology(), config.train_config(), config.augment);
    FitOptions options;
    options.out_dir = out;
    options.resume = resume;
    options.stop_after_epochs = stop_after;
    FitResult result;
    {
        py::gil_scoped_release release;
        result = fit(trainer, sequences, options);
    }
    py::list history;
    for (const auto& h : result.history) history.append(json_to_py(h.to_json()));
    py::dict summary;
    summary["history"] = history;
    summary["epochs_completed"] = result.epochs_completed;
    summary["checkpoints_written"] = result.checkpoints_written;
    summary["finished"] = result.finished;
    summary["weights"] = (out / "weights.ggw").string();
    return summary;
}

}  // namespace

PYBIND11_MODULE(_gaitgraph, m) {
    m.doc() = "Skeleton-sequence gait embeddings";

    auto base = py::register_exception<Error>(m, "GaitGraphError");
    py::register_exception<TopologyError>(m, "TopologyError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<OptimizerError>(m, "OptimizerError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IndexingError>(m, "IndexingError", base.ptr());
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());

    // skeleton graph
    m.def("coco17_topology", [] { return json_to_py(nlohmann::json::parse(topology_to_json(build_coco17_topology()))); });
    m.def("coco17_adjacency", [] { return to_array(build_coco17_topology().adjacency()); });
    m.def("normalize_adjacency", [](const Array& a) { return to_array(normalize_adjacency(to_matrix(a))); },
          py::arg("adjacency"));
    m.def(
        "partition",
        [](std::size_t partitions) {
            const auto set = build_adjacency(build_coco17_topology(), partitions);
            py::list ops_, masks;
            for (const auto& p : set.partitions) ops_.append(to_array(p));
            for (const auto& k : set.masks) masks.append(to_array(k));
            return py::make_tuple(ops_, masks);
        },
        py::arg("partitions") = 3, "Normalized operators and binary masks for the COCO-17 skeleton.");

    // model
    m.def(
        "shape_trace",
        [](std::size_t frames, std::size_t channel_divisor) {
            py::list rows;
            for (const auto& r : shape_trace(ModelSpec::resgcn_n39_r8().with_channel_divisor(channel_divisor),
                                             {frames, 17, 3}))
                rows.append(py::make_tuple(r.block, r.module, py::tuple(py::cast(r.shape))));
            return rows;
        },
        py::arg("frames") = 60, py::arg("channel_divisor") = 1);

    py::class_<PyModel>(m, "Model")
        .def(py::init<std::size_t, std::size_t, std::uint64_t>(), py::arg("channel_divisor") = 1,
             py::arg("partitions") = 3, py::arg("seed") = 0)
        .def_static("load", &PyModel::load, py::arg("path"))
        .def("save", &PyModel::save, py::arg("path"))
        .def("forward", &PyModel::forward, py::arg("batch"), "Eval-mode embeddings of a B x T x N x 3 batch.")
        .def("embed", &PyModel::embed, py::arg("sequence"), py::arg("window") = 60,
             "Normalized, center-windowed, forward/backward averaged embedding of one T x N x 3 sequence.")
        .def("evaluate", &PyModel::evaluate, py::arg("corpus"), py::arg("mode") = "sort", py::arg("window") = 60,
             py::arg("probes_only") = false, py::arg("seed") = 0)
        .def("state_dict", &PyModel::state_dict)
        .def_property_readonly("spec_hash", &PyModel::spec_hash)
        .def_property_readonly("spec", &PyModel::spec);

    // loss and retrieval
    m.def(
        "supcon_loss",
        [](const Array& features, const std::vector<std::int64_t>& labels, double temperature) {
            if (features.ndim() != 2) throw ShapeError("features must be B x D");
            Tensor<double> f(Shape{static_cast<std::size_t>(features.shape(0)), static_cast<std::size_t>(features.shape(1))},
                             std::vector<double>(features.data(), features.data() + features.size()));
            const auto r = supcon_loss(f, std::span<const std::int64_t>(labels), temperature);
            return py::make_tuple(r.loss, to_array(r.grad));
        },
        py::arg("features"), py::arg("labels"), py::arg("temperature"));
    m.def(
        "rank1_cross_view",
        [](const FloatArray& gallery, const std::vector<int>& gallery_subjects, const std::vector<int>& gallery_views,
           const FloatArray& probes, const std::vector<int>& probe_subjects, const std::vector<int>& probe_views) {
            const auto t = rank1_cross_view(gallery_from(gallery, gallery_subjects, gallery_views),
                                            gallery_from(probes, probe_subjects, probe_views));
            return json_to_py(t.to_json());
        },
        py::arg("gallery"), py::arg("gallery_subjects"), py::arg("gallery_views"), py::arg("probes"),
        py::arg("probe_subjects"), py::arg("probe_views"));

    // augmentation
    m.def("reverse_time", [](const Array& s) { return to_array(reverse_time(to_sequence(s))); });
    m.def("mirror_pose", [](const Array& s) { return to_array(mirror_pose(to_sequence(s), build_coco17_topology())); });
    m.def("normalize_coords", [](const Array& s) { return to_array(normalize_coords(to_sequence(s))); });
    m.def(
        "sample_window",
        [](const Array& s, std::size_t window, bool center, std::uint64_t seed) {
            Rng rng(seed);
            return to_array(
                sample_window(to_sequence(s), window, center ? WindowMode::kCenter : WindowMode::kRandom, rng));
        },
        py::arg("sequence"), py::arg("window"), py::arg("center") = true, py::arg("seed") = 0);
    m.def(
        "jitter_joints",
        [](const Array& s, double sigma_frame, double sigma_sequence, std::uint64_t seed) {
            Rng rng(seed);
            return to_array(jitter_joints(to_sequence(s), sigma_frame, sigma_sequence, rng));
        },
        py::arg("sequence"), py::arg("sigma_frame"), py::arg("sigma_sequence"), py::arg("seed") = 0);

    // data
    m.def("read_pose_csv", [](const std::string& path) { return to_array(read_pose_csv(path)); }, py::arg("path"));
    m.def(
        "write_pose_csv", [](const std::string& path, const Array& s) { write_pose_csv_file(path, to_sequence(s)); },
        py::arg("path"), py::arg("sequence"));
    m.def(
        "index_corpus",
        [](const std::string& root) {
            const auto index = index_corpus(root);
            py::dict out;
            out["records"] = json_to_py(index.to_json()).attr("get")("records");
            out["warnings"] = index.warnings;
            out["subjects"] = index.subjects();
            return out;
        },
        py::arg("root"));
    m.def(
        "synthesize_sequence",
        [](int subject, const std::string& condition, int seq_index, int view, const std::string& kind,
           std::uint64_t seed) {
            SyntheticConfig cfg;
            cfg.kind = parse_kind(kind);
            cfg.seed = seed;
            return to_array(synthesize_sequence(cfg, {subject, condition_from(condition), seq_index, view}));
        },
        py::arg("subject"), py::arg("condition") = "nm", py::arg("seq_index") = 1, py::arg("view") = 90,
        py::arg("kind") = "gait", py::arg("seed") = 0);
    m.def(
        "synthesize_corpus",
        [](const std::string& root, int subjects, const std::string& kind, std::uint64_t seed) {
            SyntheticConfig cfg;
            cfg.kind = parse_kind(kind);
            cfg.subjects = subjects;
            cfg.seed = seed;
            return write_corpus(root, synthesize_corpus(cfg));
        },
        py::arg("root"), py::arg("subjects") = 10, py::arg("kind") = "gait", py::arg("seed") = 0);

    // training and diagnostics
    m.def("default_config", [] { return json_to_py(RunConfig().to_json()); });
    m.def("train", &train, py::arg("config"), py::arg("resume") = false, py::arg("stop_after_epochs") = py::none(),
          "Train with a flat dict of dotted config keys; 'corpus' and 'out' are required in practice.");
    m.def(
        "gradcheck",
        [](std::uint64_t seed) {
            std::vector<GradCheckReport> reports;
            {
                py::gil_scoped_release release;
                reports = run_gradcheck_suite(seed);
            }
            py::dict out;
            for (const auto& r : reports) out[py::str(r.fragment)] = r.max_relative_error();
            return out;
        },
        py::arg("seed") = 0);
}
