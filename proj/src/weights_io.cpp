#include "gaitgraph/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace gaitgraph {
namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void write_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("truncated stream: missing header length");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

void write_floats_le(std::ostream& out, std::span<const float> values) {
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(values[i]);
        for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<float> read_floats_le(std::istream& in, std::size_t count, const std::string& name) {
    std::vector<unsigned char> bytes(count * 4);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw FormatError("truncated stream while reading '" + name + "'");
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
        values[i] = std::bit_cast<float>(bits);
    }
    return values;
}

void read_magic(std::istream& in, const char (&magic)[4]) {
    char found[4];
    if (!in.read(found, 4)) throw FormatError("truncated stream: missing magic");
    if (std::memcmp(found, magic, 4) != 0)
        throw FormatError("bad magic: expected '" + std::string(magic, 4) + "', found '" + std::string(found, 4) + "'");
}

nlohmann::json read_header_json(std::istream& in) {
    const std::uint64_t length = read_u64_le(in);
    if (length > (1ULL << 30)) throw FormatError("implausible header length " + std::to_string(length));
    std::string text(length, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(length))) throw FormatError("truncated stream: header");
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed header: ") + e.what());
    }
}

std::vector<TensorRecord> parse_records(const nlohmann::json& header) {
    std::vector<TensorRecord> records;
    try {
        for (const auto& t : header.at("tensors"))
            records.push_back({t.at("name").get<std::string>(), t.at("shape").get<Shape>()});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed tensor table: ") + e.what());
    }
    return records;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>*>> state_tensors(ResGcnNet<T>& model) {
    std::vector<std::pair<std::string, Tensor<T>*>> out;
    for (auto* p : model.parameters()) out.emplace_back(p->name, &p->tensor);
    for (auto& b : model.buffers()) out.emplace_back(b.name, b.tensor);
    return out;
}

}  // namespace

void write_tensor_file(std::ostream& out, const char (&magic)[4], nlohmann::json header,
                       const std::vector<TensorRecord>& records, const std::vector<std::span<const float>>& arrays) {
    if (records.size() != arrays.size()) throw FormatError("tensor table and array list differ in length");
    auto table = nlohmann::json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (num_elements(records[i].shape) != arrays[i].size())
            throw ShapeError("tensor '" + records[i].name + "' size does not match its shape");
        table.push_back({{"name", records[i].name}, {"shape", records[i].shape}});
    }
    header["tensors"] = table;
    header["dtype"] = "float32";
    const std::string text = header.dump();
    out.write(magic, 4);
    write_u64_le(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (auto values : arrays) write_floats_le(out, values);
    if (!out) throw FormatError("failed to write tensor stream");
}

TensorFile read_tensor_file(std::istream& in, const char (&magic)[4]) {
    read_magic(in, magic);
    TensorFile file;
    file.header = read_header_json(in);
    if (file.header.value("dtype", std::string()) != "float32") throw FormatError("unsupported dtype");
    file.records = parse_records(file.header);
    for (const auto& r : file.records) file.arrays.push_back(read_floats_le(in, num_elements(r.shape), r.name));
    return file;
}

template <typename T>
void save_weights(ResGcnNet<T>& model, std::ostream& out) {
    nlohmann::json header{{"version", 1}, {"spec_hash", model.spec().hash()}, {"model_spec", model.spec().to_json()}};
    std::vector<TensorRecord> records;
    std::vector<std::vector<float>> storage;
    for (auto& [name, tensor] : state_tensors(model)) {
        records.push_back({name, tensor->shape()});
        storage.emplace_back(tensor->size());
        std::transform(tensor->values().begin(), tensor->values().end(), storage.back().begin(),
                       [](T v) { return static_cast<float>(v); });
    }
    std::vector<std::span<const float>> arrays(storage.begin(), storage.end());
    write_tensor_file(out, kWeightMagic, std::move(header), records, arrays);
}

WeightHeader read_weight_header(std::istream& in) {
    read_magic(in, kWeightMagic);
    const auto header = read_header_json(in);
    if (header.value("version", 0) != 1) throw FormatError("unsupported weight file version");
    if (header.value("dtype", std::string()) != "float32") throw FormatError("unsupported dtype");
    WeightHeader out;
    try {
        out.spec_hash = header.at("spec_hash").get<std::string>();
        out.spec = ModelSpec::from_json(header.at("model_spec"));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed weight header: ") + e.what());
    }
    out.tensors = parse_records(header);
    return out;
}

template <typename T>
void load_weights_into(std::istream& in, ResGcnNet<T>& model) {
    const auto header = read_weight_header(in);
    auto targets = state_tensors(model);
    if (header.tensors.size() != targets.size())
        throw ShapeError("checkpoint holds " + std::to_string(header.tensors.size()) + " tensors, model expects " +
                         std::to_string(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& rec = header.tensors[i];
        if (rec.name != targets[i].first)
            throw ShapeError("checkpoint tensor " + std::to_string(i) + " is '" + rec.name + "', model expects '" +
                             targets[i].first + "'");
        if (rec.shape != targets[i].second->shape())
            throw ShapeError("shape mismatch for parameter '" + rec.name + "': checkpoint " + shape_string(rec.shape) +
                             ", model " + shape_string(targets[i].second->shape()));
    }
    if (header.spec_hash != model.spec().hash())
        throw FormatError("model spec hash mismatch: expected " + model.spec().hash() + ", found " + header.spec_hash);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto values = read_floats_le(in, targets[i].second->size(), targets[i].first);
        std::transform(values.begin(), values.end(), targets[i].second->data(),
                       [](float v) { return static_cast<T>(v); });
    }
}

ResGcnNet<float> load_weights(std::istream& in, const SkeletonTopology& topology) {
    const auto start = in.tellg();
    const auto header = read_weight_header(in);
    ResGcnNet<float> model(header.spec, build_adjacency(topology, header.spec.num_partitions), 0);
    in.clear();
    in.seekg(start);
    load_weights_into(in, model);
    return model;
}

void save_weights_file(ResGcnNet<float>& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    save_weights(model, out);
}

ResGcnNet<float> load_weights_file(const std::string& path, const SkeletonTopology& topology) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open weight file '" + path + "'");
    return load_weights(in, topology);
}

WeightHeader read_weight_header_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open weight file '" + path + "'");
    return read_weight_header(in);
}

template void save_weights(ResGcnNet<float>&, std::ostream&);
template void save_weights(ResGcnNet<double>&, std::ostream&);
template void load_weights_into(std::istream&, ResGcnNet<float>&);
template void load_weights_into(std::istream&, ResGcnNet<double>&);

}  // namespace gaitgraph
