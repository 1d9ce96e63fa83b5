#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitgraph/model.hpp"

namespace gaitgraph {

// Weight file layout: magic "GGW1", u64 little-endian header length, JSON
// header, then float32 little-endian arrays in header order.
inline constexpr char kWeightMagic[4] = {'G', 'G', 'W', '1'};
inline constexpr char kOptimizerMagic[4] = {'G', 'G', 'O', '1'};

struct TensorRecord {
    std::string name;
    Shape shape;
};

// Generic container used by weight files and optimizer sidecars.
struct TensorFile {
    nlohmann::json header;
    std::vector<TensorRecord> records;
    std::vector<std::vector<float>> arrays;
};

void write_tensor_file(std::ostream& out, const char (&magic)[4], nlohmann::json header,
                       const std::vector<TensorRecord>& records, const std::vector<std::span<const float>>& arrays);
TensorFile read_tensor_file(std::istream& in, const char (&magic)[4]);

struct WeightHeader {
    std::string spec_hash;
    ModelSpec spec;
    std::vector<TensorRecord> tensors;
};

template <typename T>
void save_weights(ResGcnNet<T>& model, std::ostream& out);

// Reads only the header; the stream is left after it.
WeightHeader read_weight_header(std::istream& in);

// Loads into an existing model. Shape mismatches name the offending tensor;
// a spec-hash mismatch is reported with both hashes.
template <typename T>
void load_weights_into(std::istream& in, ResGcnNet<T>& model);

// Builds a model from the spec embedded in the file.
ResGcnNet<float> load_weights(std::istream& in, const SkeletonTopology& topology);

void save_weights_file(ResGcnNet<float>& model, const std::string& path);
ResGcnNet<float> load_weights_file(const std::string& path, const SkeletonTopology& topology);
WeightHeader read_weight_header_file(const std::string& path);

}  // namespace gaitgraph
