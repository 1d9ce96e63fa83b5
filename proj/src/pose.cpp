#include "gaitgraph/pose.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

std::string to_string(Condition condition) {
    switch (condition) {
        case Condition::kNM:
            return "nm";
        case Condition::kBG:
            return "bg";
        case Condition::kCL:
            return "cl";
    }
    return "?";
}

std::string condition_label(Condition condition) {
    auto s = to_string(condition);
    for (auto& ch : s) ch = static_cast<char>(ch - 'a' + 'A');
    return s;
}

std::optional<Condition> parse_condition(const std::string& text) {
    std::string lower = text;
    for (auto& ch : lower)
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    if (lower == "nm") return Condition::kNM;
    if (lower == "bg") return Condition::kBG;
    if (lower == "cl") return Condition::kCL;
    return std::nullopt;
}

std::string to_string(const SequenceKey& key) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%03d-%s-%02d-%03d", key.subject, to_string(key.condition).c_str(), key.seq_index,
                  key.view);
    return buf;
}

std::uint64_t sequence_seed(std::uint64_t seed, const SequenceKey& key) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t v : {std::uint64_t(key.subject), std::uint64_t(key.condition), std::uint64_t(key.seq_index),
                            std::uint64_t(key.view)}) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t column) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last)
        throw ParseError("column " + std::to_string(column + 1) + ": non-numeric value '" + std::string(cell) + "'",
                         row);
    return value;
}

}  // namespace

PoseSequence parse_pose_csv(std::istream& in, std::size_t joints) {
    const std::size_t columns = 1 + joints * kPoseChannels;
    PoseSequence seq;
    seq.joints = joints;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_row(line);
        if (cells.size() != columns)
            throw ParseError("expected " + std::to_string(joints) + " joints (" + std::to_string(columns) +
                                 " columns), got " + std::to_string(cells.size()) + " columns",
                             row);
        parse_cell(cells[0], row, 0);
        for (std::size_t c = 1; c < columns; ++c) {
            const double v = parse_cell(cells[c], row, c);
            if ((c - 1) % kPoseChannels == 2 && !(v >= 0.0 && v <= 1.0))
                throw ParseError("column " + std::to_string(c + 1) + ": confidence " + std::string(cells[c]) +
                                     " outside [0, 1]",
                                 row);
            seq.values.push_back(v);
        }
        ++seq.frames;
    }
    return seq;
}

PoseSequence read_pose_csv(const std::string& path, std::size_t joints) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open pose file '" + path + "'");
    return parse_pose_csv(in, joints);
}

void write_pose_csv(std::ostream& out, const PoseSequence& seq) {
    char buf[32];
    for (std::size_t t = 0; t < seq.frames; ++t) {
        out << t;
        for (std::size_t n = 0; n < seq.joints; ++n)
            for (std::size_t c = 0; c < kPoseChannels; ++c) {
                // Shortest text that parses back to the same double.
                buf[0] = ',';
                const auto res = std::to_chars(buf + 1, buf + sizeof(buf), seq.at(t, n, c));
                out.write(buf, res.ptr - buf);
            }
        out << '\n';
    }
}

void write_pose_csv_file(const std::string& path, const PoseSequence& seq) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    write_pose_csv(out, seq);
}

}  // namespace gaitgraph
