#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairrank/pipeline.hpp"

namespace fairrank {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

class CsvReader {
public:
    explicit CsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) {
            throw InvalidInput("cannot open " + path);
        }
    }

    // Next non-blank line, split on commas. False at end of file.
    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, buffer_)) {
            ++line_;
            if (!trim(buffer_).empty()) {
                fields = split(buffer_);
                return true;
            }
        }
        return false;
    }

    std::size_t line() const noexcept { return line_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(path_ + ":" + std::to_string(line_) + ": " + what, line_);
    }

private:
    std::string path_;
    std::ifstream in_;
    std::string buffer_;
    std::size_t line_ = 0;
};

// Header column positions; -1 when absent.
std::vector<int> columns(CsvReader& reader, const std::vector<std::string_view>& header,
                         const std::vector<std::string_view>& names) {
    std::vector<int> pos(names.size(), -1);
    for (std::size_t c = 0; c < header.size(); ++c) {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (header[c] == names[k]) {
                if (pos[k] != -1) {
                    reader.fail("column '" + std::string(names[k]) + "' appears twice");
                }
                pos[k] = static_cast<int>(c);
            }
        }
    }
    return pos;
}

std::int64_t parse_id(CsvReader& reader, std::string_view text, const char* column) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        reader.fail(std::string(column) + " is not an integer: '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(CsvReader& reader, std::string_view text, const char* column) {
    // from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        reader.fail(std::string(column) + " is not a finite number: '" + std::string(text) + "'");
    }
    return value;
}

Group parse_group(CsvReader& reader, std::string_view text) {
    if (text == "privileged" || text == "priv") {
        return Group::Privileged;
    }
    if (text == "unprivileged" || text == "unpriv") {
        return Group::Unprivileged;
    }
    reader.fail("group must be privileged or unprivileged, got '" + std::string(text) + "'");
}

std::string_view field(CsvReader& reader, const std::vector<std::string_view>& fields, int pos,
                       const char* column) {
    if (static_cast<std::size_t>(pos) >= fields.size() || fields[pos].empty()) {
        reader.fail(std::string("missing value for column ") + column);
    }
    return fields[pos];
}

} // namespace

Dataset load_empirical(const std::string& nodes_path, const std::string& edges_path) {
    std::vector<Individual> individuals;
    std::vector<std::int64_t> labels;
    std::unordered_map<std::int64_t, NodeId> index;
    {
        CsvReader reader(nodes_path);
        std::vector<std::string_view> fields;
        if (!reader.next(fields)) {
            throw ParseError(nodes_path + ": empty node file", 0);
        }
        const auto pos = columns(reader, fields, {"id", "group", "score"});
        const char* names[] = {"id", "group", "score"};
        for (std::size_t k = 0; k < pos.size(); ++k) {
            if (pos[k] < 0) {
                reader.fail(std::string("missing column ") + names[k]);
            }
        }
        while (reader.next(fields)) {
            const std::int64_t id = parse_id(reader, field(reader, fields, pos[0], "id"), "id");
            const Group group = parse_group(reader, field(reader, fields, pos[1], "group"));
            const double score = parse_real(reader, field(reader, fields, pos[2], "score"), "score");
            if (individuals.size() >= std::numeric_limits<NodeId>::max()) {
                reader.fail("too many nodes");
            }
            const auto node = static_cast<NodeId>(individuals.size());
            if (!index.emplace(id, node).second) {
                reader.fail("duplicate node id " + std::to_string(id));
            }
            individuals.push_back({node, group, score, score});
            labels.push_back(id);
        }
    }
    Population population(std::move(individuals));
    ComparisonGraph graph(population.size());
    {
        CsvReader reader(edges_path);
        std::vector<std::string_view> fields;
        if (!reader.next(fields)) {
            throw ParseError(edges_path + ": empty edge file", 0);
        }
        const auto pos = columns(reader, fields, {"winner", "loser", "count"});
        if (pos[0] < 0) {
            reader.fail("missing column winner");
        }
        if (pos[1] < 0) {
            reader.fail("missing column loser");
        }
        const auto node = [&](std::string_view text, const char* column) {
            const std::int64_t id = parse_id(reader, text, column);
            const auto it = index.find(id);
            if (it == index.end()) {
                reader.fail(std::string("unknown ") + column + " id " + std::to_string(id));
            }
            return it->second;
        };
        while (reader.next(fields)) {
            const NodeId winner = node(field(reader, fields, pos[0], "winner"), "winner");
            const NodeId loser = node(field(reader, fields, pos[1], "loser"), "loser");
            std::int64_t count = 1;
            if (pos[2] >= 0) {
                count = parse_id(reader, field(reader, fields, pos[2], "count"), "count");
                if (count < 1 || count > std::numeric_limits<std::uint32_t>::max()) {
                    reader.fail("count must be a positive integer");
                }
            }
            if (winner == loser) {
                reader.fail("self-comparison");
            }
            graph.record(winner, loser, static_cast<std::uint32_t>(count));
        }
    }
    if (graph.empty()) {
        throw ParseError(edges_path + ": no comparisons", 0);
    }
    return {std::move(population), std::move(graph), std::move(labels)};
}

} // namespace fairrank
