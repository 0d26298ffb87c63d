#include "results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fairrank::cli {
namespace {

std::string raw_header() {
    std::string h = "fingerprint,trial,iteration";
    for (auto name : kMetricNames) {
        h += ',';
        h += name;
    }
    return h;
}

std::string aggregate_header() {
    std::string h = "fingerprint,trials,iteration";
    for (auto name : kMetricNames) {
        for (const char* stat : {"_median", "_min", "_max"}) {
            h += ',';
            h += name;
            h += stat;
        }
    }
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <class T>
T parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" + text + "'", line);
    }
    return value;
}

// Calls row(cells, line) for every data row after checking the header.
template <class F>
void read_table(const std::filesystem::path& path, const std::string& header, F&& row) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty file", 0);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw ParseError(path.string() + ":1: header does not match the expected schema", 1);
    }
    const std::size_t width = split(header).size();
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != width) {
            throw ParseError(path.string() + ":" + std::to_string(number) + ": expected " +
                                 std::to_string(width) + " columns",
                             number);
        }
        row(cells, number);
    }
}

} // namespace

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw Error("cannot format number");
    }
    return std::string(buf, ptr);
}

void write_raw(const std::filesystem::path& path, std::span<const TrialResult> trials,
               const std::string& fingerprint) {
    auto out = open_out(path);
    out << raw_header() << '\n';
    for (const auto& t : trials) {
        for (const auto& r : t.records) {
            out << fingerprint << ',' << r.trial << ',' << r.iteration;
            for (std::size_t m = 0; m < kMetricCount; ++m) {
                out << ',' << format_real(metric_value(r, m));
            }
            out << '\n';
        }
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

RawTable read_raw(const std::filesystem::path& path) {
    RawTable table;
    read_table(path, raw_header(), [&](const std::vector<std::string>& c, std::size_t line) {
        if (table.records.empty()) {
            table.fingerprint = c[0];
        } else if (c[0] != table.fingerprint) {
            throw ParseError(path.string() + ":" + std::to_string(line) + ": mixed fingerprints", line);
        }
        MetricsRecord r;
        r.trial = parse_number<std::size_t>(c[1], path, line);
        r.iteration = parse_number<std::size_t>(c[2], path, line);
        double* fields[] = {&r.error_all,     &r.error_priv,      &r.error_unpriv, &r.error_diff,
                            &r.exposure_priv, &r.exposure_unpriv, &r.exposure_diff};
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            *fields[m] = parse_number<double>(c[3 + m], path, line);
        }
        table.records.push_back(r);
    });
    return table;
}

void write_aggregate(const std::filesystem::path& path, std::span<const AggregateRow> rows,
                     std::size_t trials, const std::string& fingerprint) {
    auto out = open_out(path);
    out << aggregate_header() << '\n';
    for (const auto& row : rows) {
        out << fingerprint << ',' << trials << ',' << row.iteration;
        for (const auto& s : row.metrics) {
            out << ',' << format_real(s.median) << ',' << format_real(s.min) << ',' << format_real(s.max);
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

AggregateTable read_aggregate(const std::filesystem::path& path) {
    AggregateTable table;
    read_table(path, aggregate_header(), [&](const std::vector<std::string>& c, std::size_t line) {
        table.fingerprint = c[0];
        table.trials = parse_number<std::size_t>(c[1], path, line);
        AggregateRow row;
        row.iteration = parse_number<std::size_t>(c[2], path, line);
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            row.metrics[m].median = parse_number<double>(c[3 + 3 * m], path, line);
            row.metrics[m].min = parse_number<double>(c[4 + 3 * m], path, line);
            row.metrics[m].max = parse_number<double>(c[5 + 3 * m], path, line);
        }
        table.rows.push_back(row);
    });
    return table;
}

} // namespace fairrank::cli
