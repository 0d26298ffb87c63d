#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fairrank/pipeline.hpp"

namespace fairrank::cli {

/// Shortest decimal that parses back to the same double.
std::string format_real(double value);

/**
 * raw.csv: fingerprint,trial,iteration, then the metric columns in
 * kMetricNames order; one row per (trial, checkpoint).
 */
void write_raw(const std::filesystem::path& path, std::span<const TrialResult> trials,
               const std::string& fingerprint);

struct RawTable {
    std::string fingerprint;
    std::vector<MetricsRecord> records;
};

RawTable read_raw(const std::filesystem::path& path);

/**
 * aggregate.csv: fingerprint,trials,iteration, then <metric>_median,
 * <metric>_min, <metric>_max per metric.
 */
void write_aggregate(const std::filesystem::path& path, std::span<const AggregateRow> rows,
                     std::size_t trials, const std::string& fingerprint);

struct AggregateTable {
    std::string fingerprint;
    std::size_t trials = 0;
    std::vector<AggregateRow> rows;
};

/// Throws ParseError when the header differs from the aggregate schema.
AggregateTable read_aggregate(const std::filesystem::path& path);

} // namespace fairrank::cli
