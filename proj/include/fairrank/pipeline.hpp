#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/postprocess.hpp"
#include "fairrank/recovery.hpp"
#include "fairrank/sampling.hpp"
#include "fairrank/synth.hpp"

namespace fairrank {

/// Distribution parameters derived from target win probabilities.
struct CalibratedDistribution {
    CalibrationTarget target;
    CalibrationOptions options;
};

struct SyntheticMode {
    std::size_t n = 400;
    double unpriv_fraction = 0.5;
    std::variant<CalibratedDistribution, DistributionSpec> distribution = CalibratedDistribution{};
};

/// Sub-sampling of an existing, labelled comparison graph.
struct EmpiricalMode {
    std::string nodes_path;
    std::string edges_path;
    std::size_t budget_per_iteration = 500;
};

enum class RecoverySchedule {
    EveryIteration,
    Checkpoints, // not allowed when rank-based sampling feeds on the method under test
};

struct ExperimentConfig {
    std::variant<SyntheticMode, EmpiricalMode> mode = SyntheticMode{};
    SamplingStrategy sampling;
    RecoveryMethod recovery = DavidsScore{};
    Postprocess postprocess = NoPostprocess{};
    std::size_t iterations = 500;
    std::size_t trials = 10;
    std::size_t checkpoint_every = 10;
    std::uint64_t seed = 0;

    RecoverySchedule recover_every = RecoverySchedule::EveryIteration;
    /// Cheap method that supplies rank-based sampling ranks instead of the method under test.
    std::optional<RecoveryMethod> feedback;
    /// Rank-based sampling sees the post-processed ranking when post-processing is on.
    bool postprocess_feedback = true;
};

/// Throws InvalidInput naming the offending field.
void validate(const ExperimentConfig& config);

/// Labelled empirical dataset. labels[i] is the id used in the files for node i.
struct Dataset {
    Population population;
    ComparisonGraph graph;
    std::vector<std::int64_t> labels;
};

/**
 * Reads `id,group,score` nodes and `winner,loser[,count]` edges (comma
 * separated, header row, any column order). The score is the ground truth
 * used as skill; group is privileged/unprivileged (or priv/unpriv).
 */
Dataset load_empirical(const std::string& nodes_path, const std::string& edges_path);

struct TrialResult {
    std::size_t trial = 0;
    std::vector<MetricsRecord> records;
    Ranking final_ranking;
    std::vector<double> skills;       // ground truth the records were scored against
    std::size_t unmet_bounds = 0;     // EPIRA runs that stopped short of bnd
    std::uint64_t comparisons = 0;    // size of the cumulative graph at the end

    bool operator==(const TrialResult&) const = default;
};

/// A trial failed; the message carries trial and iteration.
class TrialFailure : public Error {
public:
    TrialFailure(const std::string& what, std::size_t trial, std::size_t iteration, bool convergence)
        : Error(what), trial_(trial), iteration_(iteration), convergence_(convergence) {}

    std::size_t trial() const noexcept { return trial_; }
    std::size_t iteration() const noexcept { return iteration_; }
    bool convergence() const noexcept { return convergence_; }

private:
    std::size_t trial_;
    std::size_t iteration_;
    bool convergence_;
};

/// Runs one trial. `dataset` must be supplied in empirical mode (loaded once, shared read-only).
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index,
                      const Dataset* dataset = nullptr);

struct MetricSummary {
    double median = 0.0; // lower median
    double min = 0.0;
    double max = 0.0;

    bool operator==(const MetricSummary&) const = default;
};

inline constexpr std::size_t kMetricCount = 7;

/// Metric columns in their fixed output order.
inline constexpr std::array<std::string_view, kMetricCount> kMetricNames{
    "error_all",     "error_priv",      "error_unpriv", "error_diff",
    "exposure_priv", "exposure_unpriv", "exposure_diff"};

double metric_value(const MetricsRecord& record, std::size_t metric);

struct AggregateRow {
    std::size_t iteration = 0;
    std::array<MetricSummary, kMetricCount> metrics{};

    bool operator==(const AggregateRow&) const = default;
};

/// Per-checkpoint lower median and range over trials, ordered by iteration.
std::vector<AggregateRow> aggregate(std::span<const TrialResult> trials);

struct ExperimentResult {
    std::vector<TrialResult> trials;
    std::vector<AggregateRow> rows;
};

/// Some trials failed; the rest are kept for a partial report.
class ExperimentFailure : public Error {
public:
    ExperimentFailure(const std::string& what, std::vector<TrialResult> completed,
                      std::vector<std::string> failures, bool convergence)
        : Error(what), completed_(std::move(completed)), failures_(std::move(failures)),
          convergence_(convergence) {}

    const std::vector<TrialResult>& completed() const noexcept { return completed_; }
    const std::vector<std::string>& failures() const noexcept { return failures_; }
    bool convergence() const noexcept { return convergence_; }

private:
    std::vector<TrialResult> completed_;
    std::vector<std::string> failures_;
    bool convergence_;
};

/// Runs every trial (concurrently when OpenMP has threads) and aggregates them.
ExperimentResult run_experiment(const ExperimentConfig& config);

} // namespace fairrank
