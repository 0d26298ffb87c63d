#include "fairrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <type_traits>

namespace fairrank {
namespace {

// Child streams of a trial generator, one per purpose, so changing how much
// randomness one step consumes never shifts another step's draws.
enum Stream : std::uint64_t {
    kPopulation = 1,
    kSampling = 2,
    kComparison = 3,
    kRecovery = 4,
    kFeedback = 5,
};

bool is_rank_based(const SamplingStrategy& s) {
    return std::holds_alternative<RankBasedSampling>(s.variant);
}

void check_method(const RecoveryMethod& method, const char* field) {
    const std::string prefix = std::string(field) + ": ";
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RankCentrality>) {
                if (m.max_iters < 1 || !(m.tol > 0.0) || !(m.regularization >= 0.0 && m.regularization < 1.0)) {
                    throw InvalidInput(prefix + "rank_centrality needs max_iters >= 1, tol > 0, regularization in [0, 1)");
                }
            } else if constexpr (std::is_same_v<T, SerialRank>) {
                if (m.lanczos_steps < 2 || m.max_restarts < 1 || !(m.tol > 0.0)) {
                    throw InvalidInput(prefix + "serial_rank needs lanczos_steps >= 2, max_restarts >= 1, tol > 0");
                }
            } else if constexpr (std::is_same_v<T, FairPageRank>) {
                if (!(m.phi > 0.0 && m.phi < 1.0) || !(m.damping > 0.0 && m.damping < 1.0) ||
                    m.max_iters < 1 || !(m.tol > 0.0)) {
                    throw InvalidInput(prefix + "fair_pagerank needs phi and damping in (0, 1), max_iters >= 1, tol > 0");
                }
            }
        },
        method);
}

Population build_population(const SyntheticMode& mode, SeededRng rng) {
    DistributionSpec spec;
    if (const auto* cal = std::get_if<CalibratedDistribution>(&mode.distribution)) {
        spec = calibrate(cal->target, cal->options);
    } else {
        spec = std::get<DistributionSpec>(mode.distribution);
    }
    return generate_population(mode.n, mode.unpriv_fraction, spec, rng);
}

class Trial {
public:
    Trial(const ExperimentConfig& config, std::size_t index, const Dataset* dataset)
        : config_(config), index_(index), root_(mix_seed(config.seed, index)),
          sampling_rng_(root_.child(kSampling)), comparison_rng_(root_.child(kComparison)),
          recovery_rng_(root_.child(kRecovery)), feedback_rng_(root_.child(kFeedback)),
          population_(make_population(dataset)), graph_(population_.size()) {
        if (dataset != nullptr) {
            source_ = &dataset->graph;
            remaining_ = compared_pairs(dataset->graph);
        }
    }

    TrialResult run() {
        TrialResult result;
        result.trial = index_;
        const bool rank_based = is_rank_based(config_.sampling);
        for (std::size_t it = 1; it <= config_.iterations; ++it) {
            iteration_ = it;
            const Ranking* last = rank_based && have_feedback_ ? &feedback_ranking_ : nullptr;
            observe(last);

            const bool checkpoint = it % config_.checkpoint_every == 0;
            if (rank_based && config_.feedback) {
                feedback_ranking_ = ranking_from_scores(
                    recover(*config_.feedback, graph_, population_.groups(), feedback_rng_), feedback_rng_);
                have_feedback_ = true;
            }
            if (config_.recover_every == RecoverySchedule::EveryIteration || checkpoint) {
                step(result, checkpoint, rank_based && !config_.feedback);
            }
        }
        result.skills.assign(population_.skills().begin(), population_.skills().end());
        result.comparisons = graph_.total_comparisons();
        return result;
    }

    std::size_t iteration() const noexcept { return iteration_; }

private:
    Population make_population(const Dataset* dataset) const {
        if (const auto* syn = std::get_if<SyntheticMode>(&config_.mode)) {
            return build_population(*syn, root_.child(kPopulation));
        }
        if (dataset == nullptr) {
            throw InvalidInput("empirical mode needs a loaded dataset");
        }
        return dataset->population;
    }

    void observe(const Ranking* last) {
        if (source_ == nullptr) {
            const auto ids = sample_individuals(config_.sampling, population_, last, sampling_rng_);
            for (const auto& [a, b] : pair_randomly(ids, sampling_rng_)) {
                const NodeId winner = btl_compare(population_[a], population_[b], comparison_rng_);
                graph_.record(winner, winner == a ? b : a);
            }
            return;
        }
        // Each recorded pair is replayed at most once per trial, so the
        // sub-sampled graph stays an edge-multiset subset of the source.
        if (remaining_.empty()) {
            return;
        }
        const auto budget = std::get<EmpiricalMode>(config_.mode).budget_per_iteration;
        auto picked = sample_edge_indices(config_.sampling, remaining_, population_, last, budget,
                                          sampling_rng_);
        std::sort(picked.begin(), picked.end());
        for (std::size_t idx : picked) {
            const auto [a, b] = remaining_[idx];
            if (const std::uint32_t w = source_->wins(a, b); w > 0) {
                graph_.record(a, b, w);
            }
            if (const std::uint32_t w = source_->wins(b, a); w > 0) {
                graph_.record(b, a, w);
            }
        }
        // Compact the pool, keeping the original order of the survivors.
        std::size_t next = 0;
        std::size_t out = 0;
        for (std::size_t i = 0; i < remaining_.size(); ++i) {
            if (next < picked.size() && picked[next] == i) {
                ++next;
                continue;
            }
            remaining_[out++] = remaining_[i];
        }
        remaining_.resize(out);
    }

    void step(TrialResult& result, bool checkpoint, bool feed_back) {
        if (graph_.empty() && !std::holds_alternative<RandomBaseline>(config_.recovery)) {
            // Nothing observed yet (an empirical pool can run dry before the first draw).
            return;
        }
        const std::vector<double> scores =
            recover(config_.recovery, graph_, population_.groups(), recovery_rng_);
        Ranking ranking = ranking_from_scores(scores, recovery_rng_);

        PostprocessOutcome outcome = apply_postprocess(config_.postprocess, ranking, population_.groups());
        if (!outcome.bound_reached) {
            ++result.unmet_bounds;
        }
        if (feed_back) {
            feedback_ranking_ = config_.postprocess_feedback ? outcome.ranking : ranking;
            have_feedback_ = true;
        }
        if (checkpoint) {
            result.records.push_back(evaluate(population_, outcome.ranking, iteration_, index_));
        }
        result.final_ranking = std::move(outcome.ranking);
    }

    const ExperimentConfig& config_;
    std::size_t index_;
    SeededRng root_;
    SeededRng sampling_rng_;
    SeededRng comparison_rng_;
    SeededRng recovery_rng_;
    SeededRng feedback_rng_;
    Population population_;
    ComparisonGraph graph_;
    const ComparisonGraph* source_ = nullptr;
    std::vector<Pair> remaining_;

    std::size_t iteration_ = 0;
    Ranking feedback_ranking_;
    bool have_feedback_ = false;
};

} // namespace

void validate(const ExperimentConfig& config) {
    if (config.iterations < 1) {
        throw InvalidInput("iterations must be >= 1");
    }
    if (config.trials < 1) {
        throw InvalidInput("trials must be >= 1");
    }
    if (config.checkpoint_every < 1 || config.iterations % config.checkpoint_every != 0) {
        throw InvalidInput("checkpoint_every must be >= 1 and divide iterations");
    }
    if (const auto* syn = std::get_if<SyntheticMode>(&config.mode)) {
        if (syn->n < 2) {
            throw InvalidInput("mode.n must be >= 2");
        }
        if (!(syn->unpriv_fraction > 0.0 && syn->unpriv_fraction < 1.0)) {
            throw InvalidInput("mode.unpriv_fraction must lie in (0, 1)");
        }
        const auto n_unpriv = static_cast<std::size_t>(static_cast<double>(syn->n) * syn->unpriv_fraction);
        if (n_unpriv == 0 || n_unpriv == syn->n) {
            throw InvalidInput("mode.unpriv_fraction leaves a group empty");
        }
        if (const auto* spec = std::get_if<DistributionSpec>(&syn->distribution)) {
            if (!(spec->sigma_skill > 0.0) || !(spec->sigma_bias >= 0.0) ||
                !std::isfinite(spec->mu_skill) || !std::isfinite(spec->sigma_skill) ||
                !std::isfinite(spec->sigma_bias)) {
                throw InvalidInput("mode.distribution needs finite values, sigma_skill > 0 and sigma_bias >= 0");
            }
            if (!(spec->mu_bias <= 0.0)) {
                throw InvalidInput("mode.distribution.mu_bias must be <= 0");
            }
        } else {
            const auto& cal = std::get<CalibratedDistribution>(syn->distribution);
            const auto in_range = [](double p) { return p > 0.5 && p < 1.0; };
            if (!in_range(cal.target.p_stronger) || !in_range(cal.target.p_discr)) {
                throw InvalidInput("mode.calibration probabilities must lie in (0.5, 1)");
            }
        }
        validate(config.sampling, syn->n);
    } else {
        const auto& emp = std::get<EmpiricalMode>(config.mode);
        if (emp.nodes_path.empty() || emp.edges_path.empty()) {
            throw InvalidInput("mode.nodes_path and mode.edges_path are required");
        }
        if (emp.budget_per_iteration < 1) {
            throw InvalidInput("mode.budget_per_iteration must be >= 1");
        }
        if (!(config.sampling.sample_fraction > 0.0 && config.sampling.sample_fraction <= 1.0)) {
            throw InvalidInput("sampling.sample_fraction must lie in (0, 1]");
        }
    }
    check_method(config.recovery, "recovery");
    if (config.feedback) {
        check_method(*config.feedback, "feedback");
    }
    if (is_rank_based(config.sampling) && config.recover_every == RecoverySchedule::Checkpoints &&
        !config.feedback) {
        throw InvalidInput("recover_every = checkpoint needs a feedback method under rank-based sampling");
    }
    if (const auto* fair = std::get_if<FairConfig>(&config.postprocess)) {
        if (!(fair->p > 0.0 && fair->p < 1.0) || !(fair->alpha > 0.0 && fair->alpha < 1.0)) {
            throw InvalidInput("postprocess: FA*IR p and alpha must lie in (0, 1)");
        }
    } else if (const auto* epira = std::get_if<EpiraConfig>(&config.postprocess)) {
        if (!(epira->bnd >= 0.0 && epira->bnd <= 1.0)) {
            throw InvalidInput("postprocess: EPIRA bnd must lie in [0, 1]");
        }
    }
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index, const Dataset* dataset) {
    validate(config);
    if (std::holds_alternative<EmpiricalMode>(config.mode) && dataset == nullptr) {
        throw InvalidInput("empirical mode needs a loaded dataset");
    }
    std::size_t iteration = 0;
    try {
        Trial trial(config, trial_index, dataset);
        try {
            return trial.run();
        } catch (...) {
            iteration = trial.iteration();
            throw;
        }
    } catch (const InvalidInput&) {
        throw;
    } catch (const ConvergenceError& e) {
        throw TrialFailure("trial " + std::to_string(trial_index) + ", iteration " +
                               std::to_string(iteration) + ": " + e.what(),
                           trial_index, iteration, true);
    } catch (const Error& e) {
        throw TrialFailure("trial " + std::to_string(trial_index) + ", iteration " +
                               std::to_string(iteration) + ": " + e.what(),
                           trial_index, iteration, false);
    }
}

double metric_value(const MetricsRecord& record, std::size_t metric) {
    switch (metric) {
    case 0: return record.error_all;
    case 1: return record.error_priv;
    case 2: return record.error_unpriv;
    case 3: return record.error_diff;
    case 4: return record.exposure_priv;
    case 5: return record.exposure_unpriv;
    case 6: return record.exposure_diff;
    default: throw InvalidInput("metric index out of range");
    }
}

std::vector<AggregateRow> aggregate(std::span<const TrialResult> trials) {
    if (trials.empty()) {
        return {};
    }
    const std::size_t rows = trials.front().records.size();
    for (const auto& t : trials) {
        if (t.records.size() != rows) {
            throw InvalidInput("trials disagree on their checkpoints");
        }
    }
    std::vector<AggregateRow> out(rows);
    std::vector<double> values(trials.size());
    for (std::size_t r = 0; r < rows; ++r) {
        out[r].iteration = trials.front().records[r].iteration;
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            for (std::size_t t = 0; t < trials.size(); ++t) {
                if (trials[t].records[r].iteration != out[r].iteration) {
                    throw InvalidInput("trials disagree on their checkpoints");
                }
                values[t] = metric_value(trials[t].records[r], m);
            }
            std::sort(values.begin(), values.end());
            out[r].metrics[m] = {values[(values.size() - 1) / 2], values.front(), values.back()};
        }
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    std::optional<Dataset> dataset;
    if (const auto* emp = std::get_if<EmpiricalMode>(&config.mode)) {
        dataset = load_empirical(emp->nodes_path, emp->edges_path);
    }
    const Dataset* shared = dataset ? &*dataset : nullptr;

    const auto count = static_cast<std::ptrdiff_t>(config.trials);
    std::vector<std::optional<TrialResult>> slots(config.trials);
    std::vector<std::string> errors(config.trials);
    std::vector<char> convergence(config.trials, 0);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        const auto i = static_cast<std::size_t>(t);
        try {
            slots[i] = run_trial(config, i, shared);
        } catch (const TrialFailure& e) {
            errors[i] = e.what();
            convergence[i] = e.convergence() ? 1 : 0;
        } catch (const std::exception& e) {
            errors[i] = "trial " + std::to_string(i) + ": " + e.what();
        }
    }

    ExperimentResult result;
    std::vector<std::string> failures;
    bool any_convergence = false;
    for (std::size_t i = 0; i < config.trials; ++i) {
        if (slots[i]) {
            result.trials.push_back(std::move(*slots[i]));
        } else {
            failures.push_back(errors[i]);
            any_convergence = any_convergence || convergence[i] != 0;
        }
    }
    if (!failures.empty()) {
        std::string what = std::to_string(failures.size()) + " of " + std::to_string(config.trials) +
                           " trials failed; first: " + failures.front();
        throw ExperimentFailure(what, std::move(result.trials), std::move(failures), any_convergence);
    }
    result.rows = aggregate(result.trials);
    return result;
}

} // namespace fairrank
