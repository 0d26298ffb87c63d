#include "commands.hpp"

#include <fstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "plot.hpp"
#include "results.hpp"

namespace fairrank::cli {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

void print_record(const MetricsRecord& r, std::ostream& out) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        out << kMetricNames[m] << '=' << format_real(metric_value(r, m)) << '\n';
    }
}

std::string series_label(const std::filesystem::path& path) {
    // .../<run>/aggregate.csv is labelled by its run directory.
    if (path.filename() == "aggregate.csv" && path.has_parent_path() &&
        !path.parent_path().filename().empty()) {
        return path.parent_path().filename().string();
    }
    return path.stem().string();
}

} // namespace

void cmd_calibrate(const CalibrateArgs& args, std::ostream& out) {
    const CalibrationTarget target{args.p_stronger, args.p_discr};
    const DistributionSpec spec = calibrate(target);
    SeededRng rng(args.seed);
    const CalibrationTarget check = estimate_probabilities(spec, args.pairs, rng);
    out << "mu_skill=" << format_real(spec.mu_skill) << '\n'
        << "sigma_skill=" << format_real(spec.sigma_skill) << '\n'
        << "mu_bias=" << format_real(spec.mu_bias) << '\n'
        << "sigma_bias=" << format_real(spec.sigma_bias) << '\n'
        << "monte_carlo_pairs=" << args.pairs << '\n'
        << "p_stronger_estimate=" << format_real(check.p_stronger) << '\n'
        << "p_discr_estimate=" << format_real(check.p_discr) << '\n';
}

void cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    ExperimentConfig config = load_config(args.config);
    if (args.seed) {
        config.seed = *args.seed;
    }
    const std::string fp = fingerprint(config);
    std::filesystem::create_directories(args.out_dir);
    write_text(args.out_dir / "config.json", to_json(config).dump(2) + "\n");

    const auto raw_path = args.out_dir / "raw.csv";
    const auto agg_path = args.out_dir / "aggregate.csv";
    try {
        const ExperimentResult result = run_experiment(config);
        write_raw(raw_path, result.trials, fp);
        write_aggregate(agg_path, result.rows, config.trials, fp);
        out << "fingerprint=" << fp << '\n'
            << "trials=" << result.trials.size() << '\n'
            << "checkpoints=" << result.rows.size() << '\n';
    } catch (const ExperimentFailure& e) {
        // Keep what finished so a long sweep is not lost to one bad trial.
        write_raw(raw_path, e.completed(), fp);
        if (!e.completed().empty()) {
            write_aggregate(agg_path, aggregate(e.completed()), e.completed().size(), fp);
        }
        out << "fingerprint=" << fp << '\n'
            << "trials_completed=" << e.completed().size() << '\n';
        for (const auto& f : e.failures()) {
            out << "failed: " << f << '\n';
        }
        throw;
    }
}

void cmd_recover(const RecoverArgs& args, std::ostream& out) {
    const RecoveryMethod method = method_from_name(args.method);
    Postprocess post = NoPostprocess{};
    if (args.postprocess == "fair") {
        FairConfig f;
        f.p = args.p;
        f.alpha = args.alpha;
        if (args.on_exhausted == "fill") {
            f.exhaustion = FairExhaustion::Fill;
        } else if (args.on_exhausted != "fail") {
            throw InvalidInput("--on-exhausted must be fail or fill");
        }
        post = f;
    } else if (args.postprocess == "epira") {
        EpiraConfig e;
        e.bnd = args.bnd;
        post = e;
    } else if (args.postprocess != "none") {
        throw InvalidInput("--postprocess must be none, fair or epira");
    }

    const Dataset data = load_empirical(args.nodes.string(), args.edges.string());
    SeededRng rng(args.seed);
    const std::vector<double> scores = recover(method, data.graph, data.population.groups(), rng);
    const Ranking recovered = ranking_from_scores(scores, rng);
    const PostprocessOutcome outcome = apply_postprocess(post, recovered, data.population.groups());
    const bool post_processed = !std::holds_alternative<NoPostprocess>(post);
    const Ranking& ranking = outcome.ranking;

    std::ofstream file(args.out, std::ios::binary);
    if (!file) {
        throw Error("cannot write " + args.out.string());
    }
    file << "id,rank,score,group\n";
    for (NodeId id : ranking.order()) {
        const double score = post_processed ? ranking.scores()[id] : scores[id];
        file << data.labels[id] << ',' << ranking.rank(id) << ',' << format_real(score) << ','
             << to_string(data.population[id].group) << '\n';
    }
    if (!file) {
        throw Error("failed writing " + args.out.string());
    }

    out << "method=" << method_name(method) << '\n'
        << "nodes=" << data.population.size() << '\n'
        << "comparisons=" << data.graph.total_comparisons() << '\n';
    if (!outcome.bound_reached) {
        out << "warning: EPIRA stopped below bnd\n";
    }
    try {
        print_record(evaluate(data.population, ranking), out);
    } catch (const UndefinedMetric& e) {
        out << "metrics undefined: " << e.what() << '\n';
    }
}

void cmd_plot(const PlotArgs& args, std::ostream& out) {
    std::vector<PlotSeries> series;
    for (const auto& path : args.inputs) {
        AggregateTable table = read_aggregate(path);
        if (table.rows.empty()) {
            throw InvalidInput(path.string() + ": table has no rows");
        }
        series.push_back({series_label(path), std::move(table.rows)});
    }
    const std::string svg = render_plot(series);
    write_text(args.out, svg);
    out << "wrote " << args.out.string() << " (" << series.size() << " series)\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fair ranking recovery from pairwise comparisons"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "Fit skill and bias distributions to target win probabilities");
    c->add_option("--p-stronger", cal.p_stronger, "P(stronger individual wins)")->required();
    c->add_option("--p-discr", cal.p_discr, "P(privileged individual wins)")->required();
    c->add_option("--pairs", cal.pairs, "Monte-Carlo pairs for the round-trip check");
    c->add_option("--seed", cal.seed, "Seed for the round-trip check");

    SimulateArgs sim;
    std::uint64_t sim_seed = 0;
    auto* s = app.add_subcommand("simulate", "Run an experiment config");
    s->add_option("--config", sim.config, "JSON config")->required();
    s->add_option("--out", sim.out_dir, "Output directory")->required();
    auto* seed_opt = s->add_option("--seed", sim_seed, "Override the config seed");

    RecoverArgs rec;
    auto* r = app.add_subcommand("recover", "Rank a node/edge dataset");
    r->add_option("--nodes", rec.nodes, "id,group,score file")->required();
    r->add_option("--edges", rec.edges, "winner,loser[,count] file")->required();
    r->add_option("--method", rec.method, std::string("One of: ") + std::string(method_names()))->required();
    r->add_option("--postprocess", rec.postprocess, "none, fair or epira");
    r->add_option("--p", rec.p, "FA*IR target proportion");
    r->add_option("--alpha", rec.alpha, "FA*IR significance");
    r->add_option("--on-exhausted", rec.on_exhausted, "FA*IR with no protected candidates left: fail or fill");
    r->add_option("--bnd", rec.bnd, "EPIRA exposure-ratio bound");
    r->add_option("--seed", rec.seed, "Seed for random recovery and tie-breaking");
    r->add_option("--out", rec.out, "Ranking CSV")->required();

    PlotArgs plot;
    auto* p = app.add_subcommand("plot", "Render aggregate tables as SVG");
    p->add_option("--inputs", plot.inputs, "aggregate.csv files")->required()->expected(1, -1);
    p->add_option("--out", plot.out, "SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }
    if (seed_opt->count() > 0) {
        sim.seed = sim_seed;
    }

    try {
        if (c->parsed()) {
            cmd_calibrate(cal, out);
        } else if (s->parsed()) {
            cmd_simulate(sim, out);
        } else if (r->parsed()) {
            cmd_recover(rec, out);
        } else {
            cmd_plot(plot, out);
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kSuccess;
}

} // namespace fairrank::cli
