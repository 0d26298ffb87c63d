#include "config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <type_traits>

namespace fairrank::cli {
namespace {

using nlohmann::json;

// A JSON object being consumed key by key; finish() rejects whatever is left.
class Section {
public:
    Section(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) {
            throw InvalidInput(path_ + ": expected an object");
        }
    }

    bool has(const std::string& key) const { return value_.contains(key); }

    const json& raw(const std::string& key) {
        if (!has(key)) {
            throw InvalidInput(field(key) + ": required");
        }
        seen_.insert(key);
        return value_.at(key);
    }

    Section child(const std::string& key) { return Section(raw(key), field(key)); }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) {
            return fallback;
        }
        return convert<T>(raw(key), field(key));
    }

    template <class T>
    T require(const std::string& key) {
        if (!has(key)) {
            throw InvalidInput(field(key) + ": required");
        }
        return convert<T>(raw(key), field(key));
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& path() const noexcept { return path_; }

    void finish() const {
        for (const auto& [key, _] : value_.items()) {
            if (!seen_.count(key)) {
                throw InvalidInput(field(key) + ": unknown key");
            }
        }
    }

private:
    template <class T>
    static T convert(const json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw InvalidInput(where + ": expected true or false");
            }
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw InvalidInput(where + ": expected a string");
            }
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                throw InvalidInput(where + ": expected a number");
            }
            return v.get<double>();
        } else {
            static_assert(std::is_unsigned_v<T>);
            if (v.is_number_unsigned()) {
                const auto x = v.get<std::uint64_t>();
                if (x > std::numeric_limits<T>::max()) {
                    throw InvalidInput(where + ": too large");
                }
                return static_cast<T>(x);
            }
            throw InvalidInput(where + ": expected a non-negative integer");
        }
    }

    const json& value_;
    std::string path_;
    std::set<std::string> seen_;
};

RecoveryMethod parse_method(const json& value, const std::string& path) {
    if (value.is_string()) {
        try {
            return method_from_name(value.get<std::string>());
        } catch (const InvalidInput& e) {
            throw InvalidInput(path + ": " + e.what());
        }
    }
    Section s(value, path);
    const auto name = s.require<std::string>("method");
    RecoveryMethod method;
    try {
        method = method_from_name(name);
    } catch (const InvalidInput& e) {
        throw InvalidInput(s.field("method") + ": " + e.what());
    }
    if (auto* rc = std::get_if<RankCentrality>(&method)) {
        rc->max_iters = s.get("max_iters", rc->max_iters);
        rc->tol = s.get("tol", rc->tol);
        rc->regularization = s.get("regularization", rc->regularization);
        rc->direct_limit = s.get("direct_limit", rc->direct_limit);
        const auto norm = s.get<std::string>("normalization", "max_degree");
        if (norm == "max_degree") {
            rc->normalization = DegreeNormalization::MaxDegree;
        } else if (norm == "per_node") {
            rc->normalization = DegreeNormalization::PerNode;
        } else {
            throw InvalidInput(s.field("normalization") + ": expected max_degree or per_node");
        }
    } else if (auto* sr = std::get_if<SerialRank>(&method)) {
        sr->dense_limit = s.get("dense_limit", sr->dense_limit);
        sr->lanczos_steps = s.get("lanczos_steps", sr->lanczos_steps);
        sr->max_restarts = s.get("max_restarts", sr->max_restarts);
        sr->tol = s.get("tol", sr->tol);
    } else if (auto* fp = std::get_if<FairPageRank>(&method)) {
        fp->phi = s.get("phi", fp->phi);
        fp->damping = s.get("damping", fp->damping);
        fp->max_iters = s.get("max_iters", fp->max_iters);
        fp->tol = s.get("tol", fp->tol);
    }
    s.finish();
    return method;
}

SamplingStrategy parse_sampling(Section s) {
    SamplingStrategy out;
    out.sample_fraction = s.get("sample_fraction", out.sample_fraction);
    const auto strategy = s.get<std::string>("strategy", "random");
    if (strategy == "random") {
        out.variant = RandomSampling{};
    } else if (strategy == "oversampling") {
        Oversampling o;
        o.unpriv_share = s.get("unpriv_share", o.unpriv_share);
        out.variant = o;
    } else if (strategy == "rank_based") {
        RankBasedSampling r;
        r.decay = s.get("decay", r.decay);
        r.floor = s.get("floor", r.floor);
        out.variant = r;
    } else {
        throw InvalidInput(s.field("strategy") + ": expected random, oversampling or rank_based");
    }
    s.finish();
    return out;
}

Postprocess parse_postprocess(const json& value, const std::string& path) {
    if (value.is_null() || (value.is_string() && value.get<std::string>() == "none")) {
        return NoPostprocess{};
    }
    Section s(value, path);
    const auto name = s.require<std::string>("method");
    Postprocess out;
    if (name == "none") {
        out = NoPostprocess{};
    } else if (name == "fair") {
        FairConfig f;
        f.p = s.get("p", f.p);
        f.alpha = s.get("alpha", f.alpha);
        if (s.has("k")) {
            f.k = s.require<std::size_t>("k");
        }
        const auto policy = s.get<std::string>("on_exhausted", "fail");
        if (policy == "fail") {
            f.exhaustion = FairExhaustion::Fail;
        } else if (policy == "fill") {
            f.exhaustion = FairExhaustion::Fill;
        } else {
            throw InvalidInput(s.field("on_exhausted") + ": expected fail or fill");
        }
        out = f;
    } else if (name == "epira") {
        EpiraConfig e;
        e.bnd = s.get("bnd", e.bnd);
        e.max_swaps = s.get("max_swaps", e.max_swaps);
        out = e;
    } else {
        throw InvalidInput(s.field("method") + ": expected none, fair or epira");
    }
    s.finish();
    return out;
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) {
        return path.lexically_normal().string();
    }
    return (base / path).lexically_normal().string();
}

SyntheticMode parse_synthetic(Section s) {
    SyntheticMode m;
    m.n = s.get("n", m.n);
    m.unpriv_fraction = s.get("unpriv_fraction", m.unpriv_fraction);
    const bool cal = s.has("calibration");
    const bool dist = s.has("distribution");
    if (cal == dist) {
        throw InvalidInput(s.path() + ": give exactly one of calibration or distribution");
    }
    if (cal) {
        Section c = s.child("calibration");
        CalibratedDistribution d;
        d.target.p_stronger = c.require<double>("p_stronger");
        d.target.p_discr = c.require<double>("p_discr");
        const auto points = c.get<std::size_t>("quadrature_points", 64);
        if (points < 2 || points > 512) {
            throw InvalidInput(c.field("quadrature_points") + ": must lie in [2, 512]");
        }
        d.options.quadrature_points = static_cast<int>(points);
        d.options.tolerance = c.get("tolerance", d.options.tolerance);
        d.options.sigma_bias_ratio = c.get("sigma_bias_ratio", d.options.sigma_bias_ratio);
        c.finish();
        m.distribution = d;
    } else {
        Section d = s.child("distribution");
        DistributionSpec spec;
        spec.mu_skill = d.get("mu_skill", spec.mu_skill);
        spec.sigma_skill = d.get("sigma_skill", spec.sigma_skill);
        spec.mu_bias = d.get("mu_bias", spec.mu_bias);
        spec.sigma_bias = d.get("sigma_bias", spec.sigma_bias);
        d.finish();
        m.distribution = spec;
    }
    s.finish();
    return m;
}

EmpiricalMode parse_empirical(Section s, const std::filesystem::path& base) {
    EmpiricalMode m;
    m.nodes_path = resolve(base, s.require<std::string>("nodes_path"));
    m.edges_path = resolve(base, s.require<std::string>("edges_path"));
    m.budget_per_iteration = s.get("budget_per_iteration", m.budget_per_iteration);
    s.finish();
    return m;
}

json method_json(const RecoveryMethod& method) {
    json j;
    j["method"] = std::string(method_name(method));
    if (const auto* rc = std::get_if<RankCentrality>(&method)) {
        j["max_iters"] = rc->max_iters;
        j["tol"] = rc->tol;
        j["regularization"] = rc->regularization;
        j["direct_limit"] = rc->direct_limit;
        j["normalization"] = rc->normalization == DegreeNormalization::MaxDegree ? "max_degree" : "per_node";
    } else if (const auto* sr = std::get_if<SerialRank>(&method)) {
        j["dense_limit"] = sr->dense_limit;
        j["lanczos_steps"] = sr->lanczos_steps;
        j["max_restarts"] = sr->max_restarts;
        j["tol"] = sr->tol;
    } else if (const auto* fp = std::get_if<FairPageRank>(&method)) {
        j["phi"] = fp->phi;
        j["damping"] = fp->damping;
        j["max_iters"] = fp->max_iters;
        j["tol"] = fp->tol;
    }
    return j;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    Section top(doc, "");
    ExperimentConfig config;
    // Report typos before complaining about missing fields.
    static const std::set<std::string> known{"mode",       "sampling", "recovery", "postprocess",
                                             "iterations", "trials",   "checkpoint_every", "seed", "recover_every", "feedback", "postprocess_feedback"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) {
            throw InvalidInput(key + ": unknown key");
        }
    }

    Section mode = top.child("mode");
    const bool synthetic = mode.has("synthetic");
    const bool empirical = mode.has("empirical");
    if (synthetic == empirical) {
        throw InvalidInput("mode: give exactly one of synthetic or empirical");
    }
    if (synthetic) {
        config.mode = parse_synthetic(mode.child("synthetic"));
    } else {
        config.mode = parse_empirical(mode.child("empirical"), base_dir);
    }
    mode.finish();

    if (top.has("sampling")) {
        config.sampling = parse_sampling(top.child("sampling"));
    }
    config.recovery = parse_method(top.raw("recovery"), "recovery");
    if (top.has("postprocess")) {
        config.postprocess = parse_postprocess(top.raw("postprocess"), "postprocess");
    }
    config.iterations = top.get("iterations", config.iterations);
    config.trials = top.get("trials", config.trials);
    config.checkpoint_every = top.get("checkpoint_every", config.checkpoint_every);
    config.seed = top.get("seed", config.seed);
    const auto schedule = top.get<std::string>("recover_every", "iteration");
    if (schedule == "iteration") {
        config.recover_every = RecoverySchedule::EveryIteration;
    } else if (schedule == "checkpoint") {
        config.recover_every = RecoverySchedule::Checkpoints;
    } else {
        throw InvalidInput("recover_every: expected iteration or checkpoint");
    }
    if (top.has("feedback") && !top.raw("feedback").is_null()) {
        config.feedback = parse_method(top.raw("feedback"), "feedback");
    }
    config.postprocess_feedback = top.get("postprocess_feedback", config.postprocess_feedback);
    top.finish();

    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
    return parse_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& config) {
    json j;
    if (const auto* syn = std::get_if<SyntheticMode>(&config.mode)) {
        json s;
        s["n"] = syn->n;
        s["unpriv_fraction"] = syn->unpriv_fraction;
        if (const auto* cal = std::get_if<CalibratedDistribution>(&syn->distribution)) {
            s["calibration"] = {{"p_stronger", cal->target.p_stronger},
                                {"p_discr", cal->target.p_discr},
                                {"quadrature_points", cal->options.quadrature_points},
                                {"tolerance", cal->options.tolerance},
                                {"sigma_bias_ratio", cal->options.sigma_bias_ratio}};
        } else {
            const auto& d = std::get<DistributionSpec>(syn->distribution);
            s["distribution"] = {{"mu_skill", d.mu_skill},
                                 {"sigma_skill", d.sigma_skill},
                                 {"mu_bias", d.mu_bias},
                                 {"sigma_bias", d.sigma_bias}};
        }
        j["mode"]["synthetic"] = s;
    } else {
        const auto& e = std::get<EmpiricalMode>(config.mode);
        j["mode"]["empirical"] = {{"nodes_path", e.nodes_path},
                                  {"edges_path", e.edges_path},
                                  {"budget_per_iteration", e.budget_per_iteration}};
    }

    json s;
    s["sample_fraction"] = config.sampling.sample_fraction;
    if (const auto* o = std::get_if<Oversampling>(&config.sampling.variant)) {
        s["strategy"] = "oversampling";
        s["unpriv_share"] = o->unpriv_share;
    } else if (const auto* r = std::get_if<RankBasedSampling>(&config.sampling.variant)) {
        s["strategy"] = "rank_based";
        s["decay"] = r->decay;
        s["floor"] = r->floor;
    } else {
        s["strategy"] = "random";
    }
    j["sampling"] = s;

    j["recovery"] = method_json(config.recovery);
    if (const auto* f = std::get_if<FairConfig>(&config.postprocess)) {
        j["postprocess"] = {{"method", "fair"},
                            {"p", f->p},
                            {"alpha", f->alpha},
                            {"on_exhausted", f->exhaustion == FairExhaustion::Fail ? "fail" : "fill"}};
        if (f->k) {
            j["postprocess"]["k"] = *f->k;
        }
    } else if (const auto* e = std::get_if<EpiraConfig>(&config.postprocess)) {
        j["postprocess"] = {{"method", "epira"}, {"bnd", e->bnd}, {"max_swaps", e->max_swaps}};
    } else {
        j["postprocess"] = {{"method", "none"}};
    }
    j["iterations"] = config.iterations;
    j["trials"] = config.trials;
    j["checkpoint_every"] = config.checkpoint_every;
    j["seed"] = config.seed;
    j["recover_every"] = config.recover_every == RecoverySchedule::EveryIteration ? "iteration" : "checkpoint";
    j["feedback"] = config.feedback ? method_json(*config.feedback) : json(nullptr);
    j["postprocess_feedback"] = config.postprocess_feedback;
    return j;
}

std::string canonical(const ExperimentConfig& config) {
    return to_json(config).dump();
}

std::string fingerprint(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

} // namespace fairrank::cli
