#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "tbound/cluster_transduce.hpp"
#include "tbound/concentration.hpp"
#include "tbound/exact_hypergeom.hpp"
#include "tbound/pac_bayes.hpp"
#include "tbound/prior_forge.hpp"
#include "tbound/validation.hpp"

namespace tbound::cli {

namespace {

// CSV rows are assembled here and written with LF endings only.
class Csv {
public:
    explicit Csv(std::ostream& out) : out_(out) {}

    template <class... T>
    void row(const T&... cells)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v)
    {
        return std::to_string(v);
    }

    std::ostream& out_;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    if (s.empty())
        return out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(item);
    if (s.back() == sep)
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const char* what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw DomainError(std::string("cannot parse ") + what + ": '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, const char* what)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw DomainError(std::string("cannot parse ") + what + ": '" + s + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& s, const char* what)
{
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        out.push_back(parse_double(item, what));
    return out;
}

std::int64_t test_size(const std::string& rule, std::int64_t m)
{
    if (rule == "sqrt") {
        auto u = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m)));
        while (u * u < m)
            ++u;
        while (u > 1 && (u - 1) * (u - 1) >= m)
            --u;
        return u;
    }
    const auto colon = rule.find(':');
    require(colon != std::string::npos, "u-rule must be multiple:A, sqrt or const:V");
    const auto kind = rule.substr(0, colon);
    const auto arg = rule.substr(colon + 1);
    if (kind == "multiple") {
        const double a = parse_double(arg, "u-rule multiple");
        require(a > 0.0, "u-rule multiple must be positive");
        const auto u = static_cast<std::int64_t>(std::llround(a * static_cast<double>(m)));
        require(u >= 1, "u-rule gives u < 1");
        return u;
    }
    if (kind == "const") {
        const auto u = parse_int(arg, "u-rule const");
        require(u >= 1, "u-rule const must be >= 1");
        return u;
    }
    throw DomainError("u-rule must be multiple:A, sqrt or const:V");
}

DeviationKind parse_kind(const std::string& v)
{
    if (v == "relative")
        return DeviationKind::relative;
    if (v == "absolute")
        return DeviationKind::absolute;
    throw DomainError("variant must be relative or absolute");
}

const std::vector<std::string> kCurveBounds{"vapnik_rel", "vapnik_abs", "serfling", "cor23", "eq18", "thm17", "thm18"};

// One named bound at one grid point. Gibbs bounds use D = ln(1/p).
BoundValue curve_bound(const std::string& name, std::int64_t m, std::int64_t u, double emp, double delta, double p)
{
    if (name == "vapnik_rel" || name == "vapnik_abs") {
        const auto kind = name == "vapnik_rel" ? DeviationKind::relative : DeviationKind::absolute;
        return vapnik_bound(emp, critical_deviation(p, delta, m, u, kind), m, u);
    }
    BoundInputs in;
    in.m = m;
    in.u = u;
    in.delta = delta;
    in.emp_risk = emp;
    in.complexity = PriorMass{p};
    if (name == "serfling" || name == "thm22")
        return deterministic_bound(in, DeterministicVariant::serfling);
    if (name == "cor23")
        return deterministic_bound(in, DeterministicVariant::direct);
    if (name == "eq18")
        return deterministic_bound(in, DeterministicVariant::reduction);
    in.validate();
    in.complexity = KlComplexity{-std::log(p)};
    if (name == "thm17")
        return gibbs_bound(in, GibbsVariant::reduction);
    if (name == "thm18")
        return gibbs_bound(in, GibbsVariant::direct);
    throw DomainError("unknown bound: " + name);
}

struct Options {
    std::int64_t m = 100;
    std::int64_t u = 100;
    double delta = -1.0;  // 0.05 for transduce and validate, else 0.01
    double emp_risk = 0.0;
    double prior_mass = 1.0;
    double kl = -1.0;
    double loss_bound = 1.0;
    std::string bound;
    std::string variant;
    std::uint64_t seed = 1;
    std::int64_t trials = 10000;
    std::string clusterer = "kmeans";
    std::int64_t max_clusters = 10;
    std::int64_t k_ensemble = 1;
    std::int64_t s = 1;
    std::int64_t tau = 1;
    std::string bounds = "vapnik_rel,vapnik_abs,serfling,cor23,eq18,thm17,thm18";
    std::string m_grid;
    std::string u_rule = "multiple:1";
    std::string p_grid = "0.01,0.02,0.05,0.1,0.2,0.5,1";
    std::string features;
    std::string labels;
    std::string predictions_path;
    std::string certificate_path;
    std::string scenario;
    std::int64_t n = 40;
    std::int64_t hypotheses = 16;
    std::uint64_t instance_seed = 7;
    unsigned threads = 0;
    bool exhaustive = false;
    std::int64_t ones = 30;
    std::string eps_grid = "0,0.05,0.1,0.15,0.2";
    std::string format = "csv";
};

void run_curve(const Options& o, std::ostream& out)
{
    const auto names = split(o.bounds, ',');
    for (const auto& name : names)
        require(std::find(kCurveBounds.begin(), kCurveBounds.end(), name) != kCurveBounds.end(),
                "unknown bound in --bounds");
    std::vector<std::int64_t> grid;
    for (const auto& item : split(o.m_grid, ','))
        grid.push_back(parse_int(item, "m-grid"));
    require(!grid.empty() || names.empty(), "--m-grid is required");
    for (std::size_t i = 1; i < grid.size(); ++i)
        require(grid[i] > grid[i - 1], "m-grid must be strictly increasing");
    Csv csv(out);
    csv.row("m", "u", "bound", "raw", "clamped", "valid");
    if (names.empty())
        return;
    for (auto m : grid) {
        const auto u = test_size(o.u_rule, m);
        for (const auto& name : names) {
            const auto b = curve_bound(name, m, u, o.emp_risk, o.delta, o.prior_mass);
            csv.row(m, u, name, b.raw, b.clamped, b.valid);
        }
    }
}

void run_prior_sweep(const Options& o, std::ostream& out)
{
    const auto grid = parse_doubles(o.p_grid, "p-grid");
    require(!grid.empty(), "--p-grid is empty");
    Csv csv(out);
    csv.row("p", "vapnik_rel_eps_star", "vapnik_abs_eps_star", "serfling_complexity");
    for (double p : grid) {
        require(p > 0.0 && p <= 1.0, "p values must lie in (0,1]");
        const double rel = critical_deviation(p, o.delta, o.m, o.u, DeviationKind::relative).value;
        const double abs = critical_deviation(p, o.delta, o.m, o.u, DeviationKind::absolute).value;
        BoundInputs in;
        in.m = o.m;
        in.u = o.u;
        in.delta = o.delta;
        in.complexity = PriorMass{p};
        csv.row(p, rel, abs, deterministic_bound(in, DeterministicVariant::serfling).raw);
    }
}

void run_eval(const Options& o, std::ostream& out)
{
    require(!o.bound.empty(), "--bound is required");
    BoundInputs in;
    in.m = o.m;
    in.u = o.u;
    in.delta = o.delta;
    in.emp_risk = o.emp_risk;
    in.loss_bound = o.loss_bound;
    in.complexity = PriorMass{o.prior_mass};
    BoundValue b;
    const auto& name = o.bound;
    if (name == "vapnik_rel" || name == "vapnik_abs") {
        const auto kind = name == "vapnik_rel" ? DeviationKind::relative : DeviationKind::absolute;
        b = vapnik_bound(o.emp_risk, critical_deviation(o.prior_mass, o.delta, o.m, o.u, kind), o.m, o.u);
    } else if (name == "serfling" || name == "thm22") {
        b = deterministic_bound(in, DeterministicVariant::serfling);
    } else if (name == "cor23") {
        b = deterministic_bound(in, DeterministicVariant::direct);
    } else if (name == "eq18") {
        b = deterministic_bound(in, DeterministicVariant::reduction);
    } else if (name == "thm17" || name == "thm18") {
        require(o.kl >= 0.0, "--kl is required for Gibbs bounds");
        in.complexity = KlComplexity{o.kl};
        b = gibbs_bound(in, name == "thm17" ? GibbsVariant::reduction : GibbsVariant::direct);
    } else if (name == "graepel") {
        b = graepel_compression_bound(o.emp_risk, o.m, o.s, o.delta);
    } else if (name == "compression") {
        require(o.variant.empty() || o.variant == "printed" || o.variant == "derived",
                "compression variant must be printed or derived");
        b = compression_bound(o.emp_risk, o.s, o.m, o.u, o.delta,
                              o.variant == "printed" ? CompressionVariant::printed : CompressionVariant::derived);
    } else if (name == "clustering") {
        require(o.variant.empty() || o.variant == "printed" || o.variant == "exact",
                "clustering variant must be printed or exact");
        b = clustering_bound(o.emp_risk, o.tau, o.max_clusters, o.m, o.u, o.delta, o.k_ensemble,
                             o.variant == "printed" ? ClusteringVariant::printed : ClusteringVariant::exact);
    } else {
        throw DomainError("unknown bound: " + name);
    }
    Csv csv(out);
    csv.row("bound", "raw", "clamped", "valid");
    csv.row(b.name, b.raw, b.clamped, b.valid);
}

void run_epsilon_star(const Options& o, std::ostream& out)
{
    const auto kind = parse_kind(o.variant.empty() ? "relative" : o.variant);
    const auto e = critical_deviation(o.prior_mass, o.delta, o.m, o.u, kind);
    Csv csv(out);
    csv.row("variant", "value", "achieving_k");
    csv.row(to_string(e.kind), e.value, e.achieving_k);
}

std::vector<std::string> read_lines(const std::string& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ("cannot open " + path).c_str());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            lines.push_back(line);
    }
    return lines;
}

Dataset read_features(const std::string& path)
{
    std::vector<std::vector<double>> points;
    for (const auto& line : read_lines(path))
        points.push_back(parse_doubles(line, "feature value"));
    require(!points.empty(), "feature file is empty");
    return Dataset(std::move(points));
}

LabeledSubset read_labels(const std::string& path, std::int64_t population)
{
    std::vector<std::int64_t> ids;
    std::vector<std::int8_t> labels;
    for (const auto& line : read_lines(path)) {
        const auto cells = split(line, ',');
        require(cells.size() == 2, "label rows must be id,label");
        const auto id = parse_int(cells[0], "label id");
        require(id >= 0 && id < population, ("label file references unknown id " + cells[0]).c_str());
        const auto y = parse_int(cells[1], "label");
        require(y == 1 || y == -1, "labels must be +1 or -1");
        ids.push_back(id);
        labels.push_back(static_cast<std::int8_t>(y));
    }
    return LabeledSubset(ids, labels, population);
}

nlohmann::ordered_json certificate_json(const Certificate& c)
{
    nlohmann::ordered_json j;
    j["chosen_tau"] = c.chosen_tau;
    j["clusterer_id"] = c.clusterer_id;
    j["clusterer"] = c.clusterer_name;
    j["emp_risk"] = c.emp_risk;
    j["bound_name"] = c.bound_name;
    j["bound_value"] = c.bound.raw;
    j["bound_clamped"] = c.bound.clamped;
    j["delta"] = c.delta;
    j["c"] = c.c;
    j["k_ensemble"] = c.k_ensemble;
    j["m"] = c.m;
    j["u"] = c.u;
    auto preds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.test_ids.size(); ++i)
        preds.push_back({{"id", c.test_ids[i]}, {"label", c.predictions[i]}});
    j["predictions"] = std::move(preds);
    return j;
}

void run_transduce(const Options& o, std::ostream& out)
{
    require(!o.features.empty() && !o.labels.empty(), "--features and --labels are required");
    const auto data = read_features(o.features);
    const auto labeled = read_labels(o.labels, data.size());
    TransduceConfig cfg;
    cfg.algorithms.clear();
    for (const auto& name : split(o.clusterer, ','))
        cfg.algorithms.push_back(parse_cluster_algorithm(name));
    cfg.c = o.max_clusters;
    cfg.delta = o.delta;
    cfg.bound = parse_cluster_bound(o.bound.empty() ? "cor27_exact" : o.bound);
    cfg.seed = o.seed;
    const auto cert = transduce(data, labeled, cfg);

    std::ostringstream preds;
    Csv csv(preds);
    csv.row("id", "label");
    for (std::size_t i = 0; i < cert.test_ids.size(); ++i)
        csv.row(cert.test_ids[i], static_cast<int>(cert.predictions[i]));
    const std::string doc = certificate_json(cert).dump(2) + "\n";

    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        require(static_cast<bool>(f), ("cannot write " + path).c_str());
        f << text;
    };
    if (o.predictions_path.empty())
        out << preds.str();
    else
        write(o.predictions_path, preds.str());
    if (o.certificate_path.empty())
        out << doc;
    else
        write(o.certificate_path, doc);
}

void report_row(Csv& csv, const McReport& r)
{
    csv.row(r.label, r.trials, r.violations, r.boundary_hits, r.empirical, r.analytic, r.tolerance, r.passed);
}

void run_validate(const Options& o, std::ostream& out)
{
    require(!o.scenario.empty(), "--scenario is required");
    const auto scenario = parse_validity_scenario(o.scenario);
    require(o.trials >= 1 || o.exhaustive, "--trials must be >= 1");
    ValidityInstance inst;
    if (scenario == ValidityScenario::clustering) {
        inst = two_blob_instance(o.max_clusters, parse_cluster_bound(o.bound.empty() ? "cor27_exact" : o.bound));
    } else {
        inst = random_labeling_instance(o.n, o.m, o.hypotheses, o.instance_seed);
    }
    const auto r = o.exhaustive ? exhaustive_bound_validity(scenario, inst, o.delta)
                                : mc_bound_validity(scenario, inst, o.delta, o.trials, o.seed, o.threads);
    Csv csv(out);
    csv.row("scenario", "trials", "violations", "boundary_hits", "empirical", "analytic", "tolerance", "passed");
    report_row(csv, r);
}

void run_mc_concentration(const Options& o, std::ostream& out)
{
    require(o.ones >= 0 && o.ones <= o.n, "--ones must lie in [0, n]");
    std::vector<std::int8_t> pop(static_cast<std::size_t>(o.n), 0);
    for (std::int64_t i = 0; i < o.ones; ++i)
        pop[static_cast<std::size_t>(i)] = 1;
    const auto rows = mc_concentration(pop, o.m, parse_doubles(o.eps_grid, "eps-grid"), o.trials, o.seed, o.threads);
    Csv csv(out);
    csv.row("eps", "trials", "hits", "empirical", "exact_tail", "tolerance", "hoeffding_kl", "hoeffding_squared",
            "serfling", "direct", "agrees", "dominated");
    for (const auto& r : rows)
        csv.row(r.eps, r.frequency.trials, r.frequency.violations, r.frequency.empirical, r.exact_tail,
                r.frequency.tolerance, r.hoeffding_kl, r.hoeffding_squared, r.serfling, r.direct, r.agrees,
                r.dominated);
}

}  // namespace

std::string format_number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Transductive risk bounds: evaluation, curves, validation and cluster-based transduction", "tbound"};
    app.require_subcommand(1);
    Options o;

    auto sizes = [&](CLI::App* c) {
        c->add_option("--m", o.m, "training set size");
        c->add_option("--u", o.u, "test set size");
        c->add_option("--delta", o.delta, "confidence parameter");
    };
    auto fmt = [&](CLI::App* c) {
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv"}));
    };

    auto* curve = app.add_subcommand("curve", "bound values over a grid of training sizes");
    curve->add_option("--bounds", o.bounds, "comma-separated subset of " + CLI::detail::join(kCurveBounds));
    curve->add_option("--m-grid", o.m_grid, "strictly increasing comma-separated training sizes")->required();
    curve->add_option("--u-rule", o.u_rule, "multiple:A (u = A m), sqrt (u = ceil(sqrt m)) or const:V");
    curve->add_option("--emp-risk", o.emp_risk, "empirical risk");
    curve->add_option("--delta", o.delta, "confidence parameter");
    curve->add_option("--prior-mass", o.prior_mass, "prior mass p(h)");
    fmt(curve);

    auto* sweep = app.add_subcommand("prior-sweep", "complexity terms as a function of the prior mass");
    sizes(sweep);
    sweep->add_option("--p-grid", o.p_grid, "comma-separated prior masses in (0,1]");
    fmt(sweep);

    auto* eval = app.add_subcommand("eval", "evaluate one bound");
    sizes(eval);
    eval->add_option("--bound", o.bound,
                     "vapnik_rel, vapnik_abs, serfling, cor23, eq18, thm17, thm18, graepel, compression, clustering")
        ->required();
    eval->add_option("--emp-risk", o.emp_risk, "empirical risk");
    eval->add_option("--prior-mass", o.prior_mass, "prior mass p(h)");
    eval->add_option("--kl", o.kl, "KL divergence D(q||p) for Gibbs bounds");
    eval->add_option("--variant", o.variant, "printed/derived (compression), printed/exact (clustering)");
    eval->add_option("--loss-bound", o.loss_bound, "loss bound B");
    eval->add_option("--compression-size", o.s, "compression set size s");
    eval->add_option("--tau", o.tau, "number of clusters");
    eval->add_option("--max-clusters", o.max_clusters, "largest cluster count c");
    eval->add_option("--k-ensemble", o.k_ensemble, "number of clustering algorithms");
    fmt(eval);

    auto* eps = app.add_subcommand("epsilon-star", "critical deviation for a prior mass");
    sizes(eps);
    eps->add_option("--prior-mass", o.prior_mass, "prior mass p(h)");
    eps->add_option("--variant", o.variant, "relative or absolute");
    fmt(eps);

    auto* trans = app.add_subcommand("transduce", "cluster, label by majority and certify");
    trans->add_option("--features", o.features, "headerless CSV, one point per row")->required();
    trans->add_option("--labels", o.labels, "CSV rows id,label")->required();
    trans->add_option("--clusterer", o.clusterer, "comma-separated kmeans, agglomerative_single, agglomerative_complete");
    trans->add_option("--max-clusters", o.max_clusters, "largest cluster count c");
    trans->add_option("--delta", o.delta, "confidence parameter");
    trans->add_option("--bound", o.bound, "cor27_printed, cor27_exact, cor23 or vapnik_absolute");
    trans->add_option("--seed", o.seed, "seed (the clusterers are deterministic)");
    trans->add_option("--predictions", o.predictions_path, "write predictions CSV here instead of stdout");
    trans->add_option("--certificate", o.certificate_path, "write the certificate here instead of stdout");
    fmt(trans);

    auto* val = app.add_subcommand("validate", "delta-validity of a bound over random splits");
    val->add_option("--scenario", o.scenario,
                    "vapnik_det, vapnik_det_relative, serfling_det, cor23, gibbs_reduction, gibbs_direct, clustering")
        ->required();
    val->add_option("--trials", o.trials, "number of random splits");
    val->add_option("--seed", o.seed, "master seed");
    val->add_option("--delta", o.delta, "confidence parameter");
    val->add_option("--n", o.n, "full sample size (random labelings)");
    val->add_option("--m", o.m, "training size (default n/2)");
    val->add_option("--hypotheses", o.hypotheses, "number of random hypotheses");
    val->add_option("--instance-seed", o.instance_seed, "seed of the random labelings");
    val->add_option("--max-clusters", o.max_clusters, "largest cluster count c (clustering)");
    val->add_option("--bound", o.bound, "clustering bound name (clustering)");
    val->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    val->add_flag("--exhaustive", o.exhaustive, "enumerate every split instead of sampling");
    fmt(val);

    auto* conc = app.add_subcommand("mc-concentration", "sample-mean tails against the exact tail and bounds");
    conc->add_option("--n", o.n, "population size");
    conc->add_option("--ones", o.ones, "number of ones in the population");
    conc->add_option("--m", o.m, "sample size");
    conc->add_option("--eps-grid", o.eps_grid, "comma-separated deviations");
    conc->add_option("--trials", o.trials, "number of samples");
    conc->add_option("--seed", o.seed, "master seed");
    conc->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    fmt(conc);

    o.m = -1;
    o.delta = -1.0;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_input;
    }

    try {
        if (o.m < 0)
            o.m = *conc ? 50 : *val ? o.n / 2 : 100;
        if (o.delta < 0.0)
            o.delta = *val || *trans ? 0.05 : 0.01;
        if (*curve)
            run_curve(o, out);
        else if (*sweep)
            run_prior_sweep(o, out);
        else if (*eval)
            run_eval(o, out);
        else if (*eps)
            run_epsilon_star(o, out);
        else if (*trans)
            run_transduce(o, out);
        else if (*val)
            run_validate(o, out);
        else if (*conc)
            run_mc_concentration(o, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_input;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal_error;
    }
    return ok;
}

}  // namespace tbound::cli
