// phaselab: numerical laboratory for a quartic-corrected Sherrington-
// Kirkpatrick model with biased i.i.d. spins. One verb per module:
//   enumerate  exact per-sample partition functions (Gray-code sweep)
//   moments    annealed first/second moments and fluctuation constants
//   bounds     entropy, m*, AT boundary, envelope, tail and maximum bounds
//   sweep      (beta, m, N) phase-plane sweep with theory overlays
//   mc         parallel-tempering Monte-Carlo free energy estimate
//   report     re-emit CSV/plot outputs from a stored report.json
//
// Exit codes: 0 success, 1 user error, 2 resource/budget refusal.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phaselab/disorder.hpp"
#include "phaselab/enumeration.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/moments.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/sweep.hpp"
#include "phaselab/theory.hpp"
#include "phaselab/version.hpp"

using nlohmann::json;
using namespace phaselab;

namespace {

json value_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json value_or_null(const std::optional<double>& v) {
    return v ? value_or_null(*v) : json(nullptr);
}

void print_error_block(const char* kind, const std::string& message) {
    json block;
    block["error"] = {{"type", kind}, {"message", message}};
    std::cerr << block.dump(2) << '\n';
}

std::set<OutputKind> parse_outputs(const std::vector<std::string>& names) {
    std::set<OutputKind> out;
    for (const auto& name : names) {
        if (name == "csv")
            out.insert(OutputKind::csv);
        else if (name == "json")
            out.insert(OutputKind::json);
        else if (name == "plot")
            out.insert(OutputKind::plot);
        else
            throw std::invalid_argument("unknown output kind: " + name);
    }
    return out;
}

struct EnumerateArgs {
    int n = 10;
    double beta = 1.0, m = 0.0, eps = 0.05;
    std::uint64_t seed = 1;
    bool corr = false;
    int cap = kDefaultEnumerationCap;
};

int run_enumerate(const EnumerateArgs& a) {
    const ModelParams params(a.n, a.beta, a.m, a.eps);
    EnumerateOptions opt;
    opt.want_corr = a.corr;
    opt.max_n = a.cap;
    const auto r = enumerate(sample_couplings(a.n, a.seed), params, opt);
    json out = {{"n", a.n},
                {"beta", a.beta},
                {"m", a.m},
                {"eps", a.eps},
                {"seed", a.seed},
                {"log_z", r.log_z},
                {"log_z_band", value_or_null(r.log_z_band)},
                {"log_z_complement", value_or_null(r.log_z_complement)},
                {"band_max_field", value_or_null(r.band_max_field)},
                {"band_derivative", value_or_null(r.band_derivative_value)}};
    if (r.corr) out["overlap_second_moment"] = overlap_second_moment(r);
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct MomentsArgs {
    int n = 100;
    double beta = 0.5, m = 0.0;
};

int run_moments(const MomentsArgs& a) {
    const ModelParams params(a.n, a.beta, a.m, 0.0);
    const MomentReport report = second_moment_rate(params);
    json out = {{"n", a.n},
                {"beta", a.beta},
                {"m", a.m},
                {"first_moment", report.first_moment},
                {"second_moment_log", value_or_null(report.second_moment_log)},
                {"rate_n", value_or_null(report.rate_n)},
                {"asymptotic_variance_term", value_or_null(report.asymptotic_variance_term)},
                {"at_indicator", report.at_indicator}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct BoundsArgs {
    double m = 0.9;
    std::optional<double> beta;
    std::optional<int> n;
    double eps = 0.05;
    std::optional<double> t;
    bool continuum = false;
};

int run_bounds(const BoundsArgs& a) {
    const TheoryOverlay overlay = theory_overlay(a.m);
    json out = {{"m", a.m},
                {"m_star", solve_m_star()},
                {"i_m", overlay.i_m},
                {"beta_at", overlay.beta_at},
                {"beta_c", overlay.beta_c}};
    if (overlay.window)
        out["window"] = {{"lo", overlay.window->lo}, {"hi", overlay.window->hi}};
    else
        out["window"] = nullptr;
    if (a.beta) {
        out["beta"] = *a.beta;
        out["envelope"] = envelope(*a.beta, a.m);
        const double crit = *a.beta * *a.beta * (1 - a.m * a.m) * (1 - a.m * a.m);
        out["at_member"] = crit <= 1.0;
    }
    if (a.n) {
        out["n"] = *a.n;
        out["eps"] = a.eps;
        out["band_tail_bound"] = band_tail_bound(*a.n, a.m, a.eps);
        out["exact_band_complement_mass"] = exact_band_complement_mass(*a.n, a.m, a.eps);
        MaxBoundOptions opt;
        opt.t = a.t;
        opt.continuum = a.continuum;
        const auto bound = max_bound(*a.n, a.m, a.eps, opt);
        out["max_bound"] = value_or_null(bound.value);
        out["max_bound_band_empty"] = bound.band_empty;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

json estimate_to_json(const QuenchedEstimate& est) {
    return {{"n", est.n},
            {"beta", est.beta},
            {"m", est.m},
            {"eps", est.eps},
            {"mean_f", est.mean_f},
            {"stderr", est.std_error},
            {"samples", est.per_sample.size()},
            {"seed", est.base_seed},
            {"method", method_name(est.method)},
            {"restricted", est.restricted},
            {"per_sample", est.per_sample}};
}

struct McArgs {
    int n = 64;
    double beta = 0.5, m = 0.0, eps = 0.05;
    int samples = 50;
    std::uint64_t seed = 1;
    int parallelism = 1;
    int sweeps = 2500;
    double burn_in = 0.2;
};

int run_mc(const McArgs& a) {
    const ModelParams params(a.n, a.beta, a.m, a.eps);
    DisorderPlan plan{.samples = a.samples, .base_seed = a.seed, .parallelism = a.parallelism,
                      .method = Method::monte_carlo, .mc = default_mc_config(a.beta)};
    plan.mc->sweeps_per_rung = a.sweeps;
    plan.mc->burn_in_fraction = a.burn_in;
    std::cout << estimate_to_json(mc_free_energy(params, plan)).dump(2) << '\n';
    return 0;
}

struct SweepArgs {
    std::vector<double> betas;
    std::vector<double> ms;
    std::vector<int> ns;
    double eps = 0.05;
    int samples = 100;
    std::uint64_t seed = 1;
    int parallelism = 1;
    std::string method = "exact";
    bool restricted = false;
    std::string out_dir;
    double budget = kDefaultWorkBudget;
    std::vector<std::string> outputs = {"csv", "json"};
    int cap = kDefaultEnumerationCap;
};

int run_sweep_cmd(const SweepArgs& a) {
    SweepSpec spec;
    spec.beta_grid = a.betas;
    spec.m_grid = a.ms;
    spec.n_list = a.ns;
    spec.eps = a.eps;
    spec.restricted = a.restricted;
    spec.budget = a.budget;
    spec.outputs = parse_outputs(a.outputs);
    const auto method = parse_method(a.method);
    if (!method) throw std::invalid_argument("unknown method: " + a.method);
    spec.plan = DisorderPlan{.samples = a.samples, .base_seed = a.seed,
                             .parallelism = a.parallelism, .method = *method,
                             .mc = std::nullopt, .enumeration_cap = a.cap};
    const PhaseGrid grid = run_sweep(spec);
    const auto written = write_report(grid, a.out_dir);
    json out = {{"cells", grid.cells.size()},
                {"work_estimate", grid.work_estimate},
                {"budget", spec.budget},
                {"written", written}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct ReportArgs {
    std::string in_path;
    std::string out_dir;
    std::vector<std::string> outputs = {"csv", "json", "plot"};
};

int run_report(const ReportArgs& a) {
    const auto written = rewrite_report(a.in_path, a.out_dir, parse_outputs(a.outputs));
    json out = {{"written", written}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

void add_config(CLI::App* cmd) {
    static std::string sink;
    cmd->add_option("--config", sink, "flat key=value file; command line overrides it");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool truthy(std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    return v == "1" || v == "true" || v == "yes" || v == "on";
}

// Flat key=value run manifests: every key that is absent from the explicit
// command line is injected as "--key value..." ahead of the explicit
// arguments, so the command line always overrides the file. List values
// split on whitespace or commas; flag keys take true/false.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return !a.empty() && a[0] != '-';
    });
    if (sub_it == args.end()) return args;
    const CLI::App* sub = nullptr;
    for (const auto* candidate : app.get_subcommands(nullptr))
        if (candidate->get_name() == *sub_it) sub = candidate;
    if (!sub) return args;

    std::string config_path;
    for (auto it = sub_it + 1; it != args.end(); ++it) {
        if (*it == "--config" && it + 1 != args.end())
            config_path = *(it + 1);
        else if (it->rfind("--config=", 0) == 0)
            config_path = it->substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot read config file: " + config_path);

    std::vector<std::string> present;
    for (auto it = sub_it + 1; it != args.end(); ++it)
        if (it->rfind("--", 0) == 0) present.push_back(it->substr(0, it->find('=')));

    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        const std::string key = "--" + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(present.begin(), present.end(), key) != present.end()) continue;
        const CLI::Option* opt = sub->get_option_no_throw(key);
        if (opt && opt->get_expected_min() == 0) {  // flag
            if (truthy(value)) injected.push_back(key);
            continue;
        }
        injected.push_back(key);
        std::istringstream values(value);
        std::string token;
        while (values >> token) {
            if (!token.empty() && token.back() == ',') token.pop_back();
            if (!token.empty()) injected.push_back(token);
        }
    }
    args.insert(sub_it + 1, injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kArtifactName) + " " + kArtifactVersion +
                 " - quartic-corrected SK model laboratory"};
    app.require_subcommand(1);

    EnumerateArgs ea;
    auto* enum_cmd = app.add_subcommand("enumerate", "exact log Z for one disorder sample");
    add_config(enum_cmd);
    enum_cmd->add_option("--n", ea.n, "system size")->required();
    enum_cmd->add_option("--beta", ea.beta, "inverse temperature");
    enum_cmd->add_option("--m", ea.m, "spin mean in (-1, 1)");
    enum_cmd->add_option("--eps", ea.eps, "band half-width");
    enum_cmd->add_option("--seed", ea.seed, "disorder seed");
    enum_cmd->add_flag("--corr", ea.corr, "accumulate the two-point Gibbs matrix");
    enum_cmd->add_option("--cap", ea.cap, "enumeration cap");

    MomentsArgs ma;
    auto* moments_cmd = app.add_subcommand("moments", "annealed moments E Z and E Z^2");
    add_config(moments_cmd);
    moments_cmd->add_option("--n", ma.n, "system size")->required();
    moments_cmd->add_option("--beta", ma.beta, "inverse temperature");
    moments_cmd->add_option("--m", ma.m, "spin mean in (-1, 1)");

    BoundsArgs ba;
    auto* bounds_cmd = app.add_subcommand("bounds", "theory constants and bounds");
    add_config(bounds_cmd);
    bounds_cmd->add_option("--m", ba.m, "spin mean in (-1, 1)")->required();
    bounds_cmd->add_option("--beta", ba.beta, "evaluate the envelope at this beta");
    bounds_cmd->add_option("--n", ba.n, "evaluate tail/maximum bounds at this size");
    bounds_cmd->add_option("--eps", ba.eps, "band half-width for the bounds");
    bounds_cmd->add_option("--t", ba.t, "tilt parameter for the maximum bound");
    bounds_cmd->add_flag("--continuum", ba.continuum, "maximize over the continuum band");

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "(beta, m, N) phase-plane sweep");
    add_config(sweep_cmd);
    sweep_cmd->add_option("--beta", sa.betas, "beta grid")->required()->expected(-1);
    sweep_cmd->add_option("--m", sa.ms, "m grid")->required()->expected(-1);
    sweep_cmd->add_option("--n", sa.ns, "system sizes")->required()->expected(-1);
    sweep_cmd->add_option("--eps", sa.eps, "band half-width");
    sweep_cmd->add_option("--samples", sa.samples, "disorder samples per cell");
    sweep_cmd->add_option("--seed", sa.seed, "base seed");
    sweep_cmd->add_option("--parallelism", sa.parallelism, "worker threads")
        ->envname("PHASELAB_PARALLELISM");
    sweep_cmd->add_option("--method", sa.method, "exact or monte_carlo");
    sweep_cmd->add_flag("--restricted", sa.restricted, "band-restricted free energies");
    sweep_cmd->add_option("--out", sa.out_dir, "output directory")->required();
    sweep_cmd->add_option("--budget", sa.budget, "work budget in flip-steps");
    sweep_cmd->add_option("--outputs", sa.outputs, "any of: csv json plot")->expected(-1);
    sweep_cmd->add_option("--cap", sa.cap, "enumeration cap");

    McArgs mca;
    auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo quenched free energy");
    add_config(mc_cmd);
    mc_cmd->add_option("--n", mca.n, "system size")->required();
    mc_cmd->add_option("--beta", mca.beta, "target inverse temperature")->required();
    mc_cmd->add_option("--m", mca.m, "spin mean in (-1, 1)");
    mc_cmd->add_option("--eps", mca.eps, "band half-width (echoed only)");
    mc_cmd->add_option("--samples", mca.samples, "disorder samples");
    mc_cmd->add_option("--seed", mca.seed, "base seed");
    mc_cmd->add_option("--parallelism", mca.parallelism, "worker threads")
        ->envname("PHASELAB_PARALLELISM");
    mc_cmd->add_option("--sweeps", mca.sweeps, "sweeps per ladder rung");
    mc_cmd->add_option("--burn-in", mca.burn_in, "burn-in fraction of sweeps");

    ReportArgs ra;
    auto* report_cmd = app.add_subcommand("report", "re-emit outputs from report.json");
    add_config(report_cmd);
    report_cmd->add_option("--in", ra.in_path, "existing report.json")->required();
    report_cmd->add_option("--out", ra.out_dir, "output directory")->required();
    report_cmd->add_option("--outputs", ra.outputs, "any of: csv json plot")->expected(-1);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        print_error_block("user", e.what());
        return 1;
    }

    try {
        if (enum_cmd->parsed()) return run_enumerate(ea);
        if (moments_cmd->parsed()) return run_moments(ma);
        if (bounds_cmd->parsed()) return run_bounds(ba);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sa);
        if (mc_cmd->parsed()) return run_mc(mca);
        if (report_cmd->parsed()) return run_report(ra);
    } catch (const resource_error& e) {
        print_error_block("resource", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        print_error_block("user", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error_block("error", e.what());
        return 1;
    }
    return 0;
}
