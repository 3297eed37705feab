#include "phaselab/disorder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "phaselab/errors.hpp"
#include "phaselab/numerics.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

namespace {

// Index-sliced parallel loop; results must be written to per-index slots so
// the outcome is independent of scheduling.
void parallel_for(int count, int parallelism, const std::function<void(int)>& body) {
    if (parallelism <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    const int n_threads = std::min(parallelism, count);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

QuenchedEstimate aggregate(std::vector<double> per_sample, const ModelParams& params,
                           const DisorderPlan& plan, bool restricted) {
    const auto stats = mean_and_stderr(per_sample);
    QuenchedEstimate est;
    est.mean_f = stats.mean;
    est.std_error = stats.std_error;
    est.per_sample = std::move(per_sample);
    est.n = params.n;
    est.beta = params.beta;
    est.m = params.m;
    est.eps = params.eps;
    est.restricted = restricted;
    est.method = plan.method;
    est.base_seed = plan.base_seed;
    return est;
}

void check_plan(const DisorderPlan& plan) {
    if (plan.samples < 1) throw std::invalid_argument("disorder plan: samples must be >= 1");
    if (plan.parallelism < 1) throw std::invalid_argument("disorder plan: parallelism must be >= 1");
}

// --- Monte-Carlo machinery -------------------------------------------------

// One Metropolis chain: spins, local fields h_i = sum_j (g_ij + g_ji)
// (sigma_j - m), the interaction double sum T = sum_ij g_ij sigma_hat_i
// sigma_hat_j, and the integer spin sum.
struct Chain {
    std::vector<std::int8_t> spins;
    std::vector<double> fields;
    double t_sum = 0.0;
    int spin_sum = 0;
};

struct McContext {
    const CouplingMatrix& g;
    int n;
    double m;
    double inv_sqrt_2n;
    double sqrt_n;
    double log_flip_from_plus;   // log((1-m)/(1+m))
    double log_flip_from_minus;  // log((1+m)/(1-m))
};

double chain_q(const McContext& ctx, const Chain& chain) {
    const double s = static_cast<double>(chain.spin_sum) / ctx.n;
    return 1.0 + ctx.m * ctx.m - 2.0 * ctx.m * s;
}

double chain_energy(const McContext& ctx, const Chain& chain, double beta) {
    const double x = chain.t_sum * ctx.inv_sqrt_2n;
    const double q = chain_q(ctx, chain);
    return beta * ctx.sqrt_n * x - 0.25 * beta * beta * ctx.n * q * q;
}

Chain init_chain(const McContext& ctx, Rng& rng) {
    Chain chain;
    const int n = ctx.n;
    chain.spins.resize(static_cast<std::size_t>(n));
    const double p_plus = 0.5 * (1.0 + ctx.m);
    for (int i = 0; i < n; ++i) {
        chain.spins[static_cast<std::size_t>(i)] = rng.uniform01() <= p_plus ? 1 : -1;
        chain.spin_sum += chain.spins[static_cast<std::size_t>(i)];
    }
    chain.fields.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += (ctx.g(i, j) + ctx.g(j, i)) * (chain.spins[static_cast<std::size_t>(j)] - ctx.m);
        chain.fields[static_cast<std::size_t>(i)] = acc;
    }
    chain.t_sum = 0.0;
    for (int i = 0; i < n; ++i)
        chain.t_sum += (chain.spins[static_cast<std::size_t>(i)] - ctx.m) *
                       chain.fields[static_cast<std::size_t>(i)];
    chain.t_sum *= 0.5;
    return chain;
}

// One sweep = n single-spin-flip proposals at uniformly random sites.
void metropolis_sweep(const McContext& ctx, Chain& chain, double beta, Rng& rng) {
    const int n = ctx.n;
    const double q_coeff = 0.25 * beta * beta * n;
    for (int step = 0; step < n; ++step) {
        const int p = rng.index(n);
        const int old_spin = chain.spins[static_cast<std::size_t>(p)];
        const double delta = -2.0 * old_spin;
        const double dt = delta * chain.fields[static_cast<std::size_t>(p)] +
                          ctx.g(p, p) * delta * delta;
        const double dx = dt * ctx.inv_sqrt_2n;
        const double q_old = chain_q(ctx, chain);
        const double s_new = static_cast<double>(chain.spin_sum + 2 * (-old_spin)) / n;
        const double q_new = 1.0 + ctx.m * ctx.m - 2.0 * ctx.m * s_new;
        const double log_ratio =
            (old_spin > 0 ? ctx.log_flip_from_plus : ctx.log_flip_from_minus) +
            beta * ctx.sqrt_n * dx - q_coeff * (q_new * q_new - q_old * q_old);
        if (log_ratio >= 0.0 || std::log(rng.uniform01()) < log_ratio) {
            chain.t_sum += dt;
            for (int i = 0; i < n; ++i)
                chain.fields[static_cast<std::size_t>(i)] += (ctx.g(i, p) + ctx.g(p, i)) * delta;
            chain.spins[static_cast<std::size_t>(p)] = static_cast<std::int8_t>(-old_spin);
            chain.spin_sum += 2 * (-old_spin);
        }
    }
}

void attempt_swap(const McContext& ctx, Chain& low, Chain& high, double beta_low,
                  double beta_high, Rng& rng) {
    const double delta = chain_energy(ctx, high, beta_low) + chain_energy(ctx, low, beta_high) -
                         chain_energy(ctx, low, beta_low) - chain_energy(ctx, high, beta_high);
    if (delta >= 0.0 || std::log(rng.uniform01()) < delta) std::swap(low, high);
}

double replica_overlap(const McContext& ctx, const Chain& a, const Chain& b) {
    const int n = ctx.n;
    int dot = 0;
    for (int i = 0; i < n; ++i)
        dot += a.spins[static_cast<std::size_t>(i)] * b.spins[static_cast<std::size_t>(i)];
    return (dot - ctx.m * (a.spin_sum + b.spin_sum) + n * ctx.m * ctx.m) / n;
}

struct ValidatedMc {
    const McConfig* config;
    std::vector<std::size_t> grid_rungs;  // ladder index of each integration node
    int burn_sweeps;
    int measured_sweeps;
};

ValidatedMc validate_mc(const ModelParams& params, const DisorderPlan& plan) {
    if (!plan.mc) throw std::invalid_argument("mc_free_energy: plan carries no Monte-Carlo config");
    const McConfig& cfg = *plan.mc;
    if (cfg.sweeps_per_rung < 1)
        throw std::invalid_argument("mc_free_energy: sweeps_per_rung must be >= 1");
    if (!(cfg.burn_in_fraction >= 0.0 && cfg.burn_in_fraction < 1.0))
        throw std::invalid_argument("mc_free_energy: burn_in_fraction must lie in [0, 1)");
    if (cfg.ladder.empty()) throw std::invalid_argument("mc_free_energy: empty ladder");
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
        if (!(cfg.ladder[i] >= 0.0))
            throw std::invalid_argument("mc_free_energy: ladder rungs must be >= 0");
        if (i > 0 && !(cfg.ladder[i] > cfg.ladder[i - 1]))
            throw std::invalid_argument("mc_free_energy: ladder must be strictly ascending");
    }
    if (cfg.ladder.back() < params.beta - 1e-9)
        throw std::invalid_argument("mc_free_energy: ladder does not bracket the target beta");
    if (cfg.integration_grid.empty() || std::abs(cfg.integration_grid.front()) > 1e-12)
        throw std::invalid_argument("mc_free_energy: integration grid must start at beta = 0");
    if (std::abs(cfg.integration_grid.back() - params.beta) > 1e-9)
        throw std::invalid_argument("mc_free_energy: integration grid must end at the target beta");

    ValidatedMc out{&cfg, {}, 0, 0};
    for (std::size_t j = 0; j < cfg.integration_grid.size(); ++j) {
        if (j > 0 && !(cfg.integration_grid[j] > cfg.integration_grid[j - 1]))
            throw std::invalid_argument("mc_free_energy: integration grid must be ascending");
        bool found = false;
        for (std::size_t r = 0; r < cfg.ladder.size(); ++r) {
            if (std::abs(cfg.ladder[r] - cfg.integration_grid[j]) <= 1e-12) {
                out.grid_rungs.push_back(r);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument(
                "mc_free_energy: every integration node must coincide with a ladder rung");
    }
    out.burn_sweeps = static_cast<int>(cfg.burn_in_fraction * cfg.sweeps_per_rung);
    out.measured_sweeps = cfg.sweeps_per_rung - out.burn_sweeps;
    if (out.measured_sweeps < 1)
        throw std::invalid_argument("mc_free_energy: burn-in leaves no measured sweeps");
    return out;
}

// Per-sample parallel tempering with two independent replica ensembles and
// trapezoid integration of -(beta'/2) <R_12^2> along the grid.
double mc_sample_free_energy(const ModelParams& params, const ValidatedMc& mc,
                             std::uint64_t seed) {
    const CouplingMatrix g = sample_couplings(params.n, seed);
    // Decorrelate the chain stream from the coupling stream.
    Rng rng(splitmix64(seed + 1));

    const McConfig& cfg = *mc.config;
    const std::size_t rungs = cfg.ladder.size();
    McContext ctx{g,
                  params.n,
                  params.m,
                  1.0 / std::sqrt(2.0 * params.n),
                  std::sqrt(static_cast<double>(params.n)),
                  std::log((1.0 - params.m) / (1.0 + params.m)),
                  std::log((1.0 + params.m) / (1.0 - params.m))};

    std::vector<std::vector<Chain>> ensembles(2);
    for (auto& ensemble : ensembles) {
        ensemble.reserve(rungs);
        for (std::size_t r = 0; r < rungs; ++r) ensemble.push_back(init_chain(ctx, rng));
    }

    std::vector<double> overlap_sq(rungs, 0.0);
    for (int sweep = 0; sweep < cfg.sweeps_per_rung; ++sweep) {
        for (auto& ensemble : ensembles)
            for (std::size_t r = 0; r < rungs; ++r)
                metropolis_sweep(ctx, ensemble[r], cfg.ladder[r], rng);
        for (auto& ensemble : ensembles)
            for (std::size_t r = 0; r + 1 < rungs; ++r)
                attempt_swap(ctx, ensemble[r], ensemble[r + 1], cfg.ladder[r],
                             cfg.ladder[r + 1], rng);
        if (sweep >= mc.burn_sweeps)
            for (std::size_t r = 0; r < rungs; ++r) {
                const double r12 = replica_overlap(ctx, ensembles[0][r], ensembles[1][r]);
                overlap_sq[r] += r12 * r12;
            }
    }
    for (auto& v : overlap_sq) v /= mc.measured_sweeps;

    double f = 0.0;
    for (std::size_t j = 0; j + 1 < mc.grid_rungs.size(); ++j) {
        const double b0 = cfg.integration_grid[j];
        const double b1 = cfg.integration_grid[j + 1];
        const double f0 = -0.5 * b0 * overlap_sq[mc.grid_rungs[j]];
        const double f1 = -0.5 * b1 * overlap_sq[mc.grid_rungs[j + 1]];
        f += 0.5 * (b1 - b0) * (f0 + f1);
    }
    return f;
}

}  // namespace

const char* method_name(Method m) { return m == Method::exact ? "exact" : "monte_carlo"; }

std::optional<Method> parse_method(const std::string& name) {
    if (name == "exact") return Method::exact;
    if (name == "monte_carlo" || name == "mc") return Method::monte_carlo;
    return std::nullopt;
}

McConfig default_mc_config(double beta_target) {
    McConfig cfg;
    if (beta_target <= 0.0) {
        cfg.ladder = {0.0};
    } else {
        constexpr int kRungs = 12;
        const double beta_min = 0.05 * beta_target;
        const double ratio = std::pow(beta_target / beta_min, 1.0 / (kRungs - 1));
        cfg.ladder.push_back(0.0);
        double b = beta_min;
        for (int r = 0; r < kRungs - 1; ++r, b *= ratio) cfg.ladder.push_back(b);
        cfg.ladder.push_back(beta_target);  // exact endpoint, no drift
    }
    cfg.integration_grid = cfg.ladder;
    return cfg;
}

QuenchedEstimate quenched_free_energy(const ModelParams& params, const DisorderPlan& plan,
                                      bool restricted) {
    check_plan(plan);
    if (plan.method == Method::monte_carlo) {
        if (restricted)
            throw std::invalid_argument(
                "quenched_free_energy: restricted estimates require the exact method");
        return mc_free_energy(params, plan);
    }
    if (params.n > plan.enumeration_cap)
        throw resource_error("quenched_free_energy: n=" + std::to_string(params.n) +
                             " exceeds the enumeration cap " +
                             std::to_string(plan.enumeration_cap));
    if (restricted) {
        const MagnetizationBand band = make_band(params.n, params.m, params.eps);
        if (band.empty()) {
            // Closest grid magnetizations around m, for the diagnostic.
            const double below = std::floor(0.5 * (params.m + 1.0) * params.n);
            const double s_below = (2.0 * below - params.n) / params.n;
            const double s_above = (2.0 * (below + 1.0) - params.n) / params.n;
            throw std::invalid_argument(
                "quenched_free_energy: band [" + std::to_string(band.lo) + ", " +
                std::to_string(band.hi) + "] contains no magnetization grid point; nearest are " +
                std::to_string(s_below) + " and " + std::to_string(s_above));
        }
    }

    EnumerateOptions opt;
    opt.max_n = plan.enumeration_cap;
    std::vector<double> per_sample(static_cast<std::size_t>(plan.samples), 0.0);
    parallel_for(plan.samples, plan.parallelism, [&](int k) {
        const CouplingMatrix g =
            sample_couplings(params.n, sample_seed(plan.base_seed, static_cast<std::uint64_t>(k)));
        const EnumerationResult r = enumerate(g, params, opt);
        per_sample[static_cast<std::size_t>(k)] =
            (restricted ? r.log_z_band : r.log_z) / params.n;
    });
    return aggregate(std::move(per_sample), params, plan, restricted);
}

ConcentrationReport concentration_diagnostics(std::vector<QuenchedEstimate> estimates) {
    if (estimates.size() < 3)
        throw std::invalid_argument("concentration_diagnostics: need at least 3 system sizes");
    std::sort(estimates.begin(), estimates.end(),
              [](const QuenchedEstimate& a, const QuenchedEstimate& b) { return a.n < b.n; });
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        const auto& a = estimates[0];
        const auto& b = estimates[i];
        if (b.n == a.n || b.beta != a.beta || b.m != a.m || b.eps != a.eps ||
            b.per_sample.size() != a.per_sample.size())
            throw std::invalid_argument(
                "concentration_diagnostics: estimates must share (beta, m, eps, samples) and "
                "have distinct n");
    }

    ConcentrationReport report;
    for (const auto& est : estimates) {
        report.ns.push_back(est.n);
        report.stds.push_back(mean_and_stderr(est.per_sample).stddev);
    }

    bool all_zero = true;
    for (double s : report.stds) all_zero = all_zero && s < 1e-15;
    if (all_zero) {
        report.degenerate = true;
        report.pass = true;
        report.slope = 0.0;
        report.note = "all standard deviations vanish (beta = 0); PASS by convention";
        return report;
    }

    bool decreasing = true;
    for (std::size_t i = 1; i < report.stds.size(); ++i)
        decreasing = decreasing && report.stds[i] < report.stds[i - 1];

    std::vector<double> log_n, log_std;
    for (std::size_t i = 0; i < report.stds.size(); ++i) {
        if (report.stds[i] <= 0.0) {
            report.pass = false;
            report.note = "a standard deviation vanished at finite beta";
            return report;
        }
        log_n.push_back(std::log(static_cast<double>(report.ns[i])));
        log_std.push_back(std::log(report.stds[i]));
    }
    report.slope = fit_slope(log_n, log_std);
    report.pass = decreasing && report.slope >= -0.9 && report.slope <= -0.1;
    report.note = decreasing ? "stds strictly decreasing" : "stds not strictly decreasing";
    return report;
}

QuenchedEstimate mc_free_energy(const ModelParams& params, const DisorderPlan& plan) {
    check_plan(plan);
    if (plan.method != Method::monte_carlo)
        throw std::invalid_argument("mc_free_energy: plan method must be monte_carlo");
    const ValidatedMc mc = validate_mc(params, plan);

    std::vector<double> per_sample(static_cast<std::size_t>(plan.samples), 0.0);
    if (params.beta > 0.0) {
        parallel_for(plan.samples, plan.parallelism, [&](int k) {
            per_sample[static_cast<std::size_t>(k)] = mc_sample_free_energy(
                params, mc, sample_seed(plan.base_seed, static_cast<std::uint64_t>(k)));
        });
    }
    return aggregate(std::move(per_sample), params, plan, /*restricted=*/false);
}

}  // namespace phaselab
