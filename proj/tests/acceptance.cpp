// Acceptance suite: each criterion prints one [PASS]/[FAIL] line with the
// measured quantities. Run with no arguments for all criteria, or pass
// criterion numbers to run a subset. Exit code 0 iff every selected
// criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "phaselab/disorder.hpp"
#include "phaselab/enumeration.hpp"
#include "phaselab/moments.hpp"
#include "phaselab/numerics.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/sweep.hpp"
#include "phaselab/theory.hpp"

using namespace phaselab;
namespace fs = std::filesystem;

namespace {

constexpr int kParallelism = 4;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Annealed identity: sampled mean of Z is 1 within 3 standard errors at
//    (N=8, beta=0.5, m=0.3) over 10^4 samples; the brute-force sigma sum
//    confirms the Gaussian-MGF/quartic cancellation at N=6 to 1e-12.
Outcome criterion1() {
    Outcome out;
    const ModelParams p(8, 0.5, 0.3, 0.0);
    std::vector<double> zs(10000);
    for (int k = 0; k < 10000; ++k)
        zs[k] = std::exp(enumerate(sample_couplings(8, sample_seed(707, k)), p).log_z);
    const auto st = mean_and_stderr(zs);
    const bool mc_ok = std::abs(st.mean - 1.0) <= 3.0 * st.std_error;

    const ModelParams p6(6, 1.2, -0.4, 0.0);
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
        const SpinConfiguration sigma{6, bits};
        double pairs = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const double hi = sigma.spin(i) - p6.m;
                const double hj = sigma.spin(j) - p6.m;
                pairs += hi * hi * hj * hj;
            }
        const double mgf = p6.beta * p6.beta / (4.0 * 6) * pairs;
        const double q = 1.0 + p6.m * p6.m - 2.0 * p6.m * sigma.magnetization();
        const double quartic = 0.25 * p6.beta * p6.beta * 6 * q * q;
        total += std::exp(log_base_measure(sigma, p6)) * std::exp(mgf - quartic);
    }
    const double residual = std::abs(total - 1.0);
    const bool brute_ok = residual <= 1e-12;

    out.pass = mc_ok && brute_ok;
    out.detail = fmt("mean Z = %.5f +- %.5f over 10^4 samples; brute-force residual %.2e",
                     st.mean, st.std_error, residual);
    return out;
}

// ---------------------------------------------------------------------------
// 2. Second-moment oracle: joint-type evaluation vs the 4^N pair sum at N=6,
//    and the closed N=2 value log((e+1)/2).
Outcome criterion2() {
    Outcome out;
    double worst_rel = 0.0;
    for (const double m : {0.0, 0.5, -0.5}) {
        for (const double beta : {0.3, 1.0, 2.0}) {
            const ModelParams p(6, beta, m, 0.0);
            StreamingLse lse;
            for (std::uint64_t a = 0; a < 64; ++a) {
                const SpinConfiguration sa{6, a};
                const double log_pa = log_base_measure(sa, p);
                for (std::uint64_t b = 0; b < 64; ++b) {
                    const SpinConfiguration sb{6, b};
                    double overlap = 0.0;
                    for (int i = 0; i < 6; ++i)
                        overlap += (sa.spin(i) - m) * (sb.spin(i) - m);
                    lse.add(log_pa + log_base_measure(sb, p) +
                            0.5 * beta * beta / 6.0 * overlap * overlap);
                }
            }
            const double oracle = lse.value();
            const double typed = second_moment_exact(p);
            worst_rel = std::max(worst_rel,
                                 std::abs(typed - oracle) / std::max(1e-30, std::abs(oracle)));
        }
    }
    const double closed = second_moment_exact(ModelParams(2, 1.0, 0.0, 0.0));
    const double expected = std::log(0.5 * (std::exp(1.0) + 1.0));
    const double closed_err = std::abs(closed - expected);
    out.pass = worst_rel <= 1e-10 && closed_err <= 1e-12;
    out.detail = fmt("worst pair-oracle relative error %.2e; |logEZ^2(2,0,1) - log((e+1)/2)| = %.2e",
                     worst_rel, closed_err);
    return out;
}

// ---------------------------------------------------------------------------
// 3. Enumeration correctness: Gray-code log Z vs the naive O(2^N N^2)
//    recomputation at N=12 on 20 disorder samples; band decomposition.
Outcome criterion3() {
    Outcome out;
    const ModelParams p(12, 1.0, 0.3, 0.2);
    double worst_abs = 0.0, worst_split = 0.0;
    for (int k = 0; k < 20; ++k) {
        const CouplingMatrix g = sample_couplings(12, sample_seed(909, k));
        const auto r = enumerate(g, p);
        StreamingLse naive;
        for (std::uint64_t bits = 0; bits < (1u << 12); ++bits) {
            const SpinConfiguration sigma{12, bits};
            naive.add(log_base_measure(sigma, p) + hamiltonian(g, sigma, p));
        }
        worst_abs = std::max(worst_abs, std::abs(r.log_z - naive.value()));
        worst_split = std::max(
            worst_split, std::abs(logsumexp2(r.log_z_band, r.log_z_complement) - r.log_z));
    }
    out.pass = worst_abs <= 1e-9 && worst_split <= 1e-10;
    out.detail = fmt("worst |gray - naive| = %.2e; worst decomposition residual %.2e",
                     worst_abs, worst_split);
    return out;
}

// ---------------------------------------------------------------------------
// 4. Theory constants.
Outcome criterion4() {
    Outcome out;
    const double m_star = solve_m_star();
    const double residual = std::abs(binary_entropy(m_star) - 0.25);
    const double bc95 = beta_c(0.95);
    const double bat95 = beta_at(0.95);
    const double env = envelope(10.2564, 0.95);
    const auto window = negativity_window(0.9);
    const bool window_ok = window && std::abs(window->lo - 4.6900) <= 1e-3 &&
                           std::abs(window->hi - 5.2632) <= 1e-3;
    out.pass = std::abs(m_star - 0.8628) <= 1e-3 && residual <= 1e-12 &&
               std::abs(bc95 - 7.0136) <= 1e-3 && std::abs(bat95 - 10.2564) <= 1e-3 &&
               std::abs(env - (-0.02499)) <= 1e-4 && window_ok &&
               !negativity_window(0.5).has_value();
    out.detail = fmt(
        "m* = %.4f (I residual %.1e); beta_c(0.95) = %.4f; beta_AT(0.95) = %.4f; "
        "envelope = %.5f; window(0.9) = (%.4f, %.4f]; window(0.5) empty = %s",
        m_star, residual, bc95, bat95, env, window ? window->lo : 0.0,
        window ? window->hi : 0.0, negativity_window(0.5) ? "no" : "yes");
    return out;
}

// ---------------------------------------------------------------------------
// 5. Tail-bound domination over the (N, m, eps) lattice plus the spot values.
Outcome criterion5() {
    Outcome out;
    bool dominated = true;
    for (int n = 1; n <= 24 && dominated; ++n)
        for (const double m : {0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9})
            for (const double eps : {0.05, 0.1, 0.3})
                dominated =
                    dominated && exact_band_complement_mass(n, m, eps) <= band_tail_bound(n, m, eps);
    const double exact_spot = exact_band_complement_mass(20, 0.0, 0.3);
    const double bound_spot = band_tail_bound(20, 0.0, 0.3);
    out.pass = dominated && std::abs(exact_spot - 0.11532) <= 1e-4 &&
               std::abs(bound_spot - 2.0 * std::exp(-0.9)) <= 1e-12 &&
               std::abs(bound_spot - 0.81306) <= 1e-3 && exact_spot <= bound_spot;
    out.detail = fmt("lattice dominated = %s; spot exact %.5f <= bound %.5f",
                     dominated ? "yes" : "no", exact_spot, bound_spot);
    return out;
}

// ---------------------------------------------------------------------------
// 6. Max-bound domination at (N=16, m=0.9, eps=0.05) over 200 enumerated
//    samples, and monotone approach of the bound to (1-m^2) sqrt(I(m)).
Outcome criterion6() {
    Outcome out;
    const int n = 16;
    const ModelParams p(n, 0.0, 0.9, 0.05);
    std::vector<double> scaled_max(200);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 200; ++k) {
        const auto r = enumerate(sample_couplings(n, sample_seed(606, k)), p);
        scaled_max[k] = r.band_max_field / sqrt_n;
    }
    const auto st = mean_and_stderr(scaled_max);
    const double bound16 = max_bound(16, 0.9, 0.05).value;
    const bool empirical_ok = st.mean <= bound16 + 3.0 * st.std_error;

    const double limit = (1.0 - 0.81) * std::sqrt(binary_entropy(0.9));
    // eps chosen per N as the smallest band that still holds a grid point
    const double b12 = max_bound(12, 0.9, 0.075).value;
    const double b16 = max_bound(16, 0.9, 0.03).value;
    const double b20 = max_bound(20, 0.9, 0.005).value;
    const bool trend_ok = b12 > b16 && b16 > b20 && b20 >= limit &&
                          (b20 - limit) < (b12 - limit);

    out.pass = empirical_ok && trend_ok && std::abs(limit - 0.084655) <= 1e-5;
    out.detail = fmt(
        "mean M/sqrt(N) = %.5f +- %.5f <= bound %.5f; B(12,16,20) = %.5f > %.5f > %.5f -> %.6f",
        st.mean, st.std_error, bound16, b12, b16, b20, limit);
    return out;
}

// ---------------------------------------------------------------------------
// 7. Jensen upper bound across the test grid and concentration of
//    (1/N) log Z over N in {10, 14, 18}.
Outcome criterion7() {
    Outcome out;
    bool jensen_ok = true;
    double worst_sigma = -100.0;
    for (const int n : {8, 12})
        for (const double beta : {0.25, 0.5, 1.0})
            for (const double m : {0.0, 0.5, 0.9}) {
                const ModelParams p(n, beta, m, 0.0);
                const DisorderPlan plan{.samples = 400, .base_seed = 5,
                                        .parallelism = kParallelism};
                const auto est = quenched_free_energy(p, plan);
                const double sigmas =
                    est.std_error > 0.0 ? est.mean_f / est.std_error : 0.0;
                worst_sigma = std::max(worst_sigma, sigmas);
                jensen_ok = jensen_ok && est.mean_f <= 3.0 * est.std_error;
            }

    std::vector<QuenchedEstimate> estimates;
    for (const int n : {10, 14, 18}) {
        const ModelParams p(n, 1.0, 0.3, 0.0);
        const DisorderPlan plan{.samples = 1000, .base_seed = 2, .parallelism = kParallelism};
        estimates.push_back(quenched_free_energy(p, plan));
    }
    const auto report = concentration_diagnostics(estimates);

    out.pass = jensen_ok && report.pass;
    out.detail = fmt(
        "Jensen worst mean/stderr = %.2f (grid of 18 cells); stds = {%.4f, %.4f, %.4f}, "
        "log-log slope = %.3f",
        worst_sigma, report.stds[0], report.stds[1], report.stds[2], report.slope);
    return out;
}

// ---------------------------------------------------------------------------
// 8. Derivative identity: analytic band derivative vs centered finite
//    differences, and MC thermodynamic integration vs exact enumeration.
Outcome criterion8() {
    Outcome out;
    const double h = 1e-4;
    double worst_fd = 0.0;
    for (int k = 0; k < 10; ++k) {
        const CouplingMatrix g = sample_couplings(10, sample_seed(1010, k));
        const double bd = band_derivative(g, ModelParams(10, 0.7, 0.3, 0.2));
        const double up = enumerate(g, ModelParams(10, 0.7 + h, 0.3, 0.2)).log_z_band;
        const double dn = enumerate(g, ModelParams(10, 0.7 - h, 0.3, 0.2)).log_z_band;
        worst_fd = std::max(worst_fd, std::abs(bd - (up - dn) / (2.0 * h * 10)));
    }
    const bool fd_ok = worst_fd <= 1e-5;

    const ModelParams p(12, 0.6, 0.3, 0.0);
    const DisorderPlan exact_plan{.samples = 400, .base_seed = 11, .parallelism = kParallelism};
    const auto exact = quenched_free_energy(p, exact_plan);
    DisorderPlan mc_plan{.samples = 120, .base_seed = 22, .parallelism = kParallelism,
                         .method = Method::monte_carlo, .mc = default_mc_config(0.6)};
    mc_plan.mc->sweeps_per_rung = 3000;
    const auto mc = mc_free_energy(p, mc_plan);
    const double combined =
        std::sqrt(exact.std_error * exact.std_error + mc.std_error * mc.std_error);
    const double diff = std::abs(exact.mean_f - mc.mean_f);
    const bool mc_ok = diff <= 3.0 * combined;

    out.pass = fd_ok && mc_ok;
    out.detail = fmt(
        "worst |deriv - FD| = %.2e; exact %.6f +- %.6f vs MC %.6f +- %.6f (|diff| = %.6f <= %.6f)",
        worst_fd, exact.mean_f, exact.std_error, mc.mean_f, mc.std_error, diff, 3.0 * combined);
    return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism: identical seeds and any parallelism degree give
//    byte-identical CSV output.
Outcome criterion9() {
    Outcome out;
    SweepSpec spec;
    spec.beta_grid = {0.0, 0.4, 0.8};
    spec.m_grid = {0.0, 0.5, 0.9};
    spec.n_list = {8, 10};
    spec.eps = 0.1;
    spec.plan = {.samples = 25, .base_seed = 99, .parallelism = 1};

    const auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const fs::path dir_a = fs::temp_directory_path() / "phaselab_acceptance_a";
    const fs::path dir_b = fs::temp_directory_path() / "phaselab_acceptance_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_report(run_sweep(spec), dir_a.string());
    spec.plan.parallelism = kParallelism;
    write_report(run_sweep(spec), dir_b.string());
    const bool csv_ok = slurp(dir_a / "cells.csv") == slurp(dir_b / "cells.csv") &&
                        slurp(dir_a / "theory.csv") == slurp(dir_b / "theory.csv");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    // Monte-Carlo route: per-sample values match across parallelism degrees
    const ModelParams p(16, 0.5, 0.3, 0.0);
    DisorderPlan plan{.samples = 6, .base_seed = 40, .parallelism = 1,
                      .method = Method::monte_carlo, .mc = default_mc_config(0.5)};
    plan.mc->sweeps_per_rung = 300;
    const auto serial = mc_free_energy(p, plan);
    plan.parallelism = kParallelism;
    const auto parallel = mc_free_energy(p, plan);
    const bool mc_ok = serial.per_sample == parallel.per_sample;

    out.pass = csv_ok && mc_ok;
    out.detail = fmt("CSV byte-identical across parallelism 1 vs %d: %s; MC per-sample identical: %s",
                     kParallelism, csv_ok ? "yes" : "no", mc_ok ? "yes" : "no");
    return out;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "annealed first-moment identity", criterion1},
    {2, "second-moment oracle equivalence", criterion2},
    {3, "gray-code enumeration vs naive recompute", criterion3},
    {4, "closed-form theory constants", criterion4},
    {5, "band tail bound dominates the exact mass", criterion5},
    {6, "band maximum bound and its limit", criterion6},
    {7, "Jensen bound and concentration trend", criterion7},
    {8, "derivative identity and thermodynamic integration", criterion8},
    {9, "seeded determinism of CSV output", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const auto& criterion : kCriteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
            continue;
        const Outcome outcome = criterion.run();
        std::printf("[%s] criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.title, outcome.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? EXIT_SUCCESS : EXIT_FAILURE;
}
