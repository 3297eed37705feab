#include "phaselab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "phaselab/errors.hpp"
#include "phaselab/model.hpp"
#include "phaselab/numerics.hpp"

namespace phaselab {

namespace {

double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

void check_m_open(double m, const char* who) {
    if (!(std::abs(m) < 1.0))
        throw std::invalid_argument(std::string(who) + ": m must lie in (-1, 1)");
}

// Objective of the max-bound: (t^2/4)(1 + m^2 - 2 m s)^2 + I(s).
double tilt_objective(double s, double m, double t) {
    const double q = 1.0 + m * m - 2.0 * m * s;
    return 0.25 * t * t * q * q + binary_entropy(s);
}

}  // namespace

double binary_entropy(double s) {
    if (!(std::abs(s) <= 1.0))
        throw std::invalid_argument("binary_entropy: argument must lie in [-1, 1]");
    return entropy_term(0.5 * (1.0 + s)) + entropy_term(0.5 * (1.0 - s));
}

double solve_m_star() {
    // I is strictly decreasing on [0, 1] with I(0) = log 2 > 1/4 > 0 = I(1).
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) > 0.25)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double beta_at(double m) {
    check_m_open(m, "beta_at");
    return 1.0 / (1.0 - m * m);
}

double beta_c(double m) {
    check_m_open(m, "beta_c");
    return 2.0 * std::sqrt(binary_entropy(m)) / (1.0 - m * m);
}

std::optional<BetaWindow> negativity_window(double m) {
    check_m_open(m, "negativity_window");
    // Nonempty iff 4 I(m) < 1; a window degenerate to within rounding of the
    // boundary is reported absent.
    if (4.0 * binary_entropy(m) >= 1.0 - 1e-9) return std::nullopt;
    return BetaWindow{beta_c(m), beta_at(m)};
}

double envelope(double beta, double m) {
    if (!(beta >= 0.0)) throw std::invalid_argument("envelope: beta must be >= 0");
    check_m_open(m, "envelope");
    const double knee = beta_c(m);
    if (beta < knee) return 0.0;
    const double one_minus_m2 = 1.0 - m * m;
    const double d = beta - knee;
    return -0.25 * d * d * one_minus_m2 * one_minus_m2;
}

double band_tail_bound(int n, double m, double eps) {
    if (n < 1) throw std::invalid_argument("band_tail_bound: n must be >= 1");
    check_m_open(m, "band_tail_bound");
    if (!(eps > 0.0)) throw std::invalid_argument("band_tail_bound: eps must be > 0");
    return 2.0 * std::exp(-0.5 * n * eps * eps);
}

double exact_band_complement_mass(int n, double m, double eps) {
    if (n < 1) throw std::invalid_argument("exact_band_complement_mass: n must be >= 1");
    if (n > kComplementMassCap)
        throw resource_error("exact_band_complement_mass: n exceeds cap " +
                             std::to_string(kComplementMassCap));
    check_m_open(m, "exact_band_complement_mass");
    const MagnetizationBand band = make_band(n, m, eps);
    const auto lf = log_factorial_table(n);
    const double log_p_plus = std::log(0.5 * (1.0 + m));
    const double log_p_minus = std::log(0.5 * (1.0 - m));
    StreamingLse lse;
    for (int k = 0; k <= n; ++k) {
        if (band.contains_count(k)) continue;
        lse.add(log_binomial(lf, n, k) + k * log_p_plus + (n - k) * log_p_minus);
    }
    if (lse.empty()) return 0.0;
    return std::min(1.0, std::exp(lse.value()));  // a probability; absorb rounding
}

MaxBoundResult max_bound(int n, double m, double eps, const MaxBoundOptions& options) {
    if (n < 1) throw std::invalid_argument("max_bound: n must be >= 1");
    check_m_open(m, "max_bound");
    if (!(eps > 0.0 && eps < 1.0 - std::abs(m)))
        throw std::invalid_argument("max_bound: eps must satisfy 0 < eps < 1 - |m|");
    const double t = options.t.value_or(beta_c(m));
    if (!(t > 0.0)) throw std::invalid_argument("max_bound: t must be > 0");

    double max_term = kNegInf;
    if (options.continuum) {
        // Dense scan of the interval; the objective is a convex quadratic
        // plus a concave entropy, so a fine grid with endpoints suffices
        // for this comparison variant.
        const double lo = std::max(m - eps, -1.0);
        const double hi = std::min(m + eps, 1.0);
        constexpr int kScan = 200000;
        for (int i = 0; i <= kScan; ++i) {
            const double s = lo + (hi - lo) * (static_cast<double>(i) / kScan);
            max_term = std::max(max_term, tilt_objective(s, m, t));
        }
    } else {
        const MagnetizationBand band = make_band(n, m, eps);
        if (band.empty()) return {kNegInf, true};
        for (double s : band.grid_points) max_term = std::max(max_term, tilt_objective(s, m, t));
    }
    const double value = std::log(static_cast<double>(n) + 1.0) / (n * t) + max_term / t;
    return {value, false};
}

TheoryOverlay theory_overlay(double m) {
    check_m_open(m, "theory_overlay");
    return TheoryOverlay{m, binary_entropy(m), beta_at(m), beta_c(m), negativity_window(m)};
}

}  // namespace phaselab
