#pragma once

#include <optional>

namespace phaselab {

// Binary entropy in nats:
//   I(s) = -((1+s)/2) log((1+s)/2) - ((1-s)/2) log((1-s)/2),
// with 0 log 0 = 0 at s = +-1. Strictly concave, maximal (log 2) at s = 0,
// strictly decreasing on [0, 1]. Throws for |s| > 1.
double binary_entropy(double s);

// The unique root m* in (0,1) of I(m) = 1/4, by bisection; I is strictly
// decreasing there. Residual |I(m*) - 1/4| <= 1e-12.
double solve_m_star();

// AT boundary beta_AT(m) = (1 - m^2)^{-1}; the set beta <= beta_AT is closed.
double beta_at(double m);

// Envelope knee beta_c(m) = 2 (1 - m^2)^{-1} sqrt(I(m)).
double beta_c(double m);

// Half-open interval (lo, hi].
struct BetaWindow {
    double lo;
    double hi;
};

// The window (beta_c(m), beta_AT(m)] of inverse temperatures that satisfy
// the AT inequality yet have strictly negative envelope value. Nonempty iff
// 4 I(m) < 1, i.e. |m| > m*; degenerate windows at the boundary are reported
// absent.
std::optional<BetaWindow> negativity_window(double m);

// Upper bound on the limiting band-restricted free energy:
//   0                                   for beta <  beta_c(m),
//   -(1/4)(beta - beta_c(m))^2 (1-m^2)^2  for beta >= beta_c(m).
double envelope(double beta, double m);

// Exponential-moment tail bound on the base-measure mass outside the band:
// p_m(|s - m| > eps) <= 2 exp(-n eps^2 / 2), independent of m.
double band_tail_bound(int n, double m, double eps);

// Exact base-measure mass of the band complement: the binomial sum over
// plus-counts k with (2k/n - 1) outside [m-eps, m+eps], evaluated in log
// space. Linear in n; capped at n <= 10^6.
double exact_band_complement_mass(int n, double m, double eps);

inline constexpr int kComplementMassCap = 1000000;

struct MaxBoundResult {
    double value;     // -inf when the band holds no grid point
    bool band_empty;
};

struct MaxBoundOptions {
    // Tilt parameter; defaults to 2 (1-m^2)^{-1} sqrt(I(m)) = beta_c(m).
    std::optional<double> t;
    // Maximize over the continuum interval [m-eps, m+eps] instead of the
    // grid Delta_n; looser, exposed for comparison.
    bool continuum = false;
};

// Finite-n bound on E max{X_sigma : sigma in band}/sqrt(n):
//   B = log(n+1)/(n t) + (1/t) max_s [ (t^2/4)(1 + m^2 - 2 m s)^2 + I(s) ],
// the max over Delta_n cap [m-eps, m+eps]. Uses the exact inequalities
// C(n,k) <= exp(n I(2k/n - 1)) and |Delta_n cap band| <= n+1, so the bound
// holds at every finite n with no unknown constants. As n grows and eps
// shrinks it approaches (1-m^2) sqrt(I(m)) at the default t.
MaxBoundResult max_bound(int n, double m, double eps, const MaxBoundOptions& options = {});

// Theory-side overlay for one m: entropy, AT boundary, envelope knee, window.
struct TheoryOverlay {
    double m;
    double i_m;
    double beta_at;
    double beta_c;
    std::optional<BetaWindow> window;
};

TheoryOverlay theory_overlay(double m);

}  // namespace phaselab
