#include "phaselab/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phaselab/rng.hpp"

namespace phaselab {

namespace {

void check_dimensions(const CouplingMatrix& g, const SpinConfiguration& sigma) {
    if (g.n() != sigma.n)
        throw std::invalid_argument("coupling matrix is " + std::to_string(g.n()) +
                                    "x" + std::to_string(g.n()) + " but configuration has n=" +
                                    std::to_string(sigma.n));
}

}  // namespace

ModelParams::ModelParams(int n_, double beta_, double m_, double eps_)
    : n(n_), beta(beta_), m(m_), eps(eps_) {
    if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("ModelParams: beta must be finite and >= 0");
    if (!(std::abs(m) < 1.0))
        throw std::invalid_argument("ModelParams: m must lie in (-1, 1)");
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("ModelParams: eps must be finite and >= 0");
}

CouplingMatrix::CouplingMatrix(int n, std::vector<double> entries, std::uint64_t seed_tag)
    : n_(n), g_(std::move(entries)), seed_tag_(seed_tag) {
    if (n_ < 1) throw std::invalid_argument("CouplingMatrix: n must be >= 1");
    if (g_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
        throw std::invalid_argument("CouplingMatrix: entry count does not match n*n");
    for (double v : g_)
        if (!std::isfinite(v)) throw std::invalid_argument("CouplingMatrix: non-finite entry");
}

CouplingMatrix sample_couplings(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_couplings: n must be >= 1");
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    for (auto& v : entries) v = scale * rng.gaussian();
    return CouplingMatrix(n, std::move(entries), seed);
}

MagnetizationBand make_band(int n, double m, double eps) {
    MagnetizationBand band;
    band.lo = m - eps;
    band.hi = m + eps;
    band.k_lo = n + 1;
    band.k_hi = -1;
    for (int k = 0; k <= n; ++k) {
        const double s = (2.0 * k - n) / static_cast<double>(n);
        if (s >= band.lo && s <= band.hi) {
            if (k < band.k_lo) band.k_lo = k;
            band.k_hi = k;
            band.grid_points.push_back(s);
        }
    }
    return band;
}

double log_base_measure(const SpinConfiguration& sigma, const ModelParams& params) {
    if (sigma.n != params.n)
        throw std::invalid_argument("log_base_measure: configuration size does not match params");
    const int k = sigma.plus_count();
    return k * std::log(0.5 * (1.0 + params.m)) +
           (params.n - k) * std::log(0.5 * (1.0 - params.m));
}

double interaction_field(const CouplingMatrix& g, const SpinConfiguration& sigma,
                         const ModelParams& params) {
    check_dimensions(g, sigma);
    if (sigma.n != params.n)
        throw std::invalid_argument("interaction_field: configuration size does not match params");
    const int n = params.n;
    const double m = params.m;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double hat_i = sigma.spin(i) - m;
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += g(i, j) * (sigma.spin(j) - m);
        total += hat_i * row;
    }
    return total / std::sqrt(2.0 * n);
}

double hamiltonian(const CouplingMatrix& g, const SpinConfiguration& sigma,
                   const ModelParams& params) {
    const int n = params.n;
    const double x = interaction_field(g, sigma, params);
    // sum_i sigma_hat_i^2 = n (1 + m^2 - 2 m s) exactly
    const double q = 1.0 + params.m * params.m - 2.0 * params.m * sigma.magnetization();
    return params.beta * std::sqrt(static_cast<double>(n)) * x -
           0.25 * params.beta * params.beta * n * q * q;
}

}  // namespace phaselab
