#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace phaselab {

// Model parameters (N, beta, m, eps): system size, inverse temperature,
// spin mean of the base measure, and magnetization band half-width.
// Validated on construction; immutable by convention afterwards.
struct ModelParams {
    int n;
    double beta;
    double m;
    double eps;

    ModelParams(int n_, double beta_, double m_, double eps_);

    double one_minus_m2() const { return 1.0 - m * m; }
};

// One disorder realization: entries g(i,j) i.i.d. N(0, 1/n) for all ordered
// pairs 0 <= i,j < n. No symmetry is imposed; g(i,j) and g(j,i) are
// independent draws. seed_tag records the seed that produced the matrix.
class CouplingMatrix {
public:
    CouplingMatrix(int n, std::vector<double> entries, std::uint64_t seed_tag);

    int n() const { return n_; }
    std::uint64_t seed_tag() const { return seed_tag_; }
    double operator()(int i, int j) const { return g_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& entries() const { return g_; }

private:
    int n_;
    std::vector<double> g_;
    std::uint64_t seed_tag_;
};

// Deterministic disorder sample: n*n independent N(0, 1/n) draws in row-major
// order from the fixed generator in rng.hpp. Identical (n, seed) gives a
// bit-identical matrix.
CouplingMatrix sample_couplings(int n, std::uint64_t seed);

// Spin configuration as an n-bit word, bit i set <=> sigma_i = +1.
// The magnetization s = (1/n) sum sigma_i lives on the grid
// Delta_n = {-1 + 2k/n : k = 0..n}; it is derived from the bit word, never
// stored separately.
struct SpinConfiguration {
    int n;
    std::uint64_t bits;

    int spin(int i) const { return ((bits >> i) & 1u) ? +1 : -1; }
    int plus_count() const { return std::popcount(bits); }
    double magnetization() const {
        return (2.0 * plus_count() - n) / static_cast<double>(n);
    }
};

// Delta_n intersected with the closed interval [m-eps, m+eps], kept both as
// grid values and as the plus-count window [k_lo, k_hi] the enumerator tests
// against. Boundary ties are members.
struct MagnetizationBand {
    double lo;
    double hi;
    std::vector<double> grid_points;
    int k_lo;
    int k_hi;

    bool empty() const { return k_lo > k_hi; }
    bool contains_count(int k) const { return k >= k_lo && k <= k_hi; }
};

MagnetizationBand make_band(int n, double m, double eps);

// log p_m(sigma) = sum_i log((1 + m sigma_i)/2). Exponentials over all 2^n
// configurations sum to one.
double log_base_measure(const SpinConfiguration& sigma, const ModelParams& params);

// X_sigma = (2n)^{-1/2} sum_{ij} g_ij (sigma_i - m)(sigma_j - m). Centered
// Gaussian over the disorder with variance (1 + m^2 - 2 m s)^2 / 2.
double interaction_field(const CouplingMatrix& g, const SpinConfiguration& sigma,
                         const ModelParams& params);

// H = beta sqrt(n) X_sigma - (beta^2 n / 4)(1 + m^2 - 2 m s)^2.
// The quartic correction equals (beta^2/4n)(sum_i (sigma_i - m)^2)^2; it is
// always evaluated in this closed magnetization form, never by the double sum.
double hamiltonian(const CouplingMatrix& g, const SpinConfiguration& sigma,
                   const ModelParams& params);

}  // namespace phaselab
