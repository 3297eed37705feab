#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "phaselab/model.hpp"

namespace phaselab {

inline constexpr int kDefaultEnumerationCap = 26;

struct EnumerateOptions {
    bool want_corr = false;
    // Kahan-compensated accumulation of the correlation matrix, for
    // validation runs; the default single-pass double accumulation is faster.
    bool compensated = false;
    int max_n = kDefaultEnumerationCap;
    // Instrumentation hook, invoked once per visited configuration with the
    // incrementally maintained interaction field X_sigma. Test use only.
    std::function<void(std::uint64_t bits, double x_sigma)> on_config;
};

// Exact per-sample output. log Z splits as Z = Z^{<=eps} + Z^{>eps} over the
// magnetization band and its complement; either part may be empty (-inf).
struct EnumerationResult {
    double log_z;
    double log_z_band;        // -inf if the band contains no grid point
    double log_z_complement;  // -inf if the band covers all of Delta_n
    double band_max_field;    // max X_sigma over the band, -inf if band empty
    // Gibbs average over the band of (1/n) dH/dbeta, i.e. the integrand of
    // d/dbeta of (1/n) log Z^{<=eps}; absent when the band is empty.
    std::optional<double> band_derivative_value;
    // n*n row-major Gibbs expectations <(sigma_i - m)(sigma_j - m)> under the
    // full (unrestricted) measure; present when requested.
    std::optional<std::vector<double>> corr;
    ModelParams params;
    std::uint64_t seed_tag;
};

// Visits all 2^n configurations in Gray-code order, maintaining local fields
// h_i = sum_j (g_ij + g_ji)(sigma_j - m) so a single-spin flip costs O(n).
// Streams three log-sum-exp reductions (full, band, complement), the running
// band maximum of X_sigma, and optionally the Gibbs-weighted outer-product
// matrix. Throws resource_error when n exceeds options.max_n.
EnumerationResult enumerate(const CouplingMatrix& g, const ModelParams& params,
                            const EnumerateOptions& options = {});

// Two-replica overlap second moment E_Gibbs <R_12^2> for one sample, with
// R_12 = (1/n) sum_i (sigma_i - m)(tau_i - m): computed from the correlation
// accumulator as (1/n^2) sum_ij corr_ij^2. Requires corr to be present.
double overlap_second_moment(const EnumerationResult& result);

// Band-restricted Gibbs average of
//   (1/n) sum_ij (g_ij/sqrt(2)) sigma_hat_i sigma_hat_j
//   - (beta/2) ((1/n) sum_i sigma_hat_i^2)^2,
// the integrand of d/dbeta of (1/n) log Z^{<=eps}. Throws on an empty band.
double band_derivative(const CouplingMatrix& g, const ModelParams& params);

}  // namespace phaselab
