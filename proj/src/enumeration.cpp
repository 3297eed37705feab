#include "phaselab/enumeration.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "phaselab/errors.hpp"
#include "phaselab/numerics.hpp"

namespace phaselab {

namespace {

// Scalar Gibbs accumulator sharing the scale of a StreamingLse.
struct ScaledScalar {
    double value = 0.0;

    void apply(const StreamingLse::Added& a, double payload) {
        if (a.rescale != 1.0) value *= a.rescale;
        value += a.weight * payload;
    }
};

}  // namespace

EnumerationResult enumerate(const CouplingMatrix& g, const ModelParams& params,
                            const EnumerateOptions& options) {
    const int n = params.n;
    if (g.n() != n)
        throw std::invalid_argument("enumerate: coupling matrix size does not match params");
    if (n > options.max_n)
        throw resource_error("enumerate: n=" + std::to_string(n) +
                             " exceeds the enumeration cap " + std::to_string(options.max_n) +
                             " (2^n configurations)");

    const double m = params.m;
    const double beta = params.beta;
    const double inv_sqrt_2n = 1.0 / std::sqrt(2.0 * n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double beta_sqrt_n = beta * std::sqrt(static_cast<double>(n));

    // Per-plus-count tables: log base measure, q = 1 + m^2 - 2 m s, the
    // quartic correction (beta^2 n / 4) q^2, the derivative's -(beta/2) q^2,
    // and band membership.
    const MagnetizationBand band = make_band(n, m, params.eps);
    const double log_p_plus = std::log(0.5 * (1.0 + m));
    const double log_p_minus = std::log(0.5 * (1.0 - m));
    std::vector<double> log_pm(n + 1), quart(n + 1), deriv_quart(n + 1);
    std::vector<char> in_band(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double s = (2.0 * k - n) / static_cast<double>(n);
        const double q = 1.0 + m * m - 2.0 * m * s;
        log_pm[k] = k * log_p_plus + (n - k) * log_p_minus;
        quart[k] = 0.25 * beta * beta * n * q * q;
        deriv_quart[k] = 0.5 * beta * q * q;
        in_band[k] = band.contains_count(k) ? 1 : 0;
    }

    // State: sigma = all -1, sigma_hat_i = -1 - m. Local fields
    // h_i = sum_j (g_ij + g_ji) sigma_hat_j; the interaction double sum is
    // T = (1/2) sum_i sigma_hat_i h_i.
    std::vector<double> sigma_hat(n, -1.0 - m);
    std::vector<double> h(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += (g(i, j) + g(j, i)) * sigma_hat[j];
        h[i] = acc;
    }
    double t_sum = 0.0;
    for (int i = 0; i < n; ++i) t_sum += sigma_hat[i] * h[i];
    t_sum *= 0.5;

    StreamingLse full, in_lse, out_lse;
    ScaledScalar band_deriv;
    double band_max_x = kNegInf;

    const bool corr_on = options.want_corr;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> corr_acc, corr_comp;
    if (corr_on) {
        corr_acc.assign(nn, 0.0);
        if (options.compensated) corr_comp.assign(nn, 0.0);
    }

    std::uint64_t bits = 0;
    int k = 0;  // plus count
    const std::uint64_t total = std::uint64_t{1} << n;

    for (std::uint64_t c = 0;; ++c) {
        const double x = t_sum * inv_sqrt_2n;
        const double w = log_pm[k] + beta_sqrt_n * x - quart[k];

        const auto fa = full.add(w);
        if (corr_on) {
            // Upper-triangle accumulation of weight * sigma_hat outer product.
            if (fa.rescale != 1.0) {
                for (auto& v : corr_acc) v *= fa.rescale;
                for (auto& v : corr_comp) v *= fa.rescale;
            }
            if (options.compensated) {
                for (int i = 0; i < n; ++i) {
                    const double wi = fa.weight * sigma_hat[i];
                    double* row = corr_acc.data() + static_cast<std::size_t>(i) * n;
                    double* comp = corr_comp.data() + static_cast<std::size_t>(i) * n;
                    for (int j = i; j < n; ++j) {
                        const double y = wi * sigma_hat[j] - comp[j];
                        const double s = row[j] + y;
                        comp[j] = (s - row[j]) - y;
                        row[j] = s;
                    }
                }
            } else {
                for (int i = 0; i < n; ++i) {
                    const double wi = fa.weight * sigma_hat[i];
                    double* row = corr_acc.data() + static_cast<std::size_t>(i) * n;
                    for (int j = i; j < n; ++j) row[j] += wi * sigma_hat[j];
                }
            }
        }

        if (in_band[k]) {
            const auto ba = in_lse.add(w);
            band_deriv.apply(ba, x * inv_sqrt_n - deriv_quart[k]);
            if (x > band_max_x) band_max_x = x;
        } else {
            out_lse.add(w);
        }

        if (options.on_config) options.on_config(bits, x);

        if (c + 1 == total) break;

        // Gray-code step: flip the spin at the lowest set bit of c+1.
        const int p = std::countr_zero(c + 1);
        const double old_hat = sigma_hat[p];
        const double delta = ((bits >> p) & 1u) ? -2.0 : 2.0;  // new - old spin value
        t_sum += delta * h[p] + g(p, p) * delta * delta;
        for (int i = 0; i < n; ++i) h[i] += (g(i, p) + g(p, i)) * delta;
        sigma_hat[p] = old_hat + delta;
        k += (delta > 0.0) ? 1 : -1;
        bits ^= std::uint64_t{1} << p;
    }

    EnumerationResult result{.log_z = full.value(),
                             .log_z_band = in_lse.value(),
                             .log_z_complement = out_lse.value(),
                             .band_max_field = band_max_x,
                             .band_derivative_value = std::nullopt,
                             .corr = std::nullopt,
                             .params = params,
                             .seed_tag = g.seed_tag()};
    if (!in_lse.empty()) result.band_derivative_value = band_deriv.value / in_lse.sum;
    if (corr_on) {
        // Normalize by the full-measure sum (same scale as the accumulator)
        // and mirror the upper triangle.
        std::vector<double> corr(nn);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = corr_acc[static_cast<std::size_t>(i) * n + j] / full.sum;
                corr[static_cast<std::size_t>(i) * n + j] = v;
                corr[static_cast<std::size_t>(j) * n + i] = v;
            }
        result.corr = std::move(corr);
    }
    return result;
}

double overlap_second_moment(const EnumerationResult& result) {
    if (!result.corr)
        throw std::invalid_argument("overlap_second_moment: result carries no correlation matrix");
    const int n = result.params.n;
    const auto& corr = *result.corr;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < corr.size(); ++idx) acc += corr[idx] * corr[idx];
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

double band_derivative(const CouplingMatrix& g, const ModelParams& params) {
    const MagnetizationBand band = make_band(params.n, params.m, params.eps);
    if (band.empty())
        throw std::invalid_argument(
            "band_derivative: the magnetization band [m-eps, m+eps] contains no grid point");
    const EnumerationResult result = enumerate(g, params);
    return *result.band_derivative_value;
}

}  // namespace phaselab
