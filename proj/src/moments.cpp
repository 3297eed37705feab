#include "phaselab/moments.hpp"

#include <cmath>
#include <string>

#include "phaselab/errors.hpp"
#include "phaselab/numerics.hpp"

namespace phaselab {

double first_moment(const ModelParams&) {
    // E exp((beta/sqrt 2) sum g_ij sigma_hat_i sigma_hat_j)
    //   = exp((beta^2/4n)(sum_i sigma_hat_i^2)^2)
    // for every fixed sigma, which cancels the quartic correction exactly;
    // the remaining base-measure sum is 1.
    return 1.0;
}

double second_moment_exact(const ModelParams& params) {
    const int n = params.n;
    if (n > kSecondMomentCap)
        throw resource_error("second_moment_exact: n=" + std::to_string(n) +
                             " exceeds the combinatorial cap " + std::to_string(kSecondMomentCap));

    if (params.beta == 0.0) return 0.0;  // every term is its bare probability

    const double m = params.m;
    const double beta = params.beta;
    const auto lf = log_factorial_table(n);

    const double log_p_joint_plus = 2.0 * std::log(0.5 * (1.0 + m));   // (sigma, tau) = (+, +)
    const double log_p_joint_mixed = std::log(0.25 * (1.0 + m) * (1.0 - m));
    const double log_p_joint_minus = 2.0 * std::log(0.5 * (1.0 - m));  // (sigma, tau) = (-, -)
    const double hat_plus = (1.0 - m) * (1.0 - m);    // sigma_hat tau_hat on (+, +)
    const double hat_mixed = -(1.0 - m * m);          // on (+, -) and (-, +)
    const double hat_minus = (1.0 + m) * (1.0 + m);   // on (-, -)
    const double gauss_coeff = 0.5 * beta * beta / static_cast<double>(n);
    const double log2 = std::log(2.0);

    // Joint types (a, j, d) = (#(+,+), #mixed, #(-,-)); the two mixed types
    // are interchangeable, contributing the 2^j factor.
    StreamingLse lse;
    for (int a = 0; a <= n; ++a) {
        for (int j = 0; j + a <= n; ++j) {
            const int d = n - a - j;
            const double overlap = a * hat_plus + j * hat_mixed + d * hat_minus;
            const double term = lf[n] - lf[a] - lf[j] - lf[d] + j * log2 +
                                a * log_p_joint_plus + j * log_p_joint_mixed +
                                d * log_p_joint_minus + gauss_coeff * overlap * overlap;
            lse.add(term);
        }
    }
    double value = lse.value();
    // The type sum of bare probabilities is exactly 1; absorb the rounding
    // residual at beta ~ 0 so E Z^2 >= 1 holds as stated.
    if (value < 0.0 && value > -1e-9) value = 0.0;
    return value;
}

MomentReport second_moment_rate(const ModelParams& params) {
    MomentReport report;
    report.first_moment = first_moment(params);
    const double crit = params.beta * params.beta * params.one_minus_m2() * params.one_minus_m2();
    report.at_indicator = crit <= 1.0;
    if (crit < 1.0) report.asymptotic_variance_term = -0.5 * std::log1p(-crit);
    if (params.n <= kSecondMomentCap) {
        const double log_second = second_moment_exact(params);
        report.second_moment_log = log_second;
        report.rate_n = log_second / static_cast<double>(params.n);
    }
    return report;
}

}  // namespace phaselab
