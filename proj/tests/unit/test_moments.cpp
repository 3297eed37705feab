#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "phaselab/enumeration.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/moments.hpp"
#include "phaselab/numerics.hpp"
#include "phaselab/rng.hpp"

using namespace phaselab;

namespace {

// Brute-force pair oracle: E Z^2 = E_{sigma,tau} exp((beta^2/2n) overlap^2)
// with overlap = sum_i sigma_hat_i tau_hat_i, summed over all 4^n pairs.
double pair_oracle_log_second_moment(const ModelParams& p) {
    const int n = p.n;
    const std::uint64_t total = std::uint64_t{1} << n;
    StreamingLse lse;
    for (std::uint64_t a = 0; a < total; ++a) {
        const SpinConfiguration sa{n, a};
        const double log_pa = log_base_measure(sa, p);
        for (std::uint64_t b = 0; b < total; ++b) {
            const SpinConfiguration sb{n, b};
            double overlap = 0.0;
            for (int i = 0; i < n; ++i) overlap += (sa.spin(i) - p.m) * (sb.spin(i) - p.m);
            lse.add(log_pa + log_base_measure(sb, p) +
                    0.5 * p.beta * p.beta / n * overlap * overlap);
        }
    }
    return lse.value();
}

}  // namespace

TEST_CASE("first moment is one by the Gaussian MGF cancellation") {
    CHECK(first_moment(ModelParams(8, 0.0, 0.0, 0.0)) == 1.0);
    CHECK(first_moment(ModelParams(100, 3.0, -0.9, 0.0)) == 1.0);
}

TEST_CASE("the cancellation is exact in the brute-force sigma sum at N=6") {
    // E Z = sum_sigma p_m(sigma) exp(mgf - quartic) with the MGF exponent
    // evaluated by the naive double sum and the quartic by the closed form.
    const ModelParams p(6, 1.2, -0.4, 0.0);
    const int n = p.n;
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        const SpinConfiguration sigma{n, bits};
        double sum_sq_pairs = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double hi = sigma.spin(i) - p.m;
                const double hj = sigma.spin(j) - p.m;
                sum_sq_pairs += hi * hi * hj * hj;
            }
        const double mgf_exponent = p.beta * p.beta / (4.0 * n) * sum_sq_pairs;
        const double q = 1.0 + p.m * p.m - 2.0 * p.m * sigma.magnetization();
        const double quartic = 0.25 * p.beta * p.beta * n * q * q;
        total += std::exp(log_base_measure(sigma, p)) * std::exp(mgf_exponent - quartic);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("Monte-Carlo mean of Z is one within three standard errors") {
    const ModelParams p(8, 0.5, 0.3, 0.0);
    std::vector<double> zs;
    zs.reserve(10000);
    for (int k = 0; k < 10000; ++k)
        zs.push_back(std::exp(enumerate(sample_couplings(8, sample_seed(707, k)), p).log_z));
    const auto st = mean_and_stderr(zs);
    CHECK(std::abs(st.mean - 1.0) <= 3.0 * st.std_error);
}

TEST_CASE("second moment: beta = 0 gives E Z^2 = 1") {
    CHECK(second_moment_exact(ModelParams(50, 0.0, 0.3, 0.0)) == 0.0);
}

TEST_CASE("second moment closed value at N=2, m=0, beta=1") {
    // overlap^2 is 4 with probability 1/2 and 0 otherwise: E Z^2 = (e+1)/2
    CHECK(std::abs(second_moment_exact(ModelParams(2, 1.0, 0.0, 0.0)) -
                   std::log(0.5 * (std::exp(1.0) + 1.0))) <= 1e-12);
}

TEST_CASE("joint-type evaluation equals the 4^N pair oracle at N=6") {
    for (const double m : {0.0, 0.5, -0.5, 0.8, -0.3}) {
        for (const double beta : {0.3, 0.7, 1.0, 2.0}) {
            const ModelParams p(6, beta, m, 0.0);
            const double typed = second_moment_exact(p);
            const double oracle = pair_oracle_log_second_moment(p);
            CHECK(std::abs(typed - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
        }
    }
}

TEST_CASE("second moment is nondecreasing in beta") {
    double prev = -1.0;
    for (const double beta : {0.0, 0.2, 0.5, 0.8, 1.2, 2.0}) {
        const double cur = second_moment_exact(ModelParams(50, beta, 0.3, 0.0));
        CHECK(cur >= prev - 1e-12);
        CHECK(cur >= 0.0);
        prev = cur;
    }
}

TEST_CASE("rate (1/N) log E Z^2 decays inside the AT region") {
    double prev = 1e9;
    for (const int n : {50, 100, 200, 400}) {
        const auto report = second_moment_rate(ModelParams(n, 0.5, 0.3, 0.0));
        REQUIRE(report.at_indicator);
        REQUIRE(report.rate_n.has_value());
        CHECK(*report.rate_n < prev);
        CHECK(*report.rate_n > 0.0);
        prev = *report.rate_n;
    }
}

TEST_CASE("fluctuation variance term on and off the AT boundary") {
    const auto inside = second_moment_rate(ModelParams(10, 0.5, 0.0, 0.0));
    REQUIRE(inside.asymptotic_variance_term.has_value());
    CHECK(*inside.asymptotic_variance_term == doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-10));
    CHECK(inside.at_indicator);

    // boundary beta^2 (1-m^2)^2 = 1 exactly: member of AT, no variance term
    const auto boundary = second_moment_rate(ModelParams(10, 1.0, 0.0, 0.0));
    CHECK(boundary.at_indicator);
    CHECK_FALSE(boundary.asymptotic_variance_term.has_value());

    // m=0.95, beta=11: 11^2 * 0.0975^2 = 1.150 > 1
    const auto outside = second_moment_rate(ModelParams(10, 11.0, 0.95, 0.0));
    CHECK_FALSE(outside.at_indicator);
    CHECK_FALSE(outside.asymptotic_variance_term.has_value());
}

TEST_CASE("combinatorial cap is enforced") {
    CHECK_THROWS_AS(second_moment_exact(ModelParams(10001, 0.5, 0.0, 0.0)), resource_error);
    // second_moment_rate still reports the closed-form fields above the cap
    const auto report = second_moment_rate(ModelParams(10001, 0.5, 0.0, 0.0));
    CHECK_FALSE(report.second_moment_log.has_value());
    CHECK(report.at_indicator);
    CHECK(report.asymptotic_variance_term.has_value());
}
