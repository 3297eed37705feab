#pragma once

#include <optional>

#include "phaselab/model.hpp"

namespace phaselab {

// Combinatorial cap for the exact second moment (quadratic joint-type loop).
inline constexpr int kSecondMomentCap = 10000;

struct MomentReport {
    double first_moment = 1.0;                       // E Z, identically 1
    std::optional<double> second_moment_log;         // log E Z^2, n within cap
    std::optional<double> rate_n;                    // (1/n) log E Z^2
    std::optional<double> asymptotic_variance_term;  // -(1/2) log(1 - beta^2(1-m^2)^2)
    bool at_indicator = true;                        // beta^2 (1-m^2)^2 <= 1
};

// E Z = 1 exactly for every (n, beta, m): the Gaussian moment generating
// function of the interaction term produces exp((beta^2/4n)(sum sigma_hat^2)^2),
// which the quartic correction cancels identically. The function exists to
// document and test that cancellation.
double first_moment(const ModelParams& params);

// log E Z^2 from the identity
//   E Z^2 = E_{sigma,tau} exp((beta^2/2n)(sum_i sigma_hat_i tau_hat_i)^2),
// summed over joint spin-pair types with multinomial weights and base-measure
// probabilities in log-sum-exp arithmetic. The Gaussian average and both
// quartic corrections are absorbed analytically before the sum. The two mixed
// types (+-) and (-+) carry equal weight and are collapsed into one index,
// so the loop is quadratic in n. Throws resource_error above the cap.
double second_moment_exact(const ModelParams& params);

// Fills the AT indicator beta^2(1-m^2)^2 <= 1 (closed set: the boundary is a
// member), the fluctuation variance term -(1/2) log(1 - beta^2(1-m^2)^2) on
// the open set only (the log diverges at the boundary), and the finite-n rate
// from second_moment_exact when n is within the cap.
MomentReport second_moment_rate(const ModelParams& params);

}  // namespace phaselab
