#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/enumeration.hpp"
#include "phaselab/model.hpp"

namespace phaselab {

enum class Method { exact, monte_carlo };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

// Parallel-tempering / thermodynamic-integration configuration. The
// integration grid must be a subset of the ladder, start at beta = 0 and end
// at the target beta; free energies are recovered by trapezoid integration of
// -(beta'/2) <R_12^2> along it.
struct McConfig {
    int sweeps_per_rung = 2500;     // total sweeps per ladder rung
    double burn_in_fraction = 0.2;  // leading fraction of sweeps discarded
    std::vector<double> ladder;     // ascending inverse temperatures
    std::vector<double> integration_grid;
};

// Default ladder: beta = 0 plus 12 geometrically spaced rungs from
// 0.05*beta_target up to beta_target; the integration grid is the ladder.
McConfig default_mc_config(double beta_target);

struct DisorderPlan {
    int samples = 100;
    std::uint64_t base_seed = 1;
    int parallelism = 1;
    Method method = Method::exact;
    std::optional<McConfig> mc;
    int enumeration_cap = kDefaultEnumerationCap;
};

// Disorder-averaged free energy estimate. Sample k always uses seed
// base_seed XOR splitmix64(k), and per-sample values are stored in sample
// order, so results are independent of the parallelism degree.
struct QuenchedEstimate {
    double mean_f = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(samples)
    std::vector<double> per_sample;
    int n = 0;
    double beta = 0.0;
    double m = 0.0;
    double eps = 0.0;
    bool restricted = false;
    Method method = Method::exact;
    std::uint64_t base_seed = 0;
};

// Disorder average of (1/n) log Z, or of (1/n) log Z^{<=eps} when restricted.
// Deterministic given (params, plan). The exact method requires
// n <= plan.enumeration_cap. A restricted request with an empty band fails
// up front with a diagnostic listing the grid points nearest the band.
QuenchedEstimate quenched_free_energy(const ModelParams& params, const DisorderPlan& plan,
                                      bool restricted = false);

struct ConcentrationReport {
    std::vector<int> ns;            // sorted ascending
    std::vector<double> stds;       // sample std of (1/n) log Z per n
    double slope = 0.0;             // fitted slope of log(std) vs log(n)
    bool pass = false;
    bool degenerate = false;        // all stds zero (beta = 0)
    std::string note;
};

// Concentration diagnostic over >= 3 system sizes at matching
// (beta, m, eps, samples): PASS when the stds strictly decrease in n and the
// log-log slope lies in [-0.9, -0.1]. Input order does not matter.
ConcentrationReport concentration_diagnostics(std::vector<QuenchedEstimate> estimates);

// Monte-Carlo path for n beyond the enumeration cap: per disorder sample,
// parallel-tempering Metropolis over the ladder with two independent replica
// ensembles, overlap measurement <R_12^2> at every rung, and trapezoid
// integration of -(beta'/2) <R_12^2> from 0 to beta.
QuenchedEstimate mc_free_energy(const ModelParams& params, const DisorderPlan& plan);

}  // namespace phaselab
