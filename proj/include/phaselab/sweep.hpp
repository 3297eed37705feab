#pragma once

#include <set>
#include <string>
#include <vector>

#include "phaselab/disorder.hpp"
#include "phaselab/theory.hpp"

namespace phaselab {

enum class OutputKind { csv, json, plot };

// Work-unit budget (flip steps): exact cells cost samples * 2^n, Monte-Carlo
// cells samples * rungs * 2 * sweeps * n. Sweeps refuse up front when the
// estimate exceeds the budget.
inline constexpr double kDefaultWorkBudget = 1e10;

struct SweepSpec {
    std::vector<double> beta_grid;
    std::vector<double> m_grid;
    std::vector<int> n_list;
    double eps = 0.05;
    DisorderPlan plan;
    bool restricted = false;
    std::set<OutputKind> outputs = {OutputKind::csv, OutputKind::json};
    double budget = kDefaultWorkBudget;
};

// Cells are stored in row-major (n, m, beta) order; overlays per m and
// envelope values per (m, beta) are recomputed from theory on every run,
// never cached.
struct PhaseGrid {
    SweepSpec spec;
    std::vector<QuenchedEstimate> cells;
    std::vector<TheoryOverlay> overlays;
    std::vector<double> envelope_values;
    double work_estimate = 0.0;

    const QuenchedEstimate& cell(std::size_t i_n, std::size_t i_m, std::size_t i_beta) const {
        return cells[(i_n * spec.m_grid.size() + i_m) * spec.beta_grid.size() + i_beta];
    }
};

double estimate_work(const SweepSpec& spec);

// Fills every cell through the disorder engine and attaches theory overlays.
// Deterministic per spec. Throws resource_error when the work estimate
// exceeds spec.budget, std::invalid_argument on bad grids.
PhaseGrid run_sweep(const SweepSpec& spec);

// Writes the requested outputs into `destination`:
//   cells.csv   beta,m,n,eps,samples,seed,method,restricted,mean_f,stderr
//   theory.csv  m,beta_at,beta_c,window_lo,window_hi,i_m
//   report.json both tables plus metadata (version, timestamp, budget)
//   plot.py     static vector-graphics phase diagram from the two CSVs
// All floating-point fields are printed with round-trip-safe precision.
// Returns the written paths.
std::vector<std::string> write_report(const PhaseGrid& grid, const std::string& destination);

// Re-emits CSV/plot outputs from a previously written report.json.
std::vector<std::string> rewrite_report(const std::string& json_path, const std::string& destination,
                                        const std::set<OutputKind>& outputs);

// %.17g formatting: shortest form that still round-trips a double exactly.
std::string format_double(double v);

}  // namespace phaselab
