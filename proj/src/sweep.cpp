#include "phaselab/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/version.hpp"

namespace phaselab {

namespace {

using nlohmann::json;

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Flat row forms shared by the direct writer and the report.json re-emitter.
struct CellRow {
    double beta, m;
    int n;
    double eps;
    long samples;
    std::uint64_t seed;
    std::string method;
    bool restricted;
    double mean_f, std_error;
};

struct TheoryRow {
    double m, beta_at_v, beta_c_v;
    std::optional<double> window_lo, window_hi;
    double i_m;
};

struct ReportDoc {
    json meta;
    std::vector<CellRow> cells;
    std::vector<TheoryRow> theory;
};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_cells_csv(const ReportDoc& doc, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "beta,m,n,eps,samples,seed,method,restricted,mean_f,stderr\n";
    for (const auto& c : doc.cells)
        out << format_double(c.beta) << ',' << format_double(c.m) << ',' << c.n << ','
            << format_double(c.eps) << ',' << c.samples << ',' << c.seed << ',' << c.method << ','
            << (c.restricted ? 1 : 0) << ',' << format_double(c.mean_f) << ','
            << format_double(c.std_error) << '\n';
}

void write_theory_csv(const ReportDoc& doc, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "m,beta_at,beta_c,window_lo,window_hi,i_m\n";
    for (const auto& t : doc.theory) {
        out << format_double(t.m) << ',' << format_double(t.beta_at_v) << ','
            << format_double(t.beta_c_v) << ',';
        if (t.window_lo) out << format_double(*t.window_lo);
        out << ',';
        if (t.window_hi) out << format_double(*t.window_hi);
        out << ',' << format_double(t.i_m) << '\n';
    }
}

// Static-figure generator: reads the two CSVs written alongside it and
// renders the phase plane as vector graphics.
void write_plot_script(const std::filesystem::path& path) {
    auto out = open_out(path);
    out << R"PY(#!/usr/bin/env python3
"""Render the phase-plane report: mean_f heat maps per system size with the
AT boundary beta = 1/(1 - m^2) and the envelope knee beta_c(m) overlaid."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
CELLS = HERE / "cells.csv"
THEORY = HERE / "theory.csv"
OUT = HERE / "phase.svg"

with open(CELLS, newline="") as fh:
    cells = list(csv.DictReader(fh))
with open(THEORY, newline="") as fh:
    theory = list(csv.DictReader(fh))

sizes = sorted({int(c["n"]) for c in cells})
fig, axes = plt.subplots(1, len(sizes), figsize=(5.5 * len(sizes), 4.5),
                         squeeze=False, sharey=True)

for ax, n in zip(axes[0], sizes):
    rows = [c for c in cells if int(c["n"]) == n]
    ms = sorted({float(c["m"]) for c in rows})
    betas = sorted({float(c["beta"]) for c in rows})
    grid = np.full((len(betas), len(ms)), np.nan)
    for c in rows:
        grid[betas.index(float(c["beta"])), ms.index(float(c["m"]))] = float(c["mean_f"])
    if len(ms) > 1 and len(betas) > 1:
        mesh = ax.pcolormesh(ms, betas, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="mean_f")
    else:
        ax.scatter([float(c["m"]) for c in rows], [float(c["beta"]) for c in rows],
                   c=[float(c["mean_f"]) for c in rows], cmap="viridis")
    m_dense = np.linspace(min(ms) if len(ms) > 1 else -0.99,
                          max(ms) if len(ms) > 1 else 0.99, 512)
    ax.plot(m_dense, 1.0 / (1.0 - m_dense ** 2), "w--", lw=1.2, label="beta_AT")
    t_m = [float(t["m"]) for t in theory]
    t_bc = [float(t["beta_c"]) for t in theory]
    order = np.argsort(t_m)
    ax.plot(np.array(t_m)[order], np.array(t_bc)[order], "r-", lw=1.2, label="beta_c")
    ax.set_xlabel("m")
    ax.set_ylabel("beta")
    ax.set_ylim(0, max(betas) * 1.1 if betas else 1.0)
    ax.set_title(f"N = {n}")
    ax.legend(loc="upper left", fontsize=8)

fig.tight_layout()
fig.savefig(OUT)
print(f"wrote {OUT}")
)PY";
}

json doc_to_json(const ReportDoc& doc) {
    json j = doc.meta;
    j["cells"] = json::array();
    for (const auto& c : doc.cells)
        j["cells"].push_back({{"beta", c.beta},
                              {"m", c.m},
                              {"n", c.n},
                              {"eps", c.eps},
                              {"samples", c.samples},
                              {"seed", c.seed},
                              {"method", c.method},
                              {"restricted", c.restricted},
                              {"mean_f", c.mean_f},
                              {"stderr", c.std_error}});
    j["theory"] = json::array();
    for (const auto& t : doc.theory) {
        json row = {{"m", t.m}, {"beta_at", t.beta_at_v}, {"beta_c", t.beta_c_v}, {"i_m", t.i_m}};
        row["window_lo"] = t.window_lo ? json(*t.window_lo) : json(nullptr);
        row["window_hi"] = t.window_hi ? json(*t.window_hi) : json(nullptr);
        j["theory"].push_back(row);
    }
    return j;
}

ReportDoc doc_from_json(const json& j) {
    ReportDoc doc;
    doc.meta = j;
    doc.meta.erase("cells");
    doc.meta.erase("theory");
    for (const auto& c : j.at("cells"))
        doc.cells.push_back(CellRow{c.at("beta").get<double>(), c.at("m").get<double>(),
                                    c.at("n").get<int>(), c.at("eps").get<double>(),
                                    c.at("samples").get<long>(),
                                    c.at("seed").get<std::uint64_t>(),
                                    c.at("method").get<std::string>(),
                                    c.at("restricted").get<bool>(), c.at("mean_f").get<double>(),
                                    c.at("stderr").get<double>()});
    for (const auto& t : j.at("theory")) {
        TheoryRow row{t.at("m").get<double>(), t.at("beta_at").get<double>(),
                      t.at("beta_c").get<double>(), std::nullopt, std::nullopt,
                      t.at("i_m").get<double>()};
        if (!t.at("window_lo").is_null()) row.window_lo = t.at("window_lo").get<double>();
        if (!t.at("window_hi").is_null()) row.window_hi = t.at("window_hi").get<double>();
        doc.theory.push_back(row);
    }
    return doc;
}

std::vector<std::string> emit(const ReportDoc& doc, const json* full_json,
                              const std::string& destination,
                              const std::set<OutputKind>& outputs) {
    namespace fs = std::filesystem;
    const fs::path dir(destination);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("destination is not writable: " + destination);

    const bool want_csv = outputs.count(OutputKind::csv) || outputs.count(OutputKind::plot);
    std::vector<std::string> written;
    if (want_csv) {
        write_cells_csv(doc, dir / "cells.csv");
        written.push_back((dir / "cells.csv").string());
        write_theory_csv(doc, dir / "theory.csv");
        written.push_back((dir / "theory.csv").string());
    }
    if (outputs.count(OutputKind::json)) {
        auto out = open_out(dir / "report.json");
        out << (full_json ? *full_json : doc_to_json(doc)).dump(2) << '\n';
        written.push_back((dir / "report.json").string());
    }
    if (outputs.count(OutputKind::plot)) {
        write_plot_script(dir / "plot.py");
        written.push_back((dir / "plot.py").string());
    }
    return written;
}

void validate_spec(const SweepSpec& spec) {
    if (spec.beta_grid.empty() || spec.m_grid.empty() || spec.n_list.empty())
        throw std::invalid_argument("sweep: beta, m and n grids must be nonempty");
    for (double b : spec.beta_grid)
        if (!(b >= 0.0) || !std::isfinite(b))
            throw std::invalid_argument("sweep: every beta must be finite and >= 0");
    for (double m : spec.m_grid)
        if (!(std::abs(m) < 1.0))
            throw std::invalid_argument("sweep: every m must lie in (-1, 1)");
    for (int n : spec.n_list)
        if (n < 1) throw std::invalid_argument("sweep: every n must be >= 1");
    if (!(spec.eps >= 0.0)) throw std::invalid_argument("sweep: eps must be >= 0");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double estimate_work(const SweepSpec& spec) {
    double work = 0.0;
    for (int n : spec.n_list) {
        double per_sample;
        if (spec.plan.method == Method::exact) {
            per_sample = std::ldexp(1.0, n);  // 2^n flip steps
        } else {
            const double rungs =
                spec.plan.mc ? static_cast<double>(spec.plan.mc->ladder.size()) : 13.0;
            const double sweeps =
                spec.plan.mc ? spec.plan.mc->sweeps_per_rung : McConfig{}.sweeps_per_rung;
            per_sample = rungs * 2.0 * sweeps * n;
        }
        work += static_cast<double>(spec.beta_grid.size()) *
                static_cast<double>(spec.m_grid.size()) * spec.plan.samples * per_sample;
    }
    return work;
}

PhaseGrid run_sweep(const SweepSpec& spec) {
    validate_spec(spec);
    const double work = estimate_work(spec);
    if (work > spec.budget)
        throw resource_error("sweep refused: estimated work " + format_double(work) +
                             " flip-steps exceeds the budget " + format_double(spec.budget));

    PhaseGrid grid;
    grid.spec = spec;
    grid.work_estimate = work;
    for (int n : spec.n_list) {
        for (double m : spec.m_grid) {
            for (double beta : spec.beta_grid) {
                const ModelParams params(n, beta, m, spec.eps);
                DisorderPlan plan = spec.plan;
                if (plan.method == Method::monte_carlo && !plan.mc)
                    plan.mc = default_mc_config(beta);
                grid.cells.push_back(quenched_free_energy(params, plan, spec.restricted));
            }
        }
    }
    for (double m : spec.m_grid) grid.overlays.push_back(theory_overlay(m));
    for (double m : spec.m_grid)
        for (double beta : spec.beta_grid) grid.envelope_values.push_back(envelope(beta, m));
    return grid;
}

std::vector<std::string> write_report(const PhaseGrid& grid, const std::string& destination) {
    ReportDoc doc;
    for (const auto& cell : grid.cells)
        doc.cells.push_back(CellRow{cell.beta, cell.m, cell.n, cell.eps,
                                    static_cast<long>(cell.per_sample.size()), cell.base_seed,
                                    method_name(cell.method), cell.restricted, cell.mean_f,
                                    cell.std_error});
    for (const auto& overlay : grid.overlays) {
        TheoryRow row{overlay.m, overlay.beta_at, overlay.beta_c, std::nullopt, std::nullopt,
                      overlay.i_m};
        if (overlay.window) {
            row.window_lo = overlay.window->lo;
            row.window_hi = overlay.window->hi;
        }
        doc.theory.push_back(row);
    }
    doc.meta["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    doc.meta["generated_utc"] = utc_timestamp();
    doc.meta["budget"] = {{"limit", grid.spec.budget}, {"estimated_work", grid.work_estimate}};
    doc.meta["parameters"] = {{"beta_grid", grid.spec.beta_grid},
                              {"m_grid", grid.spec.m_grid},
                              {"n_list", grid.spec.n_list},
                              {"eps", grid.spec.eps},
                              {"samples", grid.spec.plan.samples},
                              {"seed", grid.spec.plan.base_seed},
                              {"parallelism", grid.spec.plan.parallelism},
                              {"method", method_name(grid.spec.plan.method)},
                              {"restricted", grid.spec.restricted}};
    json envelope_rows = json::array();
    {
        std::size_t idx = 0;
        for (double m : grid.spec.m_grid)
            for (double beta : grid.spec.beta_grid)
                envelope_rows.push_back(
                    {{"m", m}, {"beta", beta}, {"value", grid.envelope_values[idx++]}});
    }
    doc.meta["envelope"] = std::move(envelope_rows);

    return emit(doc, nullptr, destination, grid.spec.outputs);
}

std::vector<std::string> rewrite_report(const std::string& json_path, const std::string& destination,
                                        const std::set<OutputKind>& outputs) {
    std::ifstream in(json_path);
    if (!in) throw std::invalid_argument("cannot read report file: " + json_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed report file " + json_path + ": " + e.what());
    }
    const ReportDoc doc = doc_from_json(j);
    return emit(doc, &j, destination, outputs);
}

}  // namespace phaselab
