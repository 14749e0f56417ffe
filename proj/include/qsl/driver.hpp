// driver.hpp — run orchestration: model assembly from a RunConfig, sweep
// drivers, QSL report rows, and structured result emission. Output files are
// plain-text delimited tables; a comment block carries the fully resolved
// configuration so figures can be regenerated with provenance.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qsl/bloch_redfield.hpp"
#include "qsl/config.hpp"
#include "qsl/ensemble.hpp"
#include "qsl/errors.hpp"
#include "qsl/fmo.hpp"
#include "qsl/speed_limit.hpp"
#include "qsl/spin_boson.hpp"
#include "qsl/units.hpp"

namespace qsl::cli {

struct ResultRow {
    std::string sweep_axis{"none"};
    double sweep_value{std::numeric_limits<double>::quiet_NaN()};
    double xi{std::numeric_limits<double>::quiet_NaN()};
    double temperature{std::numeric_limits<double>::quiet_NaN()};
    double tau{0.0};
    double fidelity{1.0};
    double fidelity_se{0.0};
    double tau_1{0.0};
    double tau_2{0.0};
    double tau_2_se{0.0};
    double tau_inf{0.0};
    double tau_iso{std::numeric_limits<double>::quiet_NaN()};
    bool bound_ok{true};
    std::size_t n_traj{0};
    std::size_t n_failed{0};
    double wall_seconds{0.0};
};

struct RunOutcome {
    RunConfig config;
    std::vector<ResultRow> rows;
    std::vector<std::string> files;   // written output paths
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline num::TimeGrid make_grid(double dt, double tau_max) {
    const double steps = tau_max / dt;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (n < 1 || std::abs(steps - static_cast<double>(n)) > 1e-9)
        throw ValidationError("config: tau must be a positive multiple of dt");
    return num::TimeGrid{0.0, dt, n};
}

inline dynamics::SpinBosonModel make_sbm_model(const SbmParams& p, double xi, double temperature) {
    const double beta = 1.0 / temperature;
    auto b = bath::discretize_ohmic(xi, p.omega_c, p.omega_max, p.n_osc, beta);
    return dynamics::SpinBosonModel(p.delta, std::move(b));
}

inline dynamics::FmoModel make_fmo_model(const FmoParams& p, double temperature_k) {
    const double beta = 1.0 / (temperature_k * units::kelvin_to_rad_per_fs);
    const double lambda = p.lambda_d_cm * units::wavenumber_to_rad_per_fs;
    auto b = bath::discretize_debye(lambda, p.tau_c_fs, p.omega_max, p.n_osc, beta);

    auto table_cm = p.site_table_file.empty() ? dynamics::fmo_site_table()
                                              : dynamics::load_fmo_table(p.site_table_file);
    dynamics::FmoTable table{};
    std::array<double, dynamics::kFmoSites> energies{};
    for (int n = 0; n < dynamics::kFmoSites; ++n) {
        energies[n] = table_cm[n][n] * units::wavenumber_to_rad_per_fs;
        for (int m = 0; m < dynamics::kFmoSites; ++m)
            table[n][m] = table_cm[n][m] * units::wavenumber_to_rad_per_fs;
    }
    auto v = dynamics::build_fmo_hamiltonian(energies, table, b);
    if (p.subtract_min_energy) {
        double vmin = v[0][0];
        for (int n = 1; n < dynamics::kFmoSites; ++n) vmin = std::min(vmin, v[n][n]);
        for (int n = 0; n < dynamics::kFmoSites; ++n) v[n][n] -= vmin;
    }
    return dynamics::FmoModel(v, std::move(b), p.initial_site - 1);
}

inline dynamics::EnsembleOptions ensemble_options(const EnsembleParams& e) {
    dynamics::EnsembleOptions opts;
    opts.n_traj = e.n_traj;
    opts.master_seed = e.master_seed;
    opts.deterministic = e.deterministic;
    opts.workers = e.workers;
    return opts;
}

// One reduced-dynamics series for a resolved parameter point.
inline dynamics::ReducedSeries point_series(const RunConfig& c, double xi, double temperature,
                                            const num::TimeGrid& grid) {
    if (c.model == "fmo") {
        const auto model = make_fmo_model(c.fmo, temperature);
        return dynamics::run_ensemble(model, grid, ensemble_options(c.ensemble));
    }
    if (c.method == "decide") {
        const auto model = make_sbm_model(c.sbm, xi, temperature);
        return dynamics::run_ensemble(model, grid, ensemble_options(c.ensemble));
    }
    if (c.method == "isolated") {
        const auto bloch = bre::isolated_bloch(c.sbm.delta, grid);
        return dynamics::series_from_bloch(grid, bloch.b, bloch.db);
    }
    const bath::OhmicExponential j{xi, c.sbm.omega_c};
    const auto kernels = bre::compute_kernels(j, 1.0 / temperature, grid);
    const auto bloch = (c.method == "nm_bre") ? bre::nm_bre_propagate(c.sbm.delta, kernels, grid)
                                              : bre::m_bre_propagate(c.sbm.delta, kernels, grid);
    return dynamics::series_from_bloch(grid, bloch.b, bloch.db);
}

inline ResultRow make_row(const RunConfig& c, const dynamics::ReducedSeries& series, double tau,
                          double xi, double temperature) {
    const auto rep = bound::qsl_report(series, tau);
    ResultRow row;
    row.xi = (c.model == "sbm") ? xi : std::numeric_limits<double>::quiet_NaN();
    row.temperature = temperature;
    row.tau = tau;
    row.fidelity = rep.fidelity;
    row.fidelity_se = rep.fidelity_se;
    row.tau_1 = rep.tau_1;
    row.tau_2 = rep.tau_2;
    row.tau_2_se = rep.tau_2_se;
    row.tau_inf = rep.tau_inf;
    row.tau_iso = (c.model == "sbm") ? bound::iso_qsl(c.sbm.delta, tau)
                                     : std::numeric_limits<double>::quiet_NaN();
    row.bound_ok = rep.bound_ok;
    row.n_traj = series.n_traj;
    row.n_failed = series.n_failed;
    return row;
}

inline void write_config_comment(std::ofstream& out, const RunConfig& c) {
    out << "# config: " << serialize_config(c, -1) << "\n";
    out << "# master_seed: " << c.ensemble.master_seed << "\n";
}

inline std::string write_series_file(const std::filesystem::path& dir, const std::string& label,
                                     const RunConfig& c, const dynamics::ReducedSeries& s) {
    const auto path = dir / ("series_" + label + ".tsv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "# qslsim time series: " << label << "\n";
    write_config_comment(out, c);

    const int l = s.levels;
    out << "t";
    if (s.bloch) {
        for (const char* m : {"bx", "by", "bz"}) out << '\t' << m;
        for (const char* m : {"dbx", "dby", "dbz"}) out << '\t' << m;
        for (const char* m : {"se_bx", "se_by", "se_bz"}) out << '\t' << m;
        for (const char* m : {"se_dbx", "se_dby", "se_dbz"}) out << '\t' << m;
    } else {
        for (int n = 1; n <= l; ++n)
            for (int m = 1; m <= l; ++m)
                out << "\tP" << n << m << "_re\tP" << n << m << "_im\tdP" << n << m << "_re\tdP"
                    << n << m << "_im\tse_P" << n << m << "_re\tse_P" << n << m << "_im\tse_dP"
                    << n << m << "_re\tse_dP" << n << m << "_im";
    }
    out << "\trate\n";

    for (std::size_t k = 0; k < s.grid.n_points(); ++k) {
        out << fmt(s.grid.time(k));
        if (s.bloch) {
            const auto& b = *s.bloch;
            for (int m = 0; m < 3; ++m) out << '\t' << fmt(b.b[k * 3 + m]);
            for (int m = 0; m < 3; ++m) out << '\t' << fmt(b.db[k * 3 + m]);
            for (int m = 0; m < 3; ++m) out << '\t' << fmt(b.se_b[k * 3 + m]);
            for (int m = 0; m < 3; ++m) out << '\t' << fmt(b.se_db[k * 3 + m]);
        } else {
            for (int n = 0; n < l; ++n)
                for (int m = 0; m < l; ++m) {
                    const std::size_t f = s.flat(k, n, m);
                    out << '\t' << fmt(s.value_mean[f].real()) << '\t' << fmt(s.value_mean[f].imag())
                        << '\t' << fmt(s.deriv_mean[f].real()) << '\t' << fmt(s.deriv_mean[f].imag())
                        << '\t' << fmt(s.value_se_re[f]) << '\t' << fmt(s.value_se_im[f]) << '\t'
                        << fmt(s.deriv_se_re[f]) << '\t' << fmt(s.deriv_se_im[f]);
                }
        }
        out << '\t' << fmt(bound::hs_norm_rate(s, s.grid.time(k))) << '\n';
    }
    return path.string();
}

inline std::string write_summary_file(const std::filesystem::path& dir, const RunConfig& c,
                                      const std::vector<ResultRow>& rows) {
    const auto path = dir / "summary.tsv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "# qslsim summary\n";
    write_config_comment(out, c);
    out << "sweep_axis\tsweep_value\txi\ttemperature\ttau\tfidelity\tfidelity_se\ttau_1\ttau_2"
           "\ttau_2_se\ttau_inf\ttau_iso\tbound_ok\tn_traj\tn_failed\twall_s\n";
    for (const auto& r : rows) {
        out << r.sweep_axis << '\t' << fmt(r.sweep_value) << '\t' << fmt(r.xi) << '\t'
            << fmt(r.temperature) << '\t' << fmt(r.tau) << '\t' << fmt(r.fidelity) << '\t'
            << fmt(r.fidelity_se) << '\t' << fmt(r.tau_1) << '\t' << fmt(r.tau_2) << '\t'
            << fmt(r.tau_2_se) << '\t' << fmt(r.tau_inf) << '\t' << fmt(r.tau_iso) << '\t'
            << (r.bound_ok ? 1 : 0) << '\t' << r.n_traj << '\t' << r.n_failed << '\t';
        if (c.ensemble.deterministic)
            out << "-";   // keeps deterministic outputs byte-identical
        else
            out << fmt(r.wall_seconds);
        out << '\n';
    }
    return path.string();
}

} // namespace detail

// Executes the configured run; writes summary.tsv (and per-point series files
// when requested) under output.dir. Errors raised while processing a sweep
// point are re-thrown tagged with the sweep coordinate.
inline RunOutcome run(const RunConfig& config) {
    validate(config);
    RunOutcome outcome;
    outcome.config = config;

    const std::filesystem::path dir(config.output.dir);
    std::filesystem::create_directories(dir);

    const double base_temp =
        (config.model == "fmo") ? config.fmo.temperature_k : config.sbm.temperature;
    const double base_xi = config.sbm.xi;

    struct Point {
        std::string axis{"none"};
        double value{std::numeric_limits<double>::quiet_NaN()};
        double xi;
        double temperature;
        std::vector<double> taus;
        std::string label{"point"};
    };

    std::vector<Point> points;
    if (!config.sweep) {
        points.push_back({"none", std::numeric_limits<double>::quiet_NaN(), base_xi, base_temp,
                          {config.grid.tau}, "point"});
    } else {
        auto values = config.sweep->values;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        const auto& axis = config.sweep->axis;
        if (axis == "tau") {
            Point p{axis, std::numeric_limits<double>::quiet_NaN(), base_xi, base_temp, values,
                    "tau_sweep"};
            points.push_back(std::move(p));
        } else if (axis == "coupling") {
            for (double v : values)
                points.push_back({axis, v, v, base_temp, {config.grid.tau},
                                  "xi_" + detail::fmt_value(v)});
        } else {
            for (double v : values)
                points.push_back({axis, v, base_xi, v, {config.grid.tau},
                                  "T_" + detail::fmt_value(v)});
        }
    }

    for (const auto& point : points) {
        const double tau_max = *std::max_element(point.taus.begin(), point.taus.end());
        try {
            const auto grid = detail::make_grid(config.grid.dt, tau_max);
            const auto start = std::chrono::steady_clock::now();
            const auto series = detail::point_series(config, point.xi, point.temperature, grid);
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            for (double tau : point.taus) {
                auto row = detail::make_row(config, series, tau, point.xi, point.temperature);
                row.sweep_axis = point.axis;
                row.sweep_value = (point.axis == "tau") ? tau : point.value;
                row.wall_seconds = wall;
                outcome.rows.push_back(std::move(row));
            }
            if (config.output.emit_series)
                outcome.files.push_back(detail::write_series_file(dir, point.label, config, series));
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep point " + point.axis + "=" +
                                     detail::fmt_value(point.axis == "tau" ? tau_max : point.value) +
                                     ": " + e.what());
        }
    }

    outcome.files.push_back(detail::write_summary_file(dir, config, outcome.rows));
    return outcome;
}

// Minimal reader for the emitted tables (consumed by the self-consistency
// checks): '#' comments skipped, first non-comment line is the header.
struct TableFile {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw IndexOutOfRange("TableFile: no column named " + name);
    }
};

inline TableFile read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    TableFile t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (t.columns.empty()) {
            std::string col;
            while (ls >> col) t.columns.push_back(col);
            continue;
        }
        std::vector<double> row;
        std::string cell;
        while (ls >> cell) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace qsl::cli
