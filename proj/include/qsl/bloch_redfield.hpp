// bloch_redfield.hpp — perturbative comparators for the spin-boson model:
// bath correlation kernels M1/M2 and the Bloch-vector propagators with
// (NM-BRE) and without (M-BRE) memory.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qsl/bath.hpp"
#include "qsl/errors.hpp"
#include "qsl/integrate.hpp"

namespace qsl::bre {

// M1(t) + i M2(t) = (4/π) ∫ dω J(ω) [coth(βω/2) cos ωt + i sin ωt].
// Tabulated on a half-step grid (δt/2) so that every RK4 stage time of the
// propagation grid is an exact table node.
struct KernelTable {
    double step{0.0};          // δt/2 of the propagation grid
    std::vector<double> m1;    // at i*step, i = 0..n
    std::vector<double> m2;
    double omega_upper{0.0};   // quadrature range [0, omega_upper]
    std::size_t omega_intervals{0};

    double t_max() const noexcept {
        return m1.empty() ? 0.0 : step * static_cast<double>(m1.size() - 1);
    }
};

struct KernelOptions {
    double omega_upper_factor{40.0};  // upper limit in units of ω_c
    double tolerance{1e-6};           // max table change under interval doubling
    std::size_t initial_intervals{256};
    std::size_t max_intervals{1u << 20};
};

namespace detail {

// Integrands at fixed t; the ω→0 limit of the coth integrand is finite for
// Ohmic J: J(ω)coth(βω/2) → ξπ/β.
inline double m1_integrand(const bath::OhmicExponential& j, double beta, double t, double w) {
    if (w == 0.0) return (4.0 / std::numbers::pi) * (j.xi * std::numbers::pi / beta);
    return (4.0 / std::numbers::pi) * j.spectral_density(w) / std::tanh(0.5 * beta * w) *
           std::cos(w * t);
}
inline double m2_integrand(const bath::OhmicExponential& j, double t, double w) {
    return (4.0 / std::numbers::pi) * j.spectral_density(w) * std::sin(w * t);
}

} // namespace detail

inline KernelTable compute_kernels(const bath::OhmicExponential& j, double beta,
                                   const num::TimeGrid& grid, const KernelOptions& opts = {}) {
    if (!(beta > 0.0)) throw InvalidParameter("compute_kernels: beta must be > 0");
    grid.validate();

    const double step = 0.5 * grid.dt;
    const std::size_t n_nodes = 2 * grid.n_steps + 1;
    const double w_upper = opts.omega_upper_factor * j.omega_c;

    KernelTable table;
    table.step = step;
    table.omega_upper = w_upper;
    table.m1.assign(n_nodes, 0.0);
    table.m2.assign(n_nodes, 0.0);

    auto fill = [&](std::size_t intervals, std::vector<double>& m1, std::vector<double>& m2) {
        const double dw = w_upper / static_cast<double>(intervals);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double t = static_cast<double>(i) * step;
            double acc1 = detail::m1_integrand(j, beta, t, 0.0) +
                          detail::m1_integrand(j, beta, t, w_upper);
            double acc2 = detail::m2_integrand(j, t, 0.0) + detail::m2_integrand(j, t, w_upper);
            for (std::size_t k = 1; k < intervals; ++k) {
                const double w = static_cast<double>(k) * dw;
                const double c = (k % 2 == 1) ? 4.0 : 2.0;
                acc1 += c * detail::m1_integrand(j, beta, t, w);
                acc2 += c * detail::m2_integrand(j, t, w);
            }
            m1[i] = acc1 * dw / 3.0;
            m2[i] = acc2 * dw / 3.0;
        }
    };

    std::size_t intervals = opts.initial_intervals;
    fill(intervals, table.m1, table.m2);
    std::vector<double> m1_next(n_nodes), m2_next(n_nodes);
    for (;;) {
        if (intervals * 2 > opts.max_intervals)
            throw QuadratureNotConverged("compute_kernels: interval doubling did not converge to " +
                                         std::to_string(opts.tolerance));
        intervals *= 2;
        fill(intervals, m1_next, m2_next);
        double delta = 0.0;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            delta = std::max(delta, std::abs(m1_next[i] - table.m1[i]));
            delta = std::max(delta, std::abs(m2_next[i] - table.m2[i]));
        }
        table.m1.swap(m1_next);
        table.m2.swap(m2_next);
        if (delta < opts.tolerance) break;
    }
    table.omega_intervals = intervals;
    table.m2[0] = 0.0;  // exact: sin(0) integrand
    return table;
}

// Bloch vector series B_m(t) with EOM-evaluated derivatives at grid points.
struct BlochVector {
    num::TimeGrid grid;
    std::vector<double> b;    // (n_points × 3)
    std::vector<double> db;

    void allocate(const num::TimeGrid& g) {
        grid = g;
        b.assign(g.n_points() * 3, 0.0);
        db.assign(g.n_points() * 3, 0.0);
    }
};

namespace detail {

inline void check_table(const KernelTable& table, const num::TimeGrid& grid) {
    if (std::abs(table.step - 0.5 * grid.dt) > 1e-12 * grid.dt)
        throw InvalidParameter("BRE propagators: kernel table step must equal dt/2");
    if (table.t_max() + 1e-9 * grid.dt < grid.t_end() - grid.t0)
        throw KernelRangeExceeded("BRE propagators: kernel table does not cover the grid");
}

// Γ kernels of the memory integrals at half-grid node i (t = i·step).
struct NmKernels {
    std::vector<double> gamma_x, gamma_xx, gamma_yy;
    std::vector<double> cum_gamma_x;  // ∫_0^t Γ_x
};

inline NmKernels build_nm_kernels(double delta, const KernelTable& table) {
    const std::size_t n = table.m1.size();
    NmKernels k;
    k.gamma_x.resize(n);
    k.gamma_xx.resize(n);
    k.gamma_yy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * table.step;
        k.gamma_x[i] = -std::sin(2.0 * delta * t) * table.m2[i];
        k.gamma_xx[i] = std::cos(2.0 * delta * t) * table.m1[i];
        k.gamma_yy[i] = table.m1[i];
    }
    k.cum_gamma_x = num::cumulative_trapezoid(k.gamma_x, table.step);
    return k;
}

// Trapezoid memory integral ∫_0^{t*} Γ(s) B(t*-s) ds at a stage time
// t* = half·(δt/2). The s-nodes advance in full δt steps; B at off-grid
// times is linearly interpolated between stored history points, and the
// s = 0 node uses the current stage value of B.
inline double history_convolution(const std::vector<double>& gamma_half,
                                  const std::vector<double>& hist, double stage_b,
                                  std::size_t half, double dt) {
    if (half == 0) return 0.0;
    const std::size_t full = half / 2;        // whole δt intervals inside [0, t*]
    const bool half_tail = (half % 2) == 1;

    // f(s_j) = Γ(jδt) · B(t* - jδt)
    auto b_at = [&](std::size_t j) -> double {
        // t* - jδt in half-grid units: half - 2j
        const std::size_t rem = half - 2 * j;
        const std::size_t kfull = rem / 2;
        if (rem % 2 == 0) return hist[kfull];
        return 0.5 * (hist[kfull] + hist[kfull + 1]);
    };

    double acc = 0.0;
    const double f0 = gamma_half[0] * stage_b;
    if (full >= 1) {
        acc += 0.5 * f0;
        for (std::size_t jj = 1; jj < full; ++jj) acc += gamma_half[2 * jj] * b_at(jj);
        acc += 0.5 * gamma_half[2 * full] * b_at(full);
        acc *= dt;
    }
    if (half_tail) {
        // terminal segment [full·δt, t*] of width δt/2; B(0) sits at s = t*
        const double f_a = (full >= 1) ? gamma_half[2 * full] * b_at(full) : f0;
        const double f_b = gamma_half[half] * hist[0];
        acc += 0.25 * dt * (f_a + f_b);
    }
    return acc;
}

} // namespace detail

// Non-Markovian Bloch-Redfield propagation (Born approximation):
//   dB_x/dt = -∫_0^t Γ_x - ∫_0^t Γ_xx(s) B_x(t-s) ds
//   dB_y/dt = 2Δ B_z - ∫_0^t Γ_yy(s) B_y(t-s) ds
//   dB_z/dt = -2Δ B_y
inline BlochVector nm_bre_propagate(double delta, const KernelTable& table,
                                    const num::TimeGrid& grid,
                                    const std::array<double, 3>& b0 = {0.0, 0.0, 1.0}) {
    grid.validate();
    detail::check_table(table, grid);
    const auto kernels = detail::build_nm_kernels(delta, table);

    BlochVector out;
    out.allocate(grid);
    const std::size_t pts = grid.n_points();
    std::vector<double> hx(pts), hy(pts);   // full-grid history of B_x, B_y
    double bx = b0[0], by = b0[1], bz = b0[2];
    hx[0] = bx;
    hy[0] = by;

    const double dt = grid.dt;
    const double two_delta = 2.0 * delta;

    // stage derivative at half-grid node `half` (t = t0 + half·δt/2)
    auto deriv = [&](double sx, double sy, double sz, std::size_t half, double* d) {
        d[0] = -kernels.cum_gamma_x[half] -
               detail::history_convolution(kernels.gamma_xx, hx, sx, half, dt);
        d[1] = two_delta * sz - detail::history_convolution(kernels.gamma_yy, hy, sy, half, dt);
        d[2] = -two_delta * sy;
    };

    double k1[3], k2[3], k3[3], k4[3];
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        deriv(bx, by, bz, 2 * k, k1);
        out.b[k * 3 + 0] = bx;
        out.b[k * 3 + 1] = by;
        out.b[k * 3 + 2] = bz;
        out.db[k * 3 + 0] = k1[0];
        out.db[k * 3 + 1] = k1[1];
        out.db[k * 3 + 2] = k1[2];
        if (k == grid.n_steps) break;

        deriv(bx + 0.5 * dt * k1[0], by + 0.5 * dt * k1[1], bz + 0.5 * dt * k1[2], 2 * k + 1, k2);
        deriv(bx + 0.5 * dt * k2[0], by + 0.5 * dt * k2[1], bz + 0.5 * dt * k2[2], 2 * k + 1, k3);
        deriv(bx + dt * k3[0], by + dt * k3[1], bz + dt * k3[2], 2 * k + 2, k4);
        bx += (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        by += (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        bz += (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
        hx[k + 1] = bx;
        hy[k + 1] = by;
    }
    return out;
}

// Markovian Bloch-Redfield propagation, with cumulative-integral coefficients
//   G_x(t)  = -∫_0^t sin(2Δs) M2(s) ds,
//   G_xx(t) = G_yy(t) = ∫_0^t cos(2Δs) M1(s) ds,
//   G_yz(t) = -∫_0^t sin(2Δs) M1(s) ds:
//   dB_x/dt = -G_x - G_xx B_x
//   dB_y/dt = 2Δ B_z - G_yy B_y - G_yz B_z
//   dB_z/dt = -2Δ B_y
inline BlochVector m_bre_propagate(double delta, const KernelTable& table,
                                   const num::TimeGrid& grid,
                                   const std::array<double, 3>& b0 = {0.0, 0.0, 1.0}) {
    grid.validate();
    detail::check_table(table, grid);

    const std::size_t n = table.m1.size();
    std::vector<double> sin_m2(n), cos_m1(n), sin_m1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * table.step;
        sin_m2[i] = std::sin(2.0 * delta * t) * table.m2[i];
        cos_m1[i] = std::cos(2.0 * delta * t) * table.m1[i];
        sin_m1[i] = std::sin(2.0 * delta * t) * table.m1[i];
    }
    const auto g_x_neg = num::cumulative_trapezoid(sin_m2, table.step);
    const auto g_xx = num::cumulative_trapezoid(cos_m1, table.step);
    const auto g_yz_neg = num::cumulative_trapezoid(sin_m1, table.step);

    BlochVector out;
    out.allocate(grid);
    double bx = b0[0], by = b0[1], bz = b0[2];
    const double dt = grid.dt;
    const double two_delta = 2.0 * delta;

    auto deriv = [&](double sx, double sy, double sz, std::size_t half, double* d) {
        d[0] = g_x_neg[half] - g_xx[half] * sx;
        d[1] = two_delta * sz - g_xx[half] * sy + g_yz_neg[half] * sz;
        d[2] = -two_delta * sy;
    };

    double k1[3], k2[3], k3[3], k4[3];
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        deriv(bx, by, bz, 2 * k, k1);
        out.b[k * 3 + 0] = bx;
        out.b[k * 3 + 1] = by;
        out.b[k * 3 + 2] = bz;
        out.db[k * 3 + 0] = k1[0];
        out.db[k * 3 + 1] = k1[1];
        out.db[k * 3 + 2] = k1[2];
        if (k == grid.n_steps) break;

        deriv(bx + 0.5 * dt * k1[0], by + 0.5 * dt * k1[1], bz + 0.5 * dt * k1[2], 2 * k + 1, k2);
        deriv(bx + 0.5 * dt * k2[0], by + 0.5 * dt * k2[1], bz + 0.5 * dt * k2[2], 2 * k + 1, k3);
        deriv(bx + dt * k3[0], by + dt * k3[1], bz + dt * k3[2], 2 * k + 2, k4);
        bx += (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        by += (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        bz += (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    }
    return out;
}

// Isolated-limit Bloch evolution from the spin-up state:
// B = (0, sin 2Δt, cos 2Δt), the kernels-vanish solution.
inline BlochVector isolated_bloch(double delta, const num::TimeGrid& grid) {
    grid.validate();
    BlochVector out;
    out.allocate(grid);
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.time(k) - grid.t0;
        out.b[k * 3 + 1] = std::sin(2.0 * delta * t);
        out.b[k * 3 + 2] = std::cos(2.0 * delta * t);
        out.db[k * 3 + 1] = 2.0 * delta * std::cos(2.0 * delta * t);
        out.db[k * 3 + 2] = -2.0 * delta * std::sin(2.0 * delta * t);
    }
    return out;
}

} // namespace qsl::bre
