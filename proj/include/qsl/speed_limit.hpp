// speed_limit.hpp — quantum-speed-limit times from reduced-dynamics series:
// fidelity endpoint, Hilbert-Schmidt norm rate, Simpson time average, and the
// τ_p bound family. Initial states are pure, so the Bures-angle numerator
// reduces to 1 - F; mixed initial states are out of scope and rejected
// upstream.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qsl/ensemble.hpp"
#include "qsl/errors.hpp"
#include "qsl/integrate.hpp"
#include "qsl/matrix.hpp"

namespace qsl::bound {

using dynamics::ReducedSeries;

// F(τ) = <P_nn(τ)> for the pure initial state |n><n|.
inline double fidelity_pure(const ReducedSeries& series, int initial_index, double tau) {
    if (initial_index < 0 || initial_index >= series.levels)
        throw IndexOutOfRange("fidelity_pure: initial index out of range");
    const std::size_t k = series.grid.index_of(tau);
    return series.value(k, initial_index, initial_index).real();
}

inline double fidelity_se(const ReducedSeries& series, int initial_index, double tau) {
    if (initial_index < 0 || initial_index >= series.levels)
        throw IndexOutOfRange("fidelity_se: initial index out of range");
    const std::size_t k = series.grid.index_of(tau);
    return series.value_se_re[series.flat(k, initial_index, initial_index)];
}

namespace detail {

// sqrt(Σ_nm |d<P_nm>/dt|²) from the projector derivatives.
inline double rate_projector(const ReducedSeries& s, std::size_t k) {
    double acc = 0.0;
    const int l = s.levels;
    for (int n = 0; n < l; ++n)
        for (int m = 0; m < l; ++m) acc += std::norm(s.deriv(k, n, m));
    return std::sqrt(acc);
}

// sqrt(½ Σ_m (dB_m/dt)²) from the Bloch components.
inline double rate_bloch(const dynamics::BlochData& b, std::size_t k) {
    const double dx = b.db[k * 3 + 0], dy = b.db[k * 3 + 1], dz = b.db[k * 3 + 2];
    return std::sqrt(0.5 * (dx * dx + dy * dy + dz * dz));
}

// First-order variance of the rate at grid point k.
inline double rate_variance(const ReducedSeries& s, std::size_t k, double rate) {
    if (rate <= 0.0) return 0.0;
    double var = 0.0;
    if (s.bloch) {
        const auto& b = *s.bloch;
        for (int m = 0; m < 3; ++m) {
            const double g = 0.5 * b.db[k * 3 + m] / rate;
            const double se = b.se_db[k * 3 + m];
            var += g * g * se * se;
        }
    } else {
        const int l = s.levels;
        for (int n = 0; n < l; ++n)
            for (int m = 0; m < l; ++m) {
                const std::size_t f = s.flat(k, n, m);
                const double gr = s.deriv_mean[f].real() / rate;
                const double gi = s.deriv_mean[f].imag() / rate;
                var += gr * gr * s.deriv_se_re[f] * s.deriv_se_re[f] +
                       gi * gi * s.deriv_se_im[f] * s.deriv_se_im[f];
            }
    }
    return var;
}

// Simpson quadrature weights matching simpson_integrate (terminal trapezoid
// on an odd interval count).
inline std::vector<double> simpson_weights(std::size_t n_samples, double dt) {
    if (n_samples < 3) throw TooFewSamples("simpson_weights: need at least 3 samples");
    std::vector<double> w(n_samples, 0.0);
    std::size_t intervals = n_samples - 1;
    std::size_t even = intervals;
    const bool tail = (intervals % 2) != 0;
    if (tail) even = intervals - 1;
    w[0] += dt / 3.0;
    w[even] += dt / 3.0;
    for (std::size_t k = 1; k < even; ++k) w[k] += (k % 2 == 1 ? 4.0 : 2.0) * dt / 3.0;
    if (tail) {
        w[intervals - 1] += 0.5 * dt;
        w[intervals] += 0.5 * dt;
    }
    return w;
}

inline num::ComplexMatrix drho_matrix(const ReducedSeries& s, std::size_t k) {
    num::ComplexMatrix m(s.levels);
    // ρ^{mn} = <P_nm>, so matrix entry (a, b) takes the derivative of <P_ba>
    for (int a = 0; a < s.levels; ++a)
        for (int b = 0; b < s.levels; ++b) m(a, b) = s.deriv(k, b, a);
    return m;
}

} // namespace detail

// sqrt(Tr (dρ/dt)²) at time t: the Bloch form when available (two-level
// series), otherwise the generic projector form.
inline double hs_norm_rate(const ReducedSeries& series, double t) {
    const std::size_t k = series.grid.index_of(t);
    if (series.bloch) return detail::rate_bloch(*series.bloch, k);
    return detail::rate_projector(series, k);
}

// Generic projector-form route, exposed for cross-checking the Bloch form.
inline double hs_norm_rate_projector(const ReducedSeries& series, double t) {
    return detail::rate_projector(series, series.grid.index_of(t));
}

// Closed-form QSL time of the isolated two-level subsystem:
// (1 - cos 2Δτ)/(2√2 Δ).
inline double iso_qsl(double delta, double tau) {
    if (!(delta > 0.0)) throw InvalidParameter("iso_qsl: delta must be > 0");
    return 0.5 * (1.0 - std::cos(2.0 * delta * tau)) / (std::sqrt(2.0) * delta);
}

struct Tau2Result {
    double tau{0.0};
    double fidelity{1.0};
    double fidelity_se{0.0};
    double e_tau{0.0};     // time-averaged HS norm rate
    double tau2{0.0};
    double tau2_se{0.0};
};

// τ₂ = (1 - F(τ)) / ((1/τ) ∫_0^τ dt sqrt(Tr (dρ/dt)²)), with the standard
// error propagated to first order treating grid points as independent.
inline Tau2Result qsl_tau2(const ReducedSeries& series, double tau) {
    const std::size_t k_tau = series.grid.index_of(tau);
    Tau2Result r;
    r.tau = tau;
    r.fidelity = fidelity_pure(series, series.initial_index, tau);
    r.fidelity_se = fidelity_se(series, series.initial_index, tau);
    if (k_tau == 0) return r;   // unit fidelity, zero numerator

    std::vector<double> rate(k_tau + 1);
    for (std::size_t k = 0; k <= k_tau; ++k)
        rate[k] = series.bloch ? detail::rate_bloch(*series.bloch, k)
                               : detail::rate_projector(series, k);
    const double span_t = tau - series.grid.t0;
    r.e_tau = num::simpson_integrate(rate, series.grid.dt) / span_t;
    if (!(r.e_tau > 0.0))
        throw ZeroDenominator("qsl_tau2: vanishing time-averaged norm rate (frozen state)");

    const double numerator = 1.0 - r.fidelity;
    r.tau2 = numerator / r.e_tau;

    const auto w = detail::simpson_weights(k_tau + 1, series.grid.dt);
    double var_d = 0.0;
    for (std::size_t k = 0; k <= k_tau; ++k)
        var_d += w[k] * w[k] * detail::rate_variance(series, k, rate[k]);
    var_d /= span_t * span_t;
    const double var_tau2 = (r.fidelity_se * r.fidelity_se) / (r.e_tau * r.e_tau) +
                            var_d * (numerator * numerator) / std::pow(r.e_tau, 4);
    r.tau2_se = std::sqrt(var_tau2);
    return r;
}

// τ_p for p ∈ {1, 2, ∞} with the denominator's norm taken per grid point via
// Schatten norms of the dρ/dt matrix. The p = 2 route reproduces qsl_tau2.
inline double qsl_taup(const ReducedSeries& series, double tau, num::NormOrder p) {
    const std::size_t k_tau = series.grid.index_of(tau);
    if (k_tau == 0) return 0.0;

    std::vector<double> rate(k_tau + 1);
    for (std::size_t k = 0; k <= k_tau; ++k)
        rate[k] = num::schatten_norm(detail::drho_matrix(series, k), p);
    const double e_tau = num::simpson_integrate(rate, series.grid.dt) / (tau - series.grid.t0);
    if (!(e_tau > 0.0))
        throw ZeroDenominator("qsl_taup: vanishing time-averaged norm rate (frozen state)");
    return (1.0 - fidelity_pure(series, series.initial_index, tau)) / e_tau;
}

struct QslReport {
    double tau{0.0};
    double fidelity{1.0};
    double fidelity_se{0.0};
    double e_tau_1{0.0}, e_tau_2{0.0}, e_tau_inf{0.0};
    double tau_1{0.0}, tau_2{0.0}, tau_inf{0.0};
    double tau_2_se{0.0};
    bool bound_ok{true};   // τ_QSL ≤ τ within statistical tolerance
};

inline QslReport qsl_report(const ReducedSeries& series, double tau) {
    QslReport rep;
    rep.tau = tau;
    const std::size_t k_tau = series.grid.index_of(tau);
    rep.fidelity = fidelity_pure(series, series.initial_index, tau);
    rep.fidelity_se = fidelity_se(series, series.initial_index, tau);
    if (k_tau == 0) return rep;

    const auto t2 = qsl_tau2(series, tau);
    rep.e_tau_2 = t2.e_tau;
    rep.tau_2 = t2.tau2;
    rep.tau_2_se = t2.tau2_se;

    std::vector<double> rate1(k_tau + 1), rate_inf(k_tau + 1);
    for (std::size_t k = 0; k <= k_tau; ++k) {
        const auto m = detail::drho_matrix(series, k);
        rate1[k] = num::schatten_norm(m, num::NormOrder::one);
        rate_inf[k] = num::schatten_norm(m, num::NormOrder::infinity);
    }
    const double span_t = tau - series.grid.t0;
    rep.e_tau_1 = num::simpson_integrate(rate1, series.grid.dt) / span_t;
    rep.e_tau_inf = num::simpson_integrate(rate_inf, series.grid.dt) / span_t;
    const double numerator = 1.0 - rep.fidelity;
    rep.tau_1 = rep.e_tau_1 > 0.0 ? numerator / rep.e_tau_1 : 0.0;
    rep.tau_inf = rep.e_tau_inf > 0.0 ? numerator / rep.e_tau_inf : 0.0;

    // the max of the bound family is τ_inf; scale τ₂'s error as a proxy
    const double se_inf = rep.tau_2 > 0.0 ? rep.tau_2_se * rep.tau_inf / rep.tau_2 : 0.0;
    rep.bound_ok = rep.tau_inf <= tau + 3.0 * se_inf + 1e-12 * tau;
    return rep;
}

} // namespace qsl::bound
