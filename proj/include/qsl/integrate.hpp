// integrate.hpp — uniform time grids, fixed-step RK4, and composite Simpson
// quadrature. Step sizes stay fixed on purpose: the reference results this
// library reproduces were generated at pinned δt values.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl::num {

struct TimeGrid {
    double t0{0.0};
    double dt{0.0};
    std::size_t n_steps{0};

    void validate() const {
        if (!(dt > 0.0)) throw InvalidParameter("TimeGrid: dt must be > 0");
        if (n_steps < 1) throw InvalidParameter("TimeGrid: n_steps must be >= 1");
    }

    std::size_t n_points() const noexcept { return n_steps + 1; }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    double t_end() const noexcept { return time(n_steps); }

    // Grid index of t, or throws if t is not a grid point (within 1e-9 dt).
    std::size_t index_of(double t) const {
        const double x = (t - t0) / dt;
        const auto k = static_cast<long long>(std::llround(x));
        if (k < 0 || static_cast<std::size_t>(k) > n_steps || std::abs(x - static_cast<double>(k)) > 1e-9)
            throw IndexOutOfRange("TimeGrid: time is not on the grid");
        return static_cast<std::size_t>(k);
    }
};

namespace detail {

inline bool scalar_finite(double x) noexcept { return std::isfinite(x); }
inline bool scalar_finite(std::complex<double> z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class State>
bool state_finite(const State& y) noexcept {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!scalar_finite(y[i])) return false;
    return true;
}

} // namespace detail

// One classical four-stage RK4 step. `deriv(y, t)` returns the state
// derivative; every stage output is checked for NaN/Inf.
template <class State, class Deriv>
State rk4_step(Deriv&& deriv, const State& y, double t, double dt) {
    const std::size_t n = y.size();

    State k1 = deriv(y, t);
    if (!detail::state_finite(k1)) throw NonFiniteDerivative("rk4_step: stage 1 not finite");

    State tmp = y;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    State k2 = deriv(tmp, t + 0.5 * dt);
    if (!detail::state_finite(k2)) throw NonFiniteDerivative("rk4_step: stage 2 not finite");

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    State k3 = deriv(tmp, t + 0.5 * dt);
    if (!detail::state_finite(k3)) throw NonFiniteDerivative("rk4_step: stage 3 not finite");

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    State k4 = deriv(tmp, t + dt);
    if (!detail::state_finite(k4)) throw NonFiniteDerivative("rk4_step: stage 4 not finite");

    State out = y;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Composite Simpson rule on a uniform grid. An odd interval count falls back
// to Simpson on the first n-1 intervals plus a terminal trapezoid
// (O(dt^3) on one subinterval); `tail_trapezoid` reports when that happened.
inline double simpson_integrate(std::span<const double> samples, double dt,
                                bool* tail_trapezoid = nullptr) {
    if (!(dt > 0.0)) throw InvalidParameter("simpson_integrate: dt must be > 0");
    if (samples.size() < 3) throw TooFewSamples("simpson_integrate: need at least 3 samples");

    const std::size_t intervals = samples.size() - 1;
    std::size_t even_intervals = intervals;
    bool tail = false;
    if (intervals % 2 != 0) {
        even_intervals = intervals - 1;
        tail = true;
    }
    if (tail_trapezoid) *tail_trapezoid = tail;

    double acc = samples[0] + samples[even_intervals];
    for (std::size_t k = 1; k < even_intervals; ++k)
        acc += (k % 2 == 1 ? 4.0 : 2.0) * samples[k];
    double result = acc * dt / 3.0;
    if (tail) result += 0.5 * dt * (samples[intervals - 1] + samples[intervals]);
    return result;
}

inline double trapezoid_integrate(std::span<const double> samples, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("trapezoid_integrate: dt must be > 0");
    if (samples.size() < 2) throw TooFewSamples("trapezoid_integrate: need at least 2 samples");
    double acc = 0.5 * (samples.front() + samples.back());
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) acc += samples[k];
    return acc * dt;
}

// Cumulative trapezoid: out[k] = ∫_0^{k dt} (out[0] = 0).
inline std::vector<double> cumulative_trapezoid(std::span<const double> samples, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("cumulative_trapezoid: dt must be > 0");
    std::vector<double> out(samples.size(), 0.0);
    for (std::size_t k = 1; k < samples.size(); ++k)
        out[k] = out[k - 1] + 0.5 * dt * (samples[k - 1] + samples[k]);
    return out;
}

} // namespace qsl::num
