// propagate.hpp — single-trajectory RK4 propagation with derivative capture:
// observables and their EOM-evaluated derivatives are recorded at every grid
// point (the derivative comes from the first RK4 stage, never from finite
// differences).
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/integrate.hpp"
#include "qsl/layout.hpp"

namespace qsl::dynamics {

struct TrajectoryRecord {
    num::TimeGrid grid;
    int n_obs{0};
    std::vector<Complex> values;   // (n_steps+1) × n_obs, row-major
    std::vector<Complex> derivs;   // same layout
    std::vector<std::vector<Complex>> full_states;  // opt-in debug capture

    void resize(const num::TimeGrid& g, int n_observables) {
        grid = g;
        n_obs = n_observables;
        values.assign(g.n_points() * n_observables, Complex(0.0, 0.0));
        derivs.assign(g.n_points() * n_observables, Complex(0.0, 0.0));
        full_states.clear();
    }

    std::span<const Complex> values_at(std::size_t k) const {
        return {values.data() + k * n_obs, static_cast<std::size_t>(n_obs)};
    }
    std::span<const Complex> derivs_at(std::size_t k) const {
        return {derivs.data() + k * n_obs, static_cast<std::size_t>(n_obs)};
    }
};

struct PropagateOptions {
    bool record_full_state{false};
};

namespace detail {

inline bool all_finite(const std::vector<Complex>& y) noexcept {
    for (const auto& z : y)
        if (!(std::isfinite(z.real()) && std::isfinite(z.imag()))) return false;
    return true;
}

} // namespace detail

// Propagates `state` (already initialized at t = grid.t0) across the grid.
// Throws NonFiniteDerivative as soon as the state leaves the finite domain;
// the caller flags and excludes the trajectory.
template <class Model>
void propagate_trajectory(const Model& model, DecideState& state, const num::TimeGrid& grid,
                          TrajectoryRecord& record, const PropagateOptions& opts = {}) {
    grid.validate();
    const std::size_t n = model.layout().state_size();
    if (state.x.size() != n) throw LayoutMismatch("propagate_trajectory: state size mismatch");

    record.resize(grid, model.n_observables());
    if (opts.record_full_state) record.full_states.reserve(grid.n_points());

    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::vector<Complex>& y = state.x;
    if (!detail::all_finite(y))
        throw NonFiniteDerivative("propagate_trajectory: non-finite initial state");

    const double dt = grid.dt;
    const int n_obs = model.n_observables();
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        model.eval_deriv(y, k1);
        model.record_observables(y, {record.values.data() + k * n_obs, static_cast<std::size_t>(n_obs)});
        model.record_observable_derivs(k1, {record.derivs.data() + k * n_obs, static_cast<std::size_t>(n_obs)});
        if (opts.record_full_state) record.full_states.push_back(y);
        if (k == grid.n_steps) break;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        model.eval_deriv(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        model.eval_deriv(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
        model.eval_deriv(tmp, k4);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i)
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        state.t = grid.time(k + 1);

        if (!detail::all_finite(y))
            throw NonFiniteDerivative("propagate_trajectory: state diverged at t = " +
                                      std::to_string(state.t));
    }
}

} // namespace qsl::dynamics
