// spin_boson.hpp — the two-level spin-boson model: initial coordinate
// elements, equations of motion, and observable extraction. Everything runs
// in dimensionless units with ħ = k_B = 1 and energies in units of ω_c.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qsl/bath.hpp"
#include "qsl/errors.hpp"
#include "qsl/layout.hpp"

namespace qsl::dynamics {

// Non-vanishing initial Pauli matrix elements in the {|+>, |->} basis:
// σ_x^{-+} = σ_x^{+-} = 1, σ_y^{-+} = i, σ_y^{+-} = -i,
// σ_z^{++} = 1, σ_z^{--} = -1. Returns the 3 subsystem blocks (12 entries).
inline std::vector<Complex> sbm_initial_elements() {
    std::vector<Complex> x(12, Complex(0.0, 0.0));
    // block 0: σ_x, block 1: σ_y, block 2: σ_z; element (α, α') at 2α + α'
    x[0 * 4 + 1] = 1.0;                // σ_x^{+-}
    x[0 * 4 + 2] = 1.0;                // σ_x^{-+}
    x[1 * 4 + 1] = Complex(0.0, -1.0); // σ_y^{+-}
    x[1 * 4 + 2] = Complex(0.0, 1.0);  // σ_y^{-+}
    x[2 * 4 + 0] = 1.0;                // σ_z^{++}
    x[2 * 4 + 3] = -1.0;               // σ_z^{--}
    return x;
}

class SpinBosonModel {
public:
    SpinBosonModel(double tunneling, bath::DiscretizedBath discretized)
        : tunneling_(tunneling), bath_(std::move(discretized)),
          layout_(2, 3, 1, static_cast<int>(bath_.size())) {}

    const CoordinateLayout& layout() const noexcept { return layout_; }
    const bath::DiscretizedBath& bath() const noexcept { return bath_; }
    double tunneling() const noexcept { return tunneling_; }

    // Observables recorded per grid point: σ_x^{++}, σ_y^{++}, σ_z^{++}.
    static constexpr int n_observables() noexcept { return 3; }

    // Factorized initial state: Pauli elements plus X^{αα'}(0) = X(0) δ_{αα'}.
    void initial_state(DecideState& state, const bath::WignerSample& sample) const {
        if (state.x.size() != layout_.state_size())
            throw LayoutMismatch("SpinBosonModel: state size mismatch");
        if (sample.r.size() != bath_.size())
            throw LayoutMismatch("SpinBosonModel: sample size mismatch");
        std::fill(state.x.begin(), state.x.end(), Complex(0.0, 0.0));
        const auto pauli = sbm_initial_elements();
        std::copy(pauli.begin(), pauli.end(), state.x.begin());
        const int n = static_cast<int>(bath_.size());
        for (int j = 0; j < n; ++j) {
            const std::size_t rb = layout_.bath_r_block(0, j);
            const std::size_t pb = layout_.bath_p_block(0, j);
            for (int a = 0; a < 2; ++a) {
                state.x[layout_.elem(rb, a, a)] = sample.r[j];
                state.x[layout_.elem(pb, a, a)] = sample.p[j];
            }
        }
        state.t = 0.0;
    }

    DecideState sample_initial_state(const num::TrajectoryRng& rng) const {
        DecideState state(layout_);
        initial_state(state, bath::sample_wigner(bath_, rng));
        return state;
    }

    // Equations of motion, with S = Σ_j C_j R_j collapsed once per call:
    //   dσ_x = S σ_y + σ_y S
    //   dσ_y = 2Δ σ_z - (S σ_x + σ_x S)
    //   dσ_z = -2Δ σ_y
    //   dR_j = P_j
    //   dP_j = -ω_j² R_j + C_j σ_z
    void eval_deriv(const std::vector<Complex>& y, std::vector<Complex>& dy) const {
        if (y.size() != layout_.state_size() || dy.size() != layout_.state_size())
            throw LayoutMismatch("SpinBosonModel: eval_deriv size mismatch");

        const Complex* sx = y.data();
        const Complex* sy = y.data() + 4;
        const Complex* sz = y.data() + 8;
        Complex* dsx = dy.data();
        Complex* dsy = dy.data() + 4;
        Complex* dsz = dy.data() + 8;

        const int n = static_cast<int>(bath_.size());
        const std::size_t r0 = layout_.elem(layout_.bath_r_block(0, 0), 0, 0);
        const std::size_t p0 = layout_.elem(layout_.bath_p_block(0, 0), 0, 0);

        Complex s[4] = {};
        for (int j = 0; j < n; ++j) {
            const double c = bath_.couplings[j];
            const Complex* rj = y.data() + r0 + 4 * static_cast<std::size_t>(j);
            s[0] += c * rj[0];
            s[1] += c * rj[1];
            s[2] += c * rj[2];
            s[3] += c * rj[3];
        }

        const double two_delta = 2.0 * tunneling_;
        // anticommutator {S, m} on 2x2 blocks, index (α,α') = 2α+α'
        auto anti = [&s](const Complex* m, Complex* out) {
            out[0] = s[0] * m[0] + s[1] * m[2] + m[0] * s[0] + m[1] * s[2];
            out[1] = s[0] * m[1] + s[1] * m[3] + m[0] * s[1] + m[1] * s[3];
            out[2] = s[2] * m[0] + s[3] * m[2] + m[2] * s[0] + m[3] * s[2];
            out[3] = s[2] * m[1] + s[3] * m[3] + m[2] * s[1] + m[3] * s[3];
        };

        Complex tmp[4];
        anti(sy, tmp);
        for (int e = 0; e < 4; ++e) dsx[e] = tmp[e];
        anti(sx, tmp);
        for (int e = 0; e < 4; ++e) dsy[e] = two_delta * sz[e] - tmp[e];
        for (int e = 0; e < 4; ++e) dsz[e] = -two_delta * sy[e];

        const Complex* r = y.data() + r0;
        const Complex* p = y.data() + p0;
        Complex* dr = dy.data() + r0;
        Complex* dp = dy.data() + p0;
        for (int j = 0; j < n; ++j) {
            const double w2 = bath_.omegas[j] * bath_.omegas[j];
            const double c = bath_.couplings[j];
            for (int e = 0; e < 4; ++e) {
                dr[4 * j + e] = p[4 * j + e];
                dp[4 * j + e] = -w2 * r[4 * j + e] + c * sz[e];
            }
        }
    }

    // σ_m^{++} elements of the state / derivative vector.
    void record_observables(const std::vector<Complex>& y, std::span<Complex> out) const {
        out[0] = y[0];   // σ_x^{++}
        out[1] = y[4];   // σ_y^{++}
        out[2] = y[8];   // σ_z^{++}
    }
    void record_observable_derivs(const std::vector<Complex>& k1, std::span<Complex> out) const {
        record_observables(k1, out);
    }

private:
    double tunneling_;
    bath::DiscretizedBath bath_;
    CoordinateLayout layout_;
};

} // namespace qsl::dynamics
