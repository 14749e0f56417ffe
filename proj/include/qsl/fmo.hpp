// fmo.hpp — seven-site Frenkel exciton model of the FMO pigment complex:
// embedded site-energy/coupling table, Hamiltonian assembly with the
// bath reorganization shift, initial projector elements, and the equations
// of motion for all projector and bath matrix elements.
//
// One projector (P_77) is eliminated through the completeness relation
// Σ_n P_nn = 1, so the flat state holds 48 subsystem blocks; P_77 elements
// are reconstructed as δ_{αα'} - Σ_{n<7} P_nn^{αα'} wherever needed.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qsl/bath.hpp"
#include "qsl/errors.hpp"
#include "qsl/layout.hpp"

namespace qsl::dynamics {

inline constexpr int kFmoSites = 7;

using FmoTable = std::array<std::array<double, kFmoSites>, kFmoSites>;

// Site energies (diagonal) and excitonic couplings (off-diagonal) in cm⁻¹
// for one subunit of the apo-FMO complex.
inline FmoTable fmo_site_table() {
    return FmoTable{{
        {12410.0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9},
        {-87.7, 12530.0, 30.8, 8.2, 0.7, 11.8, 4.3},
        {5.5, 30.8, 12210.0, -53.5, -2.2, -9.6, 6.0},
        {-5.9, 8.2, -53.5, 12320.0, -70.7, -17.0, -63.3},
        {6.7, 0.7, -2.2, -70.7, 12480.0, 81.1, -1.3},
        {-13.7, 11.8, -9.6, -17.0, 81.1, 12630.0, 39.7},
        {-9.9, 4.3, 6.0, -63.3, -1.3, 39.7, 12440.0},
    }};
}

// Load a replacement table: 7 rows of 7 whitespace-separated values (cm⁻¹).
inline FmoTable load_fmo_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OverrideShapeMismatch("load_fmo_table: cannot open " + path);
    FmoTable t{};
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        if (vals.empty()) continue;   // blank line
        if (row >= kFmoSites || vals.size() != kFmoSites)
            throw OverrideShapeMismatch("load_fmo_table: expected a 7x7 table");
        for (int c = 0; c < kFmoSites; ++c) t[row][c] = vals[c];
        ++row;
    }
    if (row != kFmoSites) throw OverrideShapeMismatch("load_fmo_table: expected a 7x7 table");
    return t;
}

// V_nn = E_n + Σ_j C_{n,j}²/(2ω_{n,j}²), V_nm = couplings (must be symmetric).
// Units of the energies and of the bath must agree.
inline FmoTable build_fmo_hamiltonian(const std::array<double, kFmoSites>& site_energies,
                                      const FmoTable& couplings,
                                      const bath::DiscretizedBath& site_bath) {
    for (int n = 0; n < kFmoSites; ++n)
        for (int m = n + 1; m < kFmoSites; ++m)
            if (couplings[n][m] != couplings[m][n])
                throw AsymmetricTable("build_fmo_hamiltonian: coupling table is not symmetric");

    const double shift = bath::reorganization_shift(site_bath);
    FmoTable v = couplings;
    for (int n = 0; n < kFmoSites; ++n) v[n][n] = site_energies[n] + shift;
    return v;
}

// Initial projector matrix elements: P_nm^{nm}(0) = 1, all others zero.
// Returns the 48 stored subsystem blocks (P_77 eliminated), 49 entries each.
inline std::vector<Complex> fmo_initial_elements() {
    std::vector<Complex> x(48 * 49, Complex(0.0, 0.0));
    for (int n = 0; n < kFmoSites; ++n)
        for (int m = 0; m < kFmoSites; ++m) {
            const int block = n * kFmoSites + m;
            if (block == 48) continue;   // P_77 reconstructed, not stored
            x[static_cast<std::size_t>(block) * 49 + (n * kFmoSites + m)] = 1.0;
        }
    return x;
}

class FmoModel {
public:
    // `hamiltonian`: symmetric 7x7 with reorganization-shifted diagonal, in
    // the same angular-frequency units as the bath; a uniform diagonal offset
    // may already be subtracted (propagated observables are invariant).
    // `site_bath` is shared by all seven sites.
    FmoModel(const FmoTable& hamiltonian, bath::DiscretizedBath site_bath, int initial_site = 0)
        : v_(hamiltonian), bath_(std::move(site_bath)),
          layout_(kFmoSites, 48, kFmoSites, static_cast<int>(bath_.size())),
          initial_site_(initial_site) {
        for (int n = 0; n < kFmoSites; ++n)
            for (int m = n + 1; m < kFmoSites; ++m)
                if (v_[n][m] != v_[m][n])
                    throw AsymmetricTable("FmoModel: Hamiltonian must be symmetric");
        if (initial_site_ < 0 || initial_site_ >= kFmoSites)
            throw IndexOutOfRange("FmoModel: initial site out of range");
    }

    const CoordinateLayout& layout() const noexcept { return layout_; }
    const bath::DiscretizedBath& site_bath() const noexcept { return bath_; }
    const FmoTable& hamiltonian() const noexcept { return v_; }
    int initial_site() const noexcept { return initial_site_; }

    // All 49 projector elements P_nm^{ss} (s = initial site), row-major (n,m).
    static constexpr int n_observables() noexcept { return 49; }

    void initial_state(DecideState& state,
                       const std::array<bath::WignerSample, kFmoSites>& samples) const {
        if (state.x.size() != layout_.state_size())
            throw LayoutMismatch("FmoModel: state size mismatch");
        std::fill(state.x.begin(), state.x.end(), Complex(0.0, 0.0));
        const auto subsys = fmo_initial_elements();
        std::copy(subsys.begin(), subsys.end(), state.x.begin());
        const int m = static_cast<int>(bath_.size());
        for (int site = 0; site < kFmoSites; ++site) {
            if (samples[site].r.size() != bath_.size())
                throw LayoutMismatch("FmoModel: sample size mismatch");
            for (int j = 0; j < m; ++j) {
                const std::size_t rb = layout_.bath_r_block(site, j);
                const std::size_t pb = layout_.bath_p_block(site, j);
                for (int a = 0; a < kFmoSites; ++a) {
                    state.x[layout_.elem(rb, a, a)] = samples[site].r[j];
                    state.x[layout_.elem(pb, a, a)] = samples[site].p[j];
                }
            }
        }
        state.t = 0.0;
    }

    DecideState sample_initial_state(const num::TrajectoryRng& rng) const {
        std::array<bath::WignerSample, kFmoSites> samples;
        for (int site = 0; site < kFmoSites; ++site)
            samples[site] = bath::sample_wigner(
                bath_, rng, static_cast<std::uint64_t>(site) * bath_.size());
        DecideState state(layout_);
        initial_state(state, samples);
        return state;
    }

    // Equations of motion:
    //   dP_nm = i[Σ_l V_ln P_lm - Σ_k V_mk P_nk] - (i/2){S_n - S_m, P_nm}
    //   dR_nj = P_nj
    //   dP_nj = -ω_nj² R_nj + C_nj P_nn
    // with S_n = Σ_j C_nj R_nj and {,} the anticommutator over basis indices.
    void eval_deriv(const std::vector<Complex>& y, std::vector<Complex>& dy) const {
        if (y.size() != layout_.state_size() || dy.size() != layout_.state_size())
            throw LayoutMismatch("FmoModel: eval_deriv size mismatch");

        constexpr int L = kFmoSites;
        constexpr int B = L * L;   // 49 elements per block
        const int m_osc = static_cast<int>(bath_.size());

        // reconstruct P_77 from completeness
        Complex p77[B];
        for (int e = 0; e < B; ++e) p77[e] = 0.0;
        for (int a = 0; a < L; ++a) p77[a * L + a] = 1.0;
        for (int n = 0; n < L - 1; ++n) {
            const Complex* pnn = y.data() + static_cast<std::size_t>(n * L + n) * B;
            for (int e = 0; e < B; ++e) p77[e] -= pnn[e];
        }
        auto proj = [&](int n, int m) -> const Complex* {
            const int block = n * L + m;
            return block == 48 ? p77 : y.data() + static_cast<std::size_t>(block) * B;
        };

        // bath collective fields S_n = Σ_j C_nj R_nj
        Complex s[L][B];
        for (int site = 0; site < L; ++site) {
            for (int e = 0; e < B; ++e) s[site][e] = 0.0;
            const Complex* r = y.data() + layout_.elem(layout_.bath_r_block(site, 0), 0, 0);
            for (int j = 0; j < m_osc; ++j) {
                const double c = bath_.couplings[j];
                const Complex* rj = r + static_cast<std::size_t>(j) * B;
                for (int e = 0; e < B; ++e) s[site][e] += c * rj[e];
            }
        }

        constexpr Complex iu(0.0, 1.0);
        Complex commutator[B];
        Complex d[B];
        for (int n = 0; n < L; ++n) {
            for (int m = 0; m < L; ++m) {
                const int block = n * L + m;
                if (block == 48) continue;

                // i [Σ_l V_ln P_lm - Σ_k V_mk P_nk]
                for (int e = 0; e < B; ++e) commutator[e] = 0.0;
                for (int l = 0; l < L; ++l) {
                    const double vln = v_[l][n];
                    const Complex* plm = proj(l, m);
                    for (int e = 0; e < B; ++e) commutator[e] += vln * plm[e];
                }
                for (int k = 0; k < L; ++k) {
                    const double vmk = v_[m][k];
                    const Complex* pnk = proj(n, k);
                    for (int e = 0; e < B; ++e) commutator[e] -= vmk * pnk[e];
                }

                Complex* out = dy.data() + static_cast<std::size_t>(block) * B;
                if (n == m) {
                    // site-diagonal: the bath anticommutators cancel exactly
                    for (int e = 0; e < B; ++e) out[e] = iu * commutator[e];
                    continue;
                }

                // -(i/2) { S_n - S_m, P_nm }
                for (int e = 0; e < B; ++e) d[e] = s[n][e] - s[m][e];
                const Complex* pnm = proj(n, m);
                for (int a = 0; a < L; ++a) {
                    for (int ap = 0; ap < L; ++ap) {
                        Complex acc = 0.0;
                        for (int b = 0; b < L; ++b)
                            acc += d[a * L + b] * pnm[b * L + ap] + pnm[a * L + b] * d[b * L + ap];
                        out[a * L + ap] = iu * commutator[a * L + ap] - 0.5 * iu * acc;
                    }
                }
            }
        }

        // bath equations
        for (int site = 0; site < L; ++site) {
            const std::size_t r0 = layout_.elem(layout_.bath_r_block(site, 0), 0, 0);
            const std::size_t q0 = layout_.elem(layout_.bath_p_block(site, 0), 0, 0);
            const Complex* r = y.data() + r0;
            const Complex* q = y.data() + q0;
            Complex* drr = dy.data() + r0;
            Complex* dq = dy.data() + q0;
            const Complex* pnn = proj(site, site);
            for (int j = 0; j < m_osc; ++j) {
                const double w2 = bath_.omegas[j] * bath_.omegas[j];
                const double c = bath_.couplings[j];
                const std::size_t off = static_cast<std::size_t>(j) * B;
                for (int e = 0; e < B; ++e) {
                    drr[off + e] = q[off + e];
                    dq[off + e] = -w2 * r[off + e] + c * pnn[e];
                }
            }
        }
    }

    // P_nm^{ss} for all 49 (n, m); the eliminated block comes from
    // completeness: P_77^{ss} = 1 - Σ_{n<7} P_nn^{ss}.
    void record_observables(const std::vector<Complex>& y, std::span<Complex> out) const {
        record_column(y, out, 1.0);
    }
    // Same layout for derivatives; d/dt of the completeness identity has no
    // constant term.
    void record_observable_derivs(const std::vector<Complex>& k1, std::span<Complex> out) const {
        record_column(k1, out, 0.0);
    }

private:
    void record_column(const std::vector<Complex>& y, std::span<Complex> out,
                       double identity_term) const {
        constexpr int L = kFmoSites;
        constexpr int B = L * L;
        const std::size_t col = static_cast<std::size_t>(initial_site_) * L + initial_site_;
        Complex diag_sum = 0.0;
        for (int block = 0; block < 48; ++block) {
            out[block] = y[static_cast<std::size_t>(block) * B + col];
            const int n = block / L, m = block % L;
            if (n == m) diag_sum += out[block];
        }
        out[48] = identity_term - diag_sum;
    }

    FmoTable v_;
    bath::DiscretizedBath bath_;
    CoordinateLayout layout_;
    int initial_site_;
};

} // namespace qsl::dynamics
