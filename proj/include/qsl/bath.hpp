// bath.hpp — spectral-density laws, finite-oscillator discretizations, and
// thermal Wigner sampling of bath initial conditions.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <variant>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/rng.hpp"

namespace qsl::bath {

// J(ω) = (ξπ/2) ω e^{-ω/ω_c}
struct OhmicExponential {
    double xi{0.0};        // Kondo parameter
    double omega_c{1.0};   // cutoff frequency

    double spectral_density(double omega) const noexcept {
        return 0.5 * xi * std::numbers::pi * omega * std::exp(-omega / omega_c);
    }
};

// J(ω) = 2 λ_D ω τ_c / (1 + ω² τ_c²)
struct DebyeDrude {
    double lambda_d{0.0};  // reorganization energy
    double tau_c{0.0};     // characteristic time

    double spectral_density(double omega) const noexcept {
        const double wt = omega * tau_c;
        return 2.0 * lambda_d * wt / (1.0 + wt * wt);
    }
};

using SpectralDensity = std::variant<OhmicExponential, DebyeDrude>;

struct DiscretizedBath {
    std::vector<double> omegas;     // ascending, last pinned at omega_max
    std::vector<double> couplings;  // same length
    double omega_max{0.0};
    double beta{0.0};               // inverse temperature, k_B = 1 units

    std::size_t size() const noexcept { return omegas.size(); }
};

// Ohmic-exponential discretization:
//   ω_0 = (ω_c/N)(1 - e^{-ω_max/ω_c}),  ω_j = -ω_c ln(1 - j ω_0/ω_c),
//   C_j = sqrt(ξ ω_0) ω_j,  j = 1..N.
inline DiscretizedBath discretize_ohmic(double xi, double omega_c, double omega_max,
                                        std::size_t n_osc, double beta) {
    if (xi < 0.0) throw InvalidParameter("discretize_ohmic: xi must be >= 0");
    if (!(omega_c > 0.0)) throw InvalidParameter("discretize_ohmic: omega_c must be > 0");
    if (!(omega_max > 0.0)) throw InvalidParameter("discretize_ohmic: omega_max must be > 0");
    if (n_osc < 1) throw InvalidParameter("discretize_ohmic: need at least one oscillator");
    if (!(beta > 0.0)) throw InvalidParameter("discretize_ohmic: beta must be > 0");

    const double omega0 = (omega_c / static_cast<double>(n_osc)) * (1.0 - std::exp(-omega_max / omega_c));
    DiscretizedBath b;
    b.omega_max = omega_max;
    b.beta = beta;
    b.omegas.resize(n_osc);
    b.couplings.resize(n_osc);
    const double cpl = std::sqrt(xi * omega0);
    for (std::size_t j = 1; j <= n_osc; ++j) {
        const double w = -omega_c * std::log(1.0 - static_cast<double>(j) * omega0 / omega_c);
        b.omegas[j - 1] = w;
        b.couplings[j - 1] = cpl * w;
    }
    return b;
}

// Debye-Drude discretization:
//   ω_j = tan[j arctan(ω_max τ_c)/M]/τ_c,
//   C_j = 2 sqrt(λ_D arctan(ω_max τ_c)/(πM)) ω_j,  j = 1..M.
inline DiscretizedBath discretize_debye(double lambda_d, double tau_c, double omega_max,
                                        std::size_t n_osc, double beta) {
    if (lambda_d < 0.0) throw InvalidParameter("discretize_debye: lambda_d must be >= 0");
    if (!(tau_c > 0.0)) throw InvalidParameter("discretize_debye: tau_c must be > 0");
    if (!(omega_max > 0.0)) throw InvalidParameter("discretize_debye: omega_max must be > 0");
    if (n_osc < 1) throw InvalidParameter("discretize_debye: need at least one oscillator");
    if (!(beta > 0.0)) throw InvalidParameter("discretize_debye: beta must be > 0");

    const double theta = std::atan(omega_max * tau_c);
    DiscretizedBath b;
    b.omega_max = omega_max;
    b.beta = beta;
    b.omegas.resize(n_osc);
    b.couplings.resize(n_osc);
    const double cpl = 2.0 * std::sqrt(lambda_d * theta / (std::numbers::pi * static_cast<double>(n_osc)));
    for (std::size_t j = 1; j <= n_osc; ++j) {
        const double w = std::tan(static_cast<double>(j) * theta / static_cast<double>(n_osc)) / tau_c;
        b.omegas[j - 1] = w;
        b.couplings[j - 1] = cpl * w;
    }
    return b;
}

// Σ_j C_j²/(2ω_j²) — the reorganization shift the discrete bath adds to a
// diagonal subsystem energy.
inline double reorganization_shift(const DiscretizedBath& b) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double r = b.couplings[j] / b.omegas[j];
        s += 0.5 * r * r;
    }
    return s;
}

struct WignerSample {
    std::vector<double> r;  // mass-weighted positions
    std::vector<double> p;  // momenta
};

// Draw (R_j, P_j) from the thermal Wigner distribution of each oscillator:
//   Var(R_j) = 1/(2 ω_j tanh(βω_j/2)),  Var(P_j) = ω_j/(2 tanh(βω_j/2)).
// `oscillator_offset` keys the substreams when one trajectory samples several
// baths (one per site).
inline WignerSample sample_wigner(const DiscretizedBath& bath, const num::TrajectoryRng& rng,
                                  std::uint64_t oscillator_offset = 0) {
    WignerSample s;
    s.r.resize(bath.size());
    s.p.resize(bath.size());
    for (std::size_t j = 0; j < bath.size(); ++j) {
        const double w = bath.omegas[j];
        const double th = std::tanh(0.5 * bath.beta * w);
        const double sigma_r = std::sqrt(1.0 / (2.0 * w * th));
        const double sigma_p = std::sqrt(w / (2.0 * th));
        auto stream = rng.oscillator_stream(oscillator_offset + j);
        double z0, z1;
        stream.gaussian_pair(z0, z1);
        s.r[j] = sigma_r * z0;
        s.p[j] = sigma_p * z1;
    }
    return s;
}

} // namespace qsl::bath
