// layout.hpp — flat-state layout for matrix-valued coordinates. Every
// coordinate (subsystem operator or bath phase-space variable) carries an
// L×L block of matrix elements x^{αα'}; the full state is one flat complex
// vector ordered block by block.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl::dynamics {

using Complex = std::complex<double>;

struct CoordinateLayout {
    int levels{0};             // L
    int n_subsystem{0};        // stored subsystem coordinate matrices (identity excluded)
    int n_sites{0};            // independent baths
    int n_osc_per_site{0};     // oscillators per bath

    CoordinateLayout() = default;

    CoordinateLayout(int levels_, int n_subsystem_, int n_sites_, int n_osc_per_site_)
        : levels(levels_), n_subsystem(n_subsystem_), n_sites(n_sites_),
          n_osc_per_site(n_osc_per_site_) {
        if (levels < 1 || n_subsystem < 1 || n_sites < 1 || n_osc_per_site < 1)
            throw LayoutMismatch("CoordinateLayout: all extents must be positive");
        // state size must land on the L²(L²-1+2N) coupled-equation count
        const std::size_t l2 = static_cast<std::size_t>(levels) * levels;
        const std::size_t expected =
            l2 * (l2 - 1 + 2 * static_cast<std::size_t>(n_sites) * n_osc_per_site);
        if (state_size() != expected)
            throw LayoutMismatch("CoordinateLayout: subsystem coordinate count does not match L^2-1");
    }

    std::size_t block_size() const noexcept {
        return static_cast<std::size_t>(levels) * levels;
    }
    std::size_t n_blocks() const noexcept {
        return static_cast<std::size_t>(n_subsystem) +
               2 * static_cast<std::size_t>(n_sites) * n_osc_per_site;
    }
    std::size_t state_size() const noexcept { return n_blocks() * block_size(); }

    std::size_t subsystem_block(int c) const noexcept { return static_cast<std::size_t>(c); }
    std::size_t bath_r_block(int site, int j) const noexcept {
        return static_cast<std::size_t>(n_subsystem) +
               static_cast<std::size_t>(site) * n_osc_per_site + j;
    }
    std::size_t bath_p_block(int site, int j) const noexcept {
        return static_cast<std::size_t>(n_subsystem) +
               static_cast<std::size_t>(n_sites) * n_osc_per_site +
               static_cast<std::size_t>(site) * n_osc_per_site + j;
    }

    std::size_t elem(std::size_t block, int alpha, int alpha_prime) const noexcept {
        return block * block_size() + static_cast<std::size_t>(alpha) * levels + alpha_prime;
    }
};

// Per-trajectory ODE state: flat complex vector ordered by CoordinateLayout.
struct DecideState {
    std::vector<Complex> x;
    double t{0.0};

    explicit DecideState(const CoordinateLayout& layout) : x(layout.state_size()) {}
    DecideState() = default;
};

} // namespace qsl::dynamics
