// ensemble.hpp — Monte Carlo ensembles of trajectories and their reduction
// to ensemble-averaged projector series with standard errors.
//
// Trajectories are embarrassingly parallel. Workers claim fixed blocks of
// trajectory indices; in deterministic mode each block's partial sums merge
// into the global accumulator strictly in ascending block order, so results
// are bitwise identical for any worker count. Fast mode merges per-worker
// accumulators in completion order instead (differences stay at accumulation
// rounding level).
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/fmo.hpp"
#include "qsl/integrate.hpp"
#include "qsl/propagate.hpp"
#include "qsl/rng.hpp"
#include "qsl/spin_boson.hpp"

namespace qsl::dynamics {

// Real Bloch-vector view of a two-level series (kept alongside the projector
// form so both norm-rate routes stay available).
struct BlochData {
    std::vector<double> b;      // (n_points × 3): B_x, B_y, B_z
    std::vector<double> db;     // d/dt of the above
    std::vector<double> se_b;   // standard errors
    std::vector<double> se_db;
};

// Ensemble means of <P_nm(t)> and d/dt<P_nm(t)> on a uniform grid, with
// standard errors of the mean, flattened as (grid point) × (n·L + m).
struct ReducedSeries {
    num::TimeGrid grid;
    int levels{0};
    std::size_t n_traj{0};
    std::size_t n_failed{0};
    bool deterministic{true};
    int initial_index{0};

    std::vector<Complex> value_mean, deriv_mean;
    std::vector<double> value_se_re, value_se_im, deriv_se_re, deriv_se_im;

    std::optional<BlochData> bloch;

    std::size_t obs_index(int n, int m) const noexcept {
        return static_cast<std::size_t>(n) * levels + m;
    }
    std::size_t flat(std::size_t k, int n, int m) const noexcept {
        return k * static_cast<std::size_t>(levels) * levels + obs_index(n, m);
    }

    Complex value(std::size_t k, int n, int m) const { return value_mean[flat(k, n, m)]; }
    Complex deriv(std::size_t k, int n, int m) const { return deriv_mean[flat(k, n, m)]; }

    void allocate(const num::TimeGrid& g, int levels_) {
        grid = g;
        levels = levels_;
        const std::size_t total = g.n_points() * static_cast<std::size_t>(levels) * levels;
        value_mean.assign(total, Complex(0.0, 0.0));
        deriv_mean.assign(total, Complex(0.0, 0.0));
        value_se_re.assign(total, 0.0);
        value_se_im.assign(total, 0.0);
        deriv_se_re.assign(total, 0.0);
        deriv_se_im.assign(total, 0.0);
    }
};

struct EnsembleOptions {
    std::size_t n_traj{10000};
    std::uint64_t master_seed{1};
    bool deterministic{true};
    unsigned workers{0};               // 0 → hardware concurrency
    double max_failed_fraction{1e-3};  // abort threshold
    std::size_t block_size{16};
};

namespace detail {

// Sums and sums of squares per (grid point × observable), complex split into
// real/imag so variances come out per component.
struct Accumulator {
    std::vector<Complex> value_sum, deriv_sum;
    std::vector<double> value_sq_re, value_sq_im, deriv_sq_re, deriv_sq_im;
    std::size_t count{0};

    void allocate(std::size_t total) {
        value_sum.assign(total, Complex(0.0, 0.0));
        deriv_sum.assign(total, Complex(0.0, 0.0));
        value_sq_re.assign(total, 0.0);
        value_sq_im.assign(total, 0.0);
        deriv_sq_re.assign(total, 0.0);
        deriv_sq_im.assign(total, 0.0);
        count = 0;
    }

    void add_record(const TrajectoryRecord& rec) {
        const std::size_t total = rec.values.size();
        for (std::size_t i = 0; i < total; ++i) {
            const Complex v = rec.values[i];
            const Complex d = rec.derivs[i];
            value_sum[i] += v;
            deriv_sum[i] += d;
            value_sq_re[i] += v.real() * v.real();
            value_sq_im[i] += v.imag() * v.imag();
            deriv_sq_re[i] += d.real() * d.real();
            deriv_sq_im[i] += d.imag() * d.imag();
        }
        ++count;
    }

    void merge(const Accumulator& other) {
        const std::size_t total = value_sum.size();
        for (std::size_t i = 0; i < total; ++i) {
            value_sum[i] += other.value_sum[i];
            deriv_sum[i] += other.deriv_sum[i];
            value_sq_re[i] += other.value_sq_re[i];
            value_sq_im[i] += other.value_sq_im[i];
            deriv_sq_re[i] += other.deriv_sq_re[i];
            deriv_sq_im[i] += other.deriv_sq_im[i];
        }
        count += other.count;
    }

    void reset_sums() {
        std::fill(value_sum.begin(), value_sum.end(), Complex(0.0, 0.0));
        std::fill(deriv_sum.begin(), deriv_sum.end(), Complex(0.0, 0.0));
        std::fill(value_sq_re.begin(), value_sq_re.end(), 0.0);
        std::fill(value_sq_im.begin(), value_sq_im.end(), 0.0);
        std::fill(deriv_sq_re.begin(), deriv_sq_re.end(), 0.0);
        std::fill(deriv_sq_im.begin(), deriv_sq_im.end(), 0.0);
        count = 0;
    }
};

inline double se_of_mean(double sum, double sum_sq, std::size_t n) noexcept {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;  // rounding
    return std::sqrt(var / static_cast<double>(n));
}

// Runs the trajectory loop and fills `global` with the merged sums.
// Returns the number of failed (excluded) trajectories.
template <class Model>
std::size_t accumulate_ensemble(const Model& model, const num::TimeGrid& grid,
                                const EnsembleOptions& opts, Accumulator& global) {
    if (opts.n_traj < 1) throw InvalidParameter("run_ensemble: n_traj must be >= 1");
    grid.validate();

    const std::size_t total = grid.n_points() * static_cast<std::size_t>(model.n_observables());
    global.allocate(total);

    unsigned workers = opts.workers ? opts.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    const std::size_t block = std::max<std::size_t>(1, opts.block_size);
    const std::size_t n_blocks = (opts.n_traj + block - 1) / block;
    if (workers > n_blocks) workers = static_cast<unsigned>(n_blocks);

    std::atomic<std::size_t> next_block{0};
    std::atomic<std::size_t> failed{0};
    std::mutex merge_mutex;
    std::condition_variable merge_cv;
    std::size_t next_merge = 0;
    std::exception_ptr first_error;

    auto worker_fn = [&]() {
        Accumulator local;
        local.allocate(total);
        TrajectoryRecord record;
        DecideState state(model.layout());

        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            {
                std::lock_guard<std::mutex> lk(merge_mutex);
                if (first_error) break;
            }

            local.reset_sums();
            const std::size_t begin = b * block;
            const std::size_t end = std::min(begin + block, opts.n_traj);
            try {
                for (std::size_t traj = begin; traj < end; ++traj) {
                    const num::TrajectoryRng rng{opts.master_seed, traj};
                    state = model.sample_initial_state(rng);
                    try {
                        propagate_trajectory(model, state, grid, record);
                    } catch (const NonFiniteDerivative&) {
                        failed.fetch_add(1);
                        continue;
                    }
                    local.add_record(record);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(merge_mutex);
                if (!first_error) first_error = std::current_exception();
                merge_cv.notify_all();
                break;
            }

            if (opts.deterministic) {
                std::unique_lock<std::mutex> lk(merge_mutex);
                merge_cv.wait(lk, [&] { return next_merge == b || first_error; });
                if (first_error) break;
                global.merge(local);
                ++next_merge;
                merge_cv.notify_all();
            } else {
                std::lock_guard<std::mutex> lk(merge_mutex);
                global.merge(local);
            }
        }
    };

    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    const std::size_t n_failed = failed.load();
    if (global.count == 0)
        throw AllTrajectoriesFailed("run_ensemble: every trajectory diverged");
    if (static_cast<double>(n_failed) >
        opts.max_failed_fraction * static_cast<double>(opts.n_traj))
        throw ExcessiveTrajectoryFailures(
            "run_ensemble: " + std::to_string(n_failed) + " of " +
            std::to_string(opts.n_traj) +
            " trajectories diverged; reduce the time step");
    return n_failed;
}

} // namespace detail

// Spin-boson reduction. Per-trajectory σ_m^{++} are real up to rounding (the
// flow preserves the adjoint symmetry of the coordinate matrices), so the
// Bloch vector is taken from the real parts and the projector series is the
// exact Bloch reconstruction — both norm-rate routes then agree to rounding.
inline ReducedSeries run_ensemble(const SpinBosonModel& model, const num::TimeGrid& grid,
                                  const EnsembleOptions& opts) {
    detail::Accumulator acc;
    const std::size_t n_failed = detail::accumulate_ensemble(model, grid, opts, acc);
    const auto n = acc.count;
    const double inv_n = 1.0 / static_cast<double>(n);

    ReducedSeries series;
    series.allocate(grid, 2);
    series.n_traj = n;
    series.n_failed = n_failed;
    series.deterministic = opts.deterministic;
    series.initial_index = 0;   // spin-up

    BlochData bloch;
    const std::size_t pts = grid.n_points();
    bloch.b.resize(pts * 3);
    bloch.db.resize(pts * 3);
    bloch.se_b.resize(pts * 3);
    bloch.se_db.resize(pts * 3);

    for (std::size_t k = 0; k < pts; ++k) {
        for (int m = 0; m < 3; ++m) {
            const std::size_t i = k * 3 + m;
            bloch.b[i] = acc.value_sum[i].real() * inv_n;
            bloch.db[i] = acc.deriv_sum[i].real() * inv_n;
            bloch.se_b[i] = detail::se_of_mean(acc.value_sum[i].real(), acc.value_sq_re[i], n);
            bloch.se_db[i] = detail::se_of_mean(acc.deriv_sum[i].real(), acc.deriv_sq_re[i], n);
        }
        const double bx = bloch.b[k * 3 + 0], by = bloch.b[k * 3 + 1], bz = bloch.b[k * 3 + 2];
        const double dbx = bloch.db[k * 3 + 0], dby = bloch.db[k * 3 + 1], dbz = bloch.db[k * 3 + 2];
        const double sx = bloch.se_b[k * 3 + 0], sy = bloch.se_b[k * 3 + 1], sz = bloch.se_b[k * 3 + 2];
        const double dsx = bloch.se_db[k * 3 + 0], dsy = bloch.se_db[k * 3 + 1], dsz = bloch.se_db[k * 3 + 2];

        // <P_nm> = ρ^{mn}; ρ = (I + B·σ)/2 in the {|+>, |->} basis
        auto put = [&](int nn, int mm, Complex v, double se_re, double se_im, bool is_deriv) {
            const std::size_t f = series.flat(k, nn, mm);
            if (is_deriv) {
                series.deriv_mean[f] = v;
                series.deriv_se_re[f] = se_re;
                series.deriv_se_im[f] = se_im;
            } else {
                series.value_mean[f] = v;
                series.value_se_re[f] = se_re;
                series.value_se_im[f] = se_im;
            }
        };
        put(0, 0, Complex(0.5 * (1.0 + bz), 0.0), 0.5 * sz, 0.0, false);
        put(1, 1, Complex(0.5 * (1.0 - bz), 0.0), 0.5 * sz, 0.0, false);
        put(0, 1, Complex(0.5 * bx, 0.5 * by), 0.5 * sx, 0.5 * sy, false);   // ρ^{-+}
        put(1, 0, Complex(0.5 * bx, -0.5 * by), 0.5 * sx, 0.5 * sy, false);  // ρ^{+-}
        put(0, 0, Complex(0.5 * dbz, 0.0), 0.5 * dsz, 0.0, true);
        put(1, 1, Complex(-0.5 * dbz, 0.0), 0.5 * dsz, 0.0, true);
        put(0, 1, Complex(0.5 * dbx, 0.5 * dby), 0.5 * dsx, 0.5 * dsy, true);
        put(1, 0, Complex(0.5 * dbx, -0.5 * dby), 0.5 * dsx, 0.5 * dsy, true);
    }
    series.bloch = std::move(bloch);
    return series;
}

// FMO reduction: raw complex means of P_nm^{ss} and their derivatives.
inline ReducedSeries run_ensemble(const FmoModel& model, const num::TimeGrid& grid,
                                  const EnsembleOptions& opts) {
    detail::Accumulator acc;
    const std::size_t n_failed = detail::accumulate_ensemble(model, grid, opts, acc);
    const auto n = acc.count;
    const double inv_n = 1.0 / static_cast<double>(n);

    ReducedSeries series;
    series.allocate(grid, kFmoSites);
    series.n_traj = n;
    series.n_failed = n_failed;
    series.deterministic = opts.deterministic;
    series.initial_index = model.initial_site();

    const std::size_t total = acc.value_sum.size();
    for (std::size_t i = 0; i < total; ++i) {
        series.value_mean[i] = acc.value_sum[i] * inv_n;
        series.deriv_mean[i] = acc.deriv_sum[i] * inv_n;
        series.value_se_re[i] = detail::se_of_mean(acc.value_sum[i].real(), acc.value_sq_re[i], n);
        series.value_se_im[i] = detail::se_of_mean(acc.value_sum[i].imag(), acc.value_sq_im[i], n);
        series.deriv_se_re[i] = detail::se_of_mean(acc.deriv_sum[i].real(), acc.deriv_sq_re[i], n);
        series.deriv_se_im[i] = detail::se_of_mean(acc.deriv_sum[i].imag(), acc.deriv_sq_im[i], n);
    }
    return series;
}

// Exact (noise-free) two-level series from Bloch components, used by the
// perturbative propagators and the isolated closed form.
inline ReducedSeries series_from_bloch(const num::TimeGrid& grid,
                                       const std::vector<double>& b,
                                       const std::vector<double>& db) {
    grid.validate();
    const std::size_t pts = grid.n_points();
    if (b.size() != pts * 3 || db.size() != pts * 3)
        throw InvalidParameter("series_from_bloch: component size mismatch");

    ReducedSeries series;
    series.allocate(grid, 2);
    series.n_traj = 0;
    series.deterministic = true;
    series.initial_index = 0;

    BlochData bloch;
    bloch.b = b;
    bloch.db = db;
    bloch.se_b.assign(pts * 3, 0.0);
    bloch.se_db.assign(pts * 3, 0.0);

    for (std::size_t k = 0; k < pts; ++k) {
        const double bx = b[k * 3 + 0], by = b[k * 3 + 1], bz = b[k * 3 + 2];
        const double dbx = db[k * 3 + 0], dby = db[k * 3 + 1], dbz = db[k * 3 + 2];
        series.value_mean[series.flat(k, 0, 0)] = Complex(0.5 * (1.0 + bz), 0.0);
        series.value_mean[series.flat(k, 1, 1)] = Complex(0.5 * (1.0 - bz), 0.0);
        series.value_mean[series.flat(k, 0, 1)] = Complex(0.5 * bx, 0.5 * by);
        series.value_mean[series.flat(k, 1, 0)] = Complex(0.5 * bx, -0.5 * by);
        series.deriv_mean[series.flat(k, 0, 0)] = Complex(0.5 * dbz, 0.0);
        series.deriv_mean[series.flat(k, 1, 1)] = Complex(-0.5 * dbz, 0.0);
        series.deriv_mean[series.flat(k, 0, 1)] = Complex(0.5 * dbx, 0.5 * dby);
        series.deriv_mean[series.flat(k, 1, 0)] = Complex(0.5 * dbx, -0.5 * dby);
    }
    series.bloch = std::move(bloch);
    return series;
}

} // namespace qsl::dynamics
