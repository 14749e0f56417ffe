// matrix.hpp — small dense complex matrices, Hermitian eigenvalues (cyclic
// Jacobi), and Schatten norms. Subsystem dimensions here are tiny (L ≤ 8),
// so a self-contained Jacobi solver beats pulling in a linear-algebra stack.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl::num {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Row-major square complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw InvalidParameter("ComplexMatrix: dim must be >= 1");
    }

    static ComplexMatrix identity(int dim) {
        ComplexMatrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const noexcept { return dim_; }

    Complex& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    Complex operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    const std::vector<Complex>& data() const noexcept { return a_; }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    bool finite() const noexcept {
        for (const auto& z : a_)
            if (!is_finite(z)) return false;
        return true;
    }

    // max entrywise |A - A†|
    double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

private:
    int dim_{0};
    std::vector<Complex> a_;
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int n = a.dim();
    if (b.dim() != n) throw InvalidParameter("multiply: dimension mismatch");
    ComplexMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix b(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) b(j, i) = std::conj(a(i, j));
    return b;
}

struct Eigensystem {
    std::vector<double> values;   // ascending
    ComplexMatrix vectors;        // columns, paired with values
};

constexpr double kHermitianTolerance = 1e-10;

namespace detail {

// Cyclic Jacobi on a Hermitian matrix held in `a` (modified in place).
// Accumulates rotations into `v` when non-null.
inline std::vector<double> jacobi_eigenvalues(ComplexMatrix& a, ComplexMatrix* v) {
    const int n = a.dim();
    if (v) *v = ComplexMatrix::identity(n);

    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double stop = 1e-15 * scale;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double alpha = std::abs(apq);
                if (alpha <= 1e-300) continue;

                const Complex phase = apq / alpha;   // a_pq = alpha * phase
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double d = (aqq - app) / (2.0 * alpha);
                // smaller-magnitude root of t^2 - 2dt - 1 = 0
                const double t = (d >= 0.0) ? -1.0 / (d + std::sqrt(1.0 + d * d))
                                            : 1.0 / (-d + std::sqrt(1.0 + d * d));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // A <- U† A U with U = [[c, -s*phase], [s*conj(phase), c]]
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp + s * std::conj(phase) * akq;
                    a(k, q) = -s * phase * akp + c * akq;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                a(p, p) = Complex(c * c * app + 2.0 * alpha * c * s + s * s * aqq, 0.0);
                a(q, q) = Complex(s * s * app - 2.0 * alpha * c * s + c * c * aqq, 0.0);
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                if (v) {
                    for (int k = 0; k < n; ++k) {
                        const Complex vkp = (*v)(k, p);
                        const Complex vkq = (*v)(k, q);
                        (*v)(k, p) = c * vkp + s * std::conj(phase) * vkq;
                        (*v)(k, q) = -s * phase * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = a(i, i).real();
    return vals;
}

} // namespace detail

// Eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a,
                                                 double herm_tol = kHermitianTolerance) {
    if (!a.finite()) throw InvalidParameter("hermitian_eigenvalues: non-finite entries");
    if (a.hermiticity_defect() > herm_tol)
        throw NonHermitianInput("hermitian_eigenvalues: input exceeds Hermiticity tolerance");
    ComplexMatrix work = a;
    auto vals = detail::jacobi_eigenvalues(work, nullptr);
    std::sort(vals.begin(), vals.end());
    return vals;
}

// Eigenvalues + eigenvectors, values ascending and columns matched.
inline Eigensystem hermitian_eigensystem(const ComplexMatrix& a,
                                         double herm_tol = kHermitianTolerance) {
    if (!a.finite()) throw InvalidParameter("hermitian_eigensystem: non-finite entries");
    if (a.hermiticity_defect() > herm_tol)
        throw NonHermitianInput("hermitian_eigensystem: input exceeds Hermiticity tolerance");
    ComplexMatrix work = a;
    ComplexMatrix vecs;
    auto vals = detail::jacobi_eigenvalues(work, &vecs);

    const int n = a.dim();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return vals[i] < vals[j]; });

    Eigensystem es;
    es.values.resize(n);
    es.vectors = ComplexMatrix(n);
    for (int j = 0; j < n; ++j) {
        es.values[j] = vals[order[j]];
        for (int i = 0; i < n; ++i) es.vectors(i, j) = vecs(i, order[j]);
    }
    return es;
}

// Singular values (ascending) via the Hermitian eigenvalues of A†A.
inline std::vector<double> singular_values(const ComplexMatrix& a) {
    ComplexMatrix h = multiply(adjoint(a), a);
    // symmetrize away the rounding skew before the Hermitian solve
    for (int i = 0; i < h.dim(); ++i)
        for (int j = i; j < h.dim(); ++j) {
            const Complex m = 0.5 * (h(i, j) + std::conj(h(j, i)));
            h(i, j) = m;
            h(j, i) = std::conj(m);
        }
    auto vals = hermitian_eigenvalues(h, 1e-6 * std::max(1.0, h.frobenius_norm()));
    for (auto& v : vals) v = std::sqrt(std::max(v, 0.0));
    return vals;
}

enum class NormOrder { one, two, infinity };

// Schatten norm: sum / root-sum-square / max of singular values. Hermitian
// inputs short-circuit to |eigenvalues|.
inline double schatten_norm(const ComplexMatrix& a, NormOrder p) {
    if (!a.finite()) throw InvalidParameter("schatten_norm: non-finite entries");
    std::vector<double> sv;
    if (a.hermiticity_defect() <= kHermitianTolerance) {
        sv = hermitian_eigenvalues(a);
        for (auto& v : sv) v = std::abs(v);
    } else {
        sv = singular_values(a);
    }
    switch (p) {
        case NormOrder::one: {
            double s = 0.0;
            for (double v : sv) s += v;
            return s;
        }
        case NormOrder::two: {
            double s = 0.0;
            for (double v : sv) s += v * v;
            return std::sqrt(s);
        }
        case NormOrder::infinity:
            return *std::max_element(sv.begin(), sv.end());
    }
    return 0.0;
}

} // namespace qsl::num
