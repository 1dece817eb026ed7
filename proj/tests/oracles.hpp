#pragma once
// Slow, independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Eigen's own SVDs: Jacobi for small matrices, bidiagonal divide and
// conquer beyond.
inline Eigen::VectorXd singular_values(const Matrix& a) {
    if (a.rows() <= 64) return Eigen::JacobiSVD<Matrix>(a).singularValues();
    return Eigen::BDCSVD<Matrix>(a).singularValues();
}

inline double sigma_min(const Matrix& a) { return singular_values(a).minCoeff(); }
inline double sigma_max(const Matrix& a) { return singular_values(a).maxCoeff(); }

inline double sigma_min_shifted(const Matrix& a, Complex z) {
    return sigma_min(a - z * Matrix::Identity(a.rows(), a.cols()));
}

// ‖A‖ by power iteration on A*A from a fixed start.
inline double power_norm(const Matrix& a, int iters = 2000) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.cols());
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        Eigen::VectorXcd w = a.adjoint() * (a * v);
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return std::sqrt(lambda);
}

// Haar-ish unitary from QR of a Gaussian matrix.
inline Matrix random_unitary(Eigen::Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(gen), g(gen));
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(n, n);
}

inline Matrix random_matrix(Eigen::Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(gen), g(gen));
    return m;
}

// Central differences.
using Fn = std::function<Complex(double, double)>;

inline Complex d_x(const Fn& f, double x, double xi, double step = 1e-5) {
    return (f(x + step, xi) - f(x - step, xi)) / (2.0 * step);
}
inline Complex d_xi(const Fn& f, double x, double xi, double step = 1e-5) {
    return (f(x, xi + step) - f(x, xi - step)) / (2.0 * step);
}

// {a, b} = ∂_ξa ∂_xb − ∂_xa ∂_ξb for real functions, by finite differences.
using RealFn = std::function<double(double, double)>;
inline RealFn bracket(const RealFn& a, const RealFn& b, double step = 1e-4) {
    return [=](double x, double xi) {
        const double a_xi = (a(x, xi + step) - a(x, xi - step)) / (2 * step);
        const double a_x = (a(x + step, xi) - a(x - step, xi)) / (2 * step);
        const double b_xi = (b(x, xi + step) - b(x, xi - step)) / (2 * step);
        const double b_x = (b(x + step, xi) - b(x - step, xi)) / (2 * step);
        return a_xi * b_x - a_x * b_xi;
    };
}

// Composite midpoint rule.
inline double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const double dx = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * dx);
    return s * dx;
}

// Matrix of (hD)² + i x² on the first n h-scaled Hermite functions, assembled
// from dense ladder matrices of size n + 2 so the kept block is exact.
inline Matrix davies_by_ladders(double h, Eigen::Index n) {
    const Eigen::Index m = n + 2;
    Matrix a = Matrix::Zero(m, m);
    for (Eigen::Index k = 1; k < m; ++k) a(k - 1, k) = std::sqrt(double(k));
    const Matrix ad = a.adjoint();
    const double c = std::sqrt(h / 2.0);
    const Matrix x = c * (a + ad);
    const Matrix hd = Complex(0.0, -1.0) * c * (a - ad);
    const Matrix p = hd * hd + Complex(0.0, 1.0) * (x * x);
    return p.topLeftCorner(n, n);
}

// Vol{(x, ξ) ∈ [0, 2π) × R : ξ + cos x ∈ [a, b], −sin x ∈ [c, d]}: the ξ-slab
// has width b − a wherever −sin x lands in [c, d].
inline double hager_preimage_volume(double a, double b, double c, double d, int n = 2000000) {
    return (b - a) * integrate([&](double x) { return (-std::sin(x) >= c && -std::sin(x) <= d) ? 1.0 : 0.0; },
                               0.0, 2.0 * std::numbers::pi, n);
}

// Vol{|ξ + e^{−ix} − z|² ≤ t}: per x, ξ ranges over an interval of length
// 2√(t − (sin x + Im z)²)₊.
inline double hager_sublevel_volume(Complex z, double t, int n = 2000000) {
    return integrate(
        [&](double x) {
            const double s = std::sin(x) + z.imag();
            const double r = t - s * s;
            return r > 0.0 ? 2.0 * std::sqrt(r) : 0.0;
        },
        0.0, 2.0 * std::numbers::pi, n);
}

// Vol{|ξ² + i x² − z|² ≤ t} for Re z, Im z ≥ 0: per x, ξ² must lie in
// [Re z − √s, Re z + √s] with s = t − (x² − Im z)².
inline double davies_sublevel_volume(Complex z, double t, int n = 4000000) {
    const double a = z.real();
    const double b = z.imag();
    const double x_max = std::sqrt(b + std::sqrt(t));
    return integrate(
        [&](double x) {
            const double q = x * x - b;
            const double s = t - q * q;
            if (s <= 0.0) return 0.0;
            const double hi = a + std::sqrt(s);
            const double lo = a - std::sqrt(s);
            if (hi <= 0.0) return 0.0;
            return 2.0 * (std::sqrt(hi) - std::sqrt(std::max(0.0, lo)));
        },
        -x_max, x_max, n);
}

}  // namespace oracle
