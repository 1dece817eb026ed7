#include "pslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace pslab {
namespace {

void require_square_finite(const ComplexMatrix& a, const char* where) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw InvalidArgument(std::string(where) + ": matrix must be square with dim >= 1");
    }
    if (!all_finite(a)) {
        throw InvalidArgument(std::string(where) + ": matrix has non-finite entries");
    }
}

bool is_upper_triangular(const ComplexMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
            if (a(i, j) != Complex(0.0, 0.0)) return false;
        }
    }
    return true;
}

// Deterministic, non-degenerate start vector so that repeated scans are
// bitwise reproducible.
ComplexVector lanczos_start(Eigen::Index n) {
    ComplexVector v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
        v(i) = Complex(1.0 + u, 0.5 - u);
    }
    return v.normalized();
}

// Largest eigenvalue of the Hermitian positive operator x ↦ A⁻¹A⁻* x,
// returned as σ_min(A) = θ^{-1/2}. Full reorthogonalization; the Ritz
// value is a lower bound of θ, so the returned σ is an upper bound.
template <class ApplyInverseGram>
double inverse_lanczos_sigma_min(Eigen::Index n, ApplyInverseGram&& apply) {
    constexpr int kMaxSteps = 80;
    constexpr double kRelTol = 1e-13;
    const int max_steps = static_cast<int>(std::min<Eigen::Index>(n, kMaxSteps));

    ComplexMatrix basis(n, max_steps);
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.col(0) = lanczos_start(n);

    double theta = 0.0;
    for (int k = 0; k < max_steps; ++k) {
        ComplexVector w = basis.col(k);
        if (!apply(w)) return 0.0;
        const double a = basis.col(k).dot(w).real();
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass) {
            const ComplexVector coeffs = basis.leftCols(k + 1).adjoint() * w;
            w -= basis.leftCols(k + 1) * coeffs;
        }
        const double b = w.norm();

        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) {
            tri(i, i) = alpha[i];
            if (i < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        theta = es.eigenvalues()(k);
        if (!std::isfinite(theta) || theta <= 0.0) return 0.0;
        const double residual = b * std::abs(es.eigenvectors()(k, k));
        if (residual <= kRelTol * theta || b <= 1e-300 || k + 1 == max_steps) break;
        beta.push_back(b);
        basis.col(k + 1) = w / b;
    }
    return 1.0 / std::sqrt(theta);
}

}  // namespace

SchurForm::SchurForm(const ComplexMatrix& a) {
    require_square_finite(a, "SchurForm");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    upper_ = a;
    unitary_.resize(n, n);
    std::vector<Complex> w(n);
    lapack_int sdim = 0;
    const lapack_int info =
        LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, upper_.data(), n, &sdim,
                      w.data(), unitary_.data(), n);
    if (info != 0) {
        throw NumericalError("SchurForm: zgees failed, info=" + std::to_string(info));
    }
    // zgees leaves exact zeros below the diagonal, but be explicit.
    upper_.triangularView<Eigen::StrictlyLower>().setZero();
}

bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
        }
    }
    return true;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
    require_square_finite(a, "eigenvalues");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<Complex> w(n);
    if (is_upper_triangular(a)) {
        for (lapack_int i = 0; i < n; ++i) w[i] = a(i, i);
    } else {
        ComplexMatrix work = a;
        const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n,
                                              w.data(), nullptr, 1, nullptr, 1);
        if (info != 0) {
            throw NumericalError("eigenvalues: QR iteration did not converge, info=" +
                                 std::to_string(info));
        }
    }
    std::sort(w.begin(), w.end(), [](Complex l, Complex r) {
        if (l.real() != r.real()) return l.real() < r.real();
        return l.imag() < r.imag();
    });
    return w;
}

std::vector<double> singular_values(const ComplexMatrix& a) {
    require_square_finite(a, "singular_values");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    ComplexMatrix work = a;
    std::vector<double> s(n);
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data(), n, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw NumericalError("singular_values: zgesdd failed, info=" + std::to_string(info));
    }
    return s;
}

double smallest_singular_value(const ComplexMatrix& a) { return singular_values(a).back(); }

double operator_norm(const ComplexMatrix& a) { return singular_values(a).front(); }

double sigma_min_shifted(const SchurForm& schur, Complex z) {
    const ComplexMatrix& t = schur.upper();
    const Eigen::Index n = t.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (t(i, i) - z == Complex(0.0, 0.0)) return 0.0;
    }
    // x ← (T−z)⁻¹ (T−z)⁻* x, column-oriented substitutions.
    auto apply = [&](ComplexVector& x) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex acc = t.col(i).head(i).dot(x.head(i));
            x(i) = (x(i) - acc) / std::conj(t(i, i) - z);
        }
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            x(j) /= (t(j, j) - z);
            x.head(j) -= x(j) * t.col(j).head(j);
        }
        const double nrm = x.norm();
        return std::isfinite(nrm);
    };
    return inverse_lanczos_sigma_min(n, apply);
}

double sigma_min_shifted(const SparseComplexMatrix& a, Complex z) {
    const Eigen::Index n = a.rows();
    SparseComplexMatrix shifted = a;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= z;
    shifted.makeCompressed();
    Eigen::SparseLU<SparseComplexMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) return 0.0;
    auto apply = [&](ComplexVector& x) {
        ComplexVector y = lu.adjoint().solve(x);
        x = lu.solve(y);
        const double nrm = x.norm();
        return std::isfinite(nrm);
    };
    return inverse_lanczos_sigma_min(n, apply);
}

std::optional<double> resolvent_norm_at(const ComplexMatrix& a, Complex z,
                                        const SchurForm* schur) {
    double sigma = 0.0;
    if (schur != nullptr) {
        sigma = sigma_min_shifted(*schur, z);
    } else {
        ComplexMatrix shifted = a;
        shifted.diagonal().array() -= z;
        sigma = smallest_singular_value(shifted);
    }
    if (!(sigma >= kSingularThreshold)) return std::nullopt;
    return 1.0 / sigma;
}

std::optional<double> resolvent_norm_at(const SparseComplexMatrix& a, Complex z) {
    const double sigma = sigma_min_shifted(a, z);
    if (!(sigma >= kSingularThreshold)) return std::nullopt;
    return 1.0 / sigma;
}

}  // namespace pslab
