#pragma once

#include <optional>
#include <vector>

#include "pslab/types.hpp"

namespace pslab {

/// Complex Schur factorization A = U T U* with U unitary and T upper
/// triangular. Immutable once built; safe to share between threads.
class SchurForm {
public:
    explicit SchurForm(const ComplexMatrix& a);

    const ComplexMatrix& unitary() const { return unitary_; }
    const ComplexMatrix& upper() const { return upper_; }
    Eigen::Index dim() const { return upper_.rows(); }

private:
    ComplexMatrix unitary_;
    ComplexMatrix upper_;
};

bool all_finite(const ComplexMatrix& a);

/// Eigenvalues with algebraic multiplicity, sorted lexicographically by
/// (real, imag). Exactly upper-triangular input returns its diagonal.
/// Throws NumericalError if the QR iteration does not converge (LAPACK's
/// internal cap of 30·dim sweeps).
std::vector<Complex> eigenvalues(const ComplexMatrix& a);

/// All singular values, descending. Divide-and-conquer SVD.
std::vector<double> singular_values(const ComplexMatrix& a);

double smallest_singular_value(const ComplexMatrix& a);
double operator_norm(const ComplexMatrix& a);

/// σ_min(T − z) for upper-triangular T, by Lanczos on ((T−z)*(T−z))⁻¹ with
/// triangular solves. Returns 0 when T − z is exactly singular or the
/// solves overflow.
double sigma_min_shifted(const SchurForm& schur, Complex z);

/// σ_min(A − z) for a sparse (banded) A via sparse LU and the same
/// Lanczos iteration. Used for truncations too large for a dense Schur.
double sigma_min_shifted(const SparseComplexMatrix& a, Complex z);

/// Below this σ_min the resolvent is reported as singular.
inline constexpr double kSingularThreshold = 1e-300;

/// ‖(A − z)⁻¹‖ = 1/σ_min(A − z), or nullopt when A − z is singular.
/// With a Schur form the triangular path is used; otherwise a dense SVD.
std::optional<double> resolvent_norm_at(const ComplexMatrix& a, Complex z,
                                        const SchurForm* schur = nullptr);
std::optional<double> resolvent_norm_at(const SparseComplexMatrix& a, Complex z);

}  // namespace pslab
