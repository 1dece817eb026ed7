#pragma once

#include <span>
#include <vector>

#include "pslab/gallery.hpp"
#include "pslab/pseudospectrum.hpp"

namespace pslab {

struct JordanQuasimode {
    ComplexVector vector;  // e₊ = (1, z, …, z^{N−1})
    double residual = 0.0;  // ‖(P_N − z) e₊‖, equal to |z|^N
};

/// Exact quasimode of the N × N shift; rejects |z| ≥ 1.
JordanQuasimode jordan_quasimode(Eigen::Index n, Complex z);

enum class BeamSign { plus, minus };

class NoAdmissibleCenter : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class TurningPoint : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A point of p0⁻¹(z) where (1/2i){p̄0, p0} is negative (plus) or positive
/// (minus). Among candidates the largest ξ wins, then the smallest x.
PhaseSpacePoint beam_center(const SymbolModel& model, Complex z, BeamSign sign);

/// Order-0 WKB beam χ((x − x0)/w) exp(i(ξ0 s + Φ s²/2)/h), s = x − x0, with
/// Φ = −∂_x p0 / ∂_ξ p0 solving the linearized eikonal at the center and a
/// flat-top smooth cutoff χ (1 on |r| ≤ 1/2, 0 on |r| ≥ 1).
struct GaussianBeam {
    double x0 = 0.0;
    double xi0 = 0.0;
    Complex phase_hessian;
    double h = 1.0;
    double cutoff_halfwidth = 1.0;
    BeamSign branch = BeamSign::plus;

    Complex operator()(double x) const;
};

GaussianBeam build_beam(const SymbolModel& model, Complex z, PhaseSpacePoint center, double h,
                        BeamSign sign = BeamSign::plus);

/// Coefficients of the beam in the first `dim` vectors of the operator's
/// basis (h-scaled Hermite functions or Fourier modes), by trapezoidal
/// quadrature with spacing h/8 over the cutoff support.
ComplexVector expand_in_basis(const GaussianBeam& beam, Basis basis, Eigen::Index dim, double h);

/// ‖(P − z)u‖ / ‖u‖.
double relative_residual(const SparseComplexMatrix& p, Complex z, const ComplexVector& u);

struct QuasimodeSample {
    double h = 0.0;
    Eigen::Index dim = 0;
    double residual = 0.0;
    double residual_doubled = 0.0;  // same beam against a 2N truncation
    double sigma_min = 0.0;         // σ_min(P_h − z)
    bool truncation_dominated = false;
};

struct QuasimodeReport {
    std::vector<QuasimodeSample> samples;
    double slope = 0.0;  // d log residual / d log h
};

/// Builds a beam at each h, expands it in the family's basis and measures
/// the relative residual. Samples where doubling N moves the residual by
/// more than 10% are flagged.
QuasimodeReport residual_decay(const OperatorFamily& family, Complex z,
                               std::span<const double> h_list, BeamSign sign = BeamSign::plus,
                               int workers = 1);

struct RankOneCertificate {
    ComplexMatrix perturbation;  // δQ = −r ⊗ u* / ‖u‖², r = (P − z)u
    double relative_residual = 0.0;
};

/// P + δQ has z as an exact eigenvalue with eigenvector u, and
/// ‖δQ‖ = ‖(P − z)u‖ / ‖u‖.
RankOneCertificate rank_one_certificate(const ComplexMatrix& p, Complex z, const ComplexVector& u);

}  // namespace pslab
