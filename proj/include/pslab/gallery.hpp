#pragma once

#include <functional>
#include <optional>
#include <string>

#include "pslab/types.hpp"

namespace pslab {

enum class PhaseDomain { line, circle };
enum class Basis { canonical, hermite, fourier };

struct PhaseSpacePoint {
    double x = 0.0;
    double xi = 0.0;
};

using SymbolFn = std::function<Complex(double x, double xi)>;

/// A one-dimensional principal symbol p0(x, ξ) with its exact partial
/// derivatives up to second order, an order function m and an ellipticity
/// anchor z0 with |p0 − z0| ≥ m / ellipticity_c.
struct SymbolModel {
    std::string name;
    SymbolFn p0;
    SymbolFn dx;
    SymbolFn dxi;
    SymbolFn dxx;
    SymbolFn dxxi;
    SymbolFn dxixi;
    std::function<double(double x, double xi)> order_weight;
    Complex z0;
    PhaseDomain domain = PhaseDomain::line;

    // m(ρ) ≤ temperance_c ⟨ρ−μ⟩^temperance_n m(μ)
    double temperance_c = 1.0;
    double temperance_n = 0.0;
    double ellipticity_c = 1.0;

    // p0(x, ξ) = p0(x, −ξ); required for random-potential perturbations.
    bool xi_symmetric = false;

    // Coordinate radius R such that {m ≤ m_max} ⊂ {|x|, |ξ| ≤ R} (line) or
    // {|ξ| ≤ R} (circle). Negative when the sublevel set is empty.
    std::function<double(double m_max)> phase_radius;
};

SymbolModel harmonic_oscillator_symbol();
SymbolModel davies_symbol();
SymbolModel hager_symbol();

/// A truncated matrix realization of p^w(x, hD_x). Stored sparse; every
/// gallery model is banded.
struct DiscretizedOperator {
    std::string model;
    SparseComplexMatrix matrix;
    double h = 1.0;
    Eigen::Index dim = 0;
    Basis basis = Basis::canonical;
    std::optional<SymbolModel> symbol;

    ComplexMatrix dense() const { return ComplexMatrix(matrix); }
};

/// Nilpotent shift: ones on the first superdiagonal.
DiscretizedOperator jordan_block(Eigen::Index n);

/// (hD)² + x² in the h-scaled Hermite basis: diag((2n+1)h).
DiscretizedOperator selfadjoint_ho(double h, Eigen::Index n);

/// (hD)² + i x² in the h-scaled Hermite basis. With x = √(h/2)(a + a†) and
/// hD = −i√(h/2)(a − a†) the matrix has diagonal (1+i)(h/2)(2n+1) and
/// entries (i−1)(h/2)√((n+1)(n+2)) at (n, n+2) and (n+2, n).
DiscretizedOperator davies_ho(double h, Eigen::Index n);

/// hD + e^{−ix} on the circle in the Fourier basis e_k, k ascending from
/// −(n−1)/2: diagonal hk, and e^{−ix} e_k = e_{k−1} on the superdiagonal.
DiscretizedOperator hager_model(double h, Eigen::Index n);

/// Dense hager matrix for any n ≥ 1 (frequencies r − ⌊n/2⌋); agrees with
/// hager_model for odd n. Used as a fixed matrix X0, not as an operator.
ComplexMatrix hager_matrix(double h, Eigen::Index n);

/// Frequency of the r-th Fourier basis vector of an n-dimensional hager truncation.
inline long fourier_frequency(Eigen::Index r, Eigen::Index n) {
    return static_cast<long>(r) - static_cast<long>((n - 1) / 2);
}

/// Dispatch by CLI model id: "jordan", "ho", "davies", "hager".
DiscretizedOperator make_operator(const std::string& model, double h, Eigen::Index n);
SymbolModel make_symbol(const std::string& model);

/// Phase-space box containing p0⁻¹(image), sized from the ellipticity bound.
Rect auto_phase_box(const SymbolModel& model, const Rect& image);

/// Whether the first n basis modes cover p0⁻¹(image): for Hermite
/// (2n+1)h ≥ 2·max m on the preimage; for Fourier h(n−1)/2 ≥ max|ξ|.
/// The preimage is sampled on a `resolution`² grid; empty preimage → true.
bool basis_covers(const SymbolModel& model, Basis basis, Eigen::Index n, double h,
                  const Rect& image, int resolution = 801);

}  // namespace pslab
