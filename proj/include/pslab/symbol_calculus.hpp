#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pslab/gallery.hpp"
#include "pslab/grid.hpp"

namespace pslab {

// Poisson bracket convention throughout: {a, b} = ∂_ξa ∂_xb − ∂_xa ∂_ξb.

inline constexpr double kBracketVanishing = 1e-9;
inline constexpr double kOrderVanishing = 1e-6;
inline constexpr double kLevelSetTolerance = 1e-8;

class UnsupportedDepth : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class BoxTooSmall : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// (1/2i){p̄0, p0}(ρ) = {Re p0, Im p0}(ρ).
double half_imag_bracket(const SymbolModel& model, PhaseSpacePoint rho);

/// Right-nested bracket {p_w0, {p_w1, {…, p_wk}}} with p_1 = Re p0 and
/// p_2 = Im p0. Lengths 2 and 3 use exact derivatives; length 4 takes
/// central differences of the exact length-3 bracket. Longer words throw
/// UnsupportedDepth.
double iterated_bracket(const SymbolModel& model, std::span<const int> word, PhaseSpacePoint rho);

inline constexpr int kMaxBracketLength = 4;

enum class BracketClass { lambda_plus, lambda_minus, vanishing };

struct BracketReport {
    PhaseSpacePoint point;
    double half_imag_bracket = 0.0;
    std::optional<int> order;  // nullopt: every bracket up to the cap vanishes
    BracketClass classification = BracketClass::vanishing;
};

BracketReport bracket_report(const SymbolModel& model, PhaseSpacePoint rho, int cap);

/// Order of z: the maximum over the level-set sample of k(ρ), the smallest j
/// such that some bracket of length j + 1 exceeds kOrderVanishing.
/// nullopt means "≥ cap" (everything vanishes up to the cap).
std::optional<int> order_at(const SymbolModel& model, Complex z,
                            std::span<const PhaseSpacePoint> level_set_sample, int cap);

/// Points of p0⁻¹(z) inside `box`: local minima of |p0 − z| on a
/// resolution² lattice refined by Gauss–Newton (minimum-norm steps, so
/// degenerate level sets converge too). Deduplicated, sorted by (x, ξ).
std::vector<PhaseSpacePoint> level_set(const SymbolModel& model, Complex z, const Rect& box,
                                       int resolution = 401);

/// Grid nodes within one pitch of the sampled image p0(box).
std::vector<std::uint8_t> classical_spectrum_mask(const SymbolModel& model, const ComplexGrid& grid,
                                                  const Rect& phase_box, int resolution,
                                                  int workers = 1);

struct LambdaMask {
    std::vector<std::uint8_t> plus;
    std::vector<std::uint8_t> minus;
};

/// Λ₊ / Λ₋ classification: a node is plus (minus) if a sample within one
/// pitch of it has half_imag_bracket < −1e-9 (> 1e-9).
LambdaMask lambda_pm_mask(const SymbolModel& model, const ComplexGrid& grid,
                          const Rect& phase_box, int resolution, int workers = 1);

/// V_z(t) = Vol{|p0 − z|² ≤ t} by the uniform midpoint rule on `box`
/// (x spans one period for circle symbols). Throws BoxTooSmall when the set
/// reaches a non-periodic edge of the box.
double sublevel_volume(const SymbolModel& model, Complex z, double t, const Rect& box,
                       int resolution);

/// Target set in the complex plane for preimage volumes.
struct ImageDisc {
    Complex center;
    double radius = 0.0;
};

/// Preimage volume with quadtree refinement: cells whose image (bounded
/// with the exact first and second derivatives) lies inside or outside the
/// target are taken whole; boundary cells are split until their area is
/// below rel_tol of the resolved volume, then midpoint-sampled.
double preimage_volume(const SymbolModel& model, const ImageDisc& target, const Rect& box,
                       double rel_tol = 1e-3);
double preimage_volume(const SymbolModel& model, const Rect& target, const Rect& box,
                       double rel_tol = 1e-3);

/// Least-squares slope of log V_z(t) against log t. Zero volumes are
/// dropped; fewer than 3 survivors throws NumericalError.
double kappa_fit(const SymbolModel& model, Complex z, std::span<const double> t_list);

/// (2πh)⁻¹ Vol p0⁻¹(Γ).
double weyl_prediction(const SymbolModel& model, const Rect& gamma, double h);

/// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace pslab
