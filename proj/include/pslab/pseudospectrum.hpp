#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pslab/gallery.hpp"
#include "pslab/grid.hpp"
#include "pslab/linalg.hpp"

namespace pslab {

/// σ_min(P − z) tabulated on a ComplexGrid.
struct SigmaMinField {
    ComplexGrid grid;
    std::vector<double> values;  // flat index iy * nx + ix
    std::string model;
    double h = 1.0;
    Eigen::Index dim = 0;
    std::size_t missing = 0;  // points where the solver failed; their value is 0

    double at(int ix, int iy) const { return values[grid.index(ix, iy)]; }
};

/// Schur-factor the operator once, then evaluate σ_min(T − z) at every node,
/// rows distributed across `workers` threads. Output is independent of the
/// worker count.
SigmaMinField scan(const DiscretizedOperator& op, const ComplexGrid& grid, int workers = 1);

/// Same, for an arbitrary dense matrix.
SigmaMinField scan(const ComplexMatrix& a, const ComplexGrid& grid, int workers = 1);

/// {σ_min < ε}. Strict inequality.
std::vector<std::uint8_t> region(const SigmaMinField& field, double eps);

struct Polyline {
    std::vector<Complex> points;
    bool closed = false;
};

struct ContourLevel {
    double level = 0.0;
    std::vector<Polyline> lines;
};

struct ContourSet {
    std::vector<ContourLevel> levels;
    bool empty() const;
};

/// Marching-squares isolines of the field. Saddle cells are split by the
/// average of the four corner values.
ContourSet contours(const SigmaMinField& field, std::span<const double> levels);

struct InclusionReport {
    int draws = 0;
    std::size_t eigenvalues_checked = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;  // max over eigenvalues of σ_min(P − λ) / ε
};

/// For each draw, Q ~ Gaussian rescaled to ‖Q‖ = 0.99; every eigenvalue λ of
/// P + εQ must satisfy σ_min(P − λ) < ε(1 + 1e-6).
InclusionReport perturbation_inclusion_check(const ComplexMatrix& p, double eps, int draws,
                                             std::uint64_t seed, int workers = 1);

using OperatorFamily = std::function<DiscretizedOperator(double h)>;

/// Smallest N with (2N + 1) h ≥ energy.
Eigen::Index hermite_dimension(double h, double energy);

/// h ↦ davies_ho(h, N(h)) with (2N(h) + 1) h ≥ energy.
OperatorFamily davies_family(double energy);

struct ResolventGrowth {
    std::vector<double> h;
    std::vector<double> norm;
    std::vector<double> dropped_h;  // resolvent singular there
    double power_slope = 0.0;       // d log‖R‖ / d log(1/h)
    double exponential_rate = 0.0;  // d log‖R‖ / d(1/h)
};

/// ‖(P_h − z0)⁻¹‖ along the family, with both a power-law fit against
/// log(1/h) and an exponential fit against 1/h.
ResolventGrowth boundary_exponent_fit(const OperatorFamily& family, Complex z0,
                                      std::span<const double> h_list, int workers = 1);

}  // namespace pslab
