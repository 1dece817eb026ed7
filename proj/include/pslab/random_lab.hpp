#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pslab/gallery.hpp"
#include "pslab/rng.hpp"

namespace pslab {

enum class PerturbationKind { gaussian_matrix, random_potential, iid_matrix };
enum class IidLaw { pm1, uniform_disc };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::gaussian_matrix;
    double delta = 0.0;
    // random_potential only; 0 selects the defaults ceil(4/h) and 1/h.
    Eigen::Index n_modes = 0;
    double radius = 0.0;
    bool force = false;  // allow potentials on symbols that are not ξ-even
    IidLaw law = IidLaw::pm1;  // iid_matrix only
};

/// Entry law for iid perturbations: ±1 with equal odds, or uniform on the
/// disc of radius √2. Both have mean 0 and E|q|² = 1.
Complex sample_iid(IidLaw law, std::mt19937_64& gen);
ComplexMatrix sample_iid_matrix(Eigen::Index n, IidLaw law, std::mt19937_64& gen);

/// Matrix of multiplication by V = Σ_{j < n_modes} v_j e_j in the operator
/// basis, v ~ N_C(0, I) conditioned on ‖v‖ ≤ R (rejection, capped at
/// kMaxRejections tries). Fourier: e_j are the modes ordered 0, 1, −1, 2, …
/// and the matrix is Toeplitz. Hermite: triple products by quadrature.
ComplexMatrix sample_random_potential(const DiscretizedOperator& op, const PerturbationSpec& spec,
                                      std::mt19937_64& gen);

/// Same, with explicit coefficients (no sampling).
ComplexMatrix potential_matrix(const DiscretizedOperator& op, std::span<const Complex> coefficients);

inline constexpr int kMaxRejections = 10000;

/// δ schedule for matrix perturbations: N⁻⁴.
inline double default_delta(Eigen::Index n) { return std::pow(double(n), -4.0); }

struct DensityCurve {
    std::vector<double> im_levels;
    std::vector<double> mean_cumulative;  // eigenvalues with Re in window, Im in [im_min, b]
    std::vector<double> weyl;             // (2πh)⁻¹ Vol p0⁻¹([re window] × [im_min, b])
};

struct WeylExperimentReport {
    std::uint64_t seed = 0;
    int draws = 0;
    std::vector<int> counts;
    std::vector<int> dropped_draws;
    double mean_count = 0.0;
    double stddev_count = 0.0;
    double weyl_prediction = 0.0;
    double relative_discrepancy = 0.0;
    double h = 0.0;
    Eigen::Index dim = 0;
    double delta = 0.0;
    Rect gamma;
    // max over draws and eigenvalues of σ_min(P − λ) / (δ‖Q‖); must stay ≤ 1
    double containment_ratio = 0.0;
    std::size_t containment_violations = 0;
    DensityCurve density;
    std::vector<std::vector<Complex>> eigenvalues;  // per draw
};

/// Eigenvalues of P + δQ per draw, counted in the closed rectangle Γ
/// (points within 1e-12 of ∂Γ count as inside), against the Weyl volume.
/// Each draw uses make_stream(seed, draw).
WeylExperimentReport probabilistic_weyl_experiment(const DiscretizedOperator& op, const Rect& gamma,
                                                   const PerturbationSpec& spec, int draws,
                                                   std::uint64_t seed, int workers = 1,
                                                   int density_points = 41);

struct SSVTailReport {
    std::vector<double> t;
    std::vector<double> tail;  // P̂(s_N(X0 + δQ) < δt)
    double delta = 0.0;
    int draws = 0;
    Eigen::Index dim = 0;
    std::optional<double> slope;  // log-log slope over 10/draws ≤ P̂ ≤ 0.1
    double bound_constant = 10.0;
    bool bound_holds = true;  // P̂(t) ≤ C N t² at every t
    std::vector<double> samples;  // s_N / δ per draw
};

class InsufficientDraws : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Smallest-singular-value tail of X0 + δQ with Gaussian Q. Throws
/// InsufficientDraws if fewer than 3 t values fall in the fit window
/// (unless allow_no_fit).
SSVTailReport ssv_tail_experiment(const ComplexMatrix& x0, double delta, std::span<const double> t_grid,
                                  int draws, std::uint64_t seed, int workers = 1,
                                  bool allow_no_fit = false);

/// The same tail measurement under a non-Gaussian iid law; no exponent is
/// asserted.
SSVTailReport iid_perturbation_demo(const ComplexMatrix& x0, IidLaw law, double delta,
                                    std::span<const double> t_grid, int draws, std::uint64_t seed,
                                    int workers = 1);

}  // namespace pslab
