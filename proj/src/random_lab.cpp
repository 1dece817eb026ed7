#include "pslab/random_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pslab/linalg.hpp"
#include "pslab/parallel.hpp"
#include "pslab/symbol_calculus.hpp"

namespace pslab {
namespace {

// Fourier mode order for potentials: 0, 1, −1, 2, −2, …
long potential_frequency(Eigen::Index j) {
    return j % 2 == 1 ? long((j + 1) / 2) : -long(j / 2);
}

// Normalized h-scaled Hermite functions φ_0 … φ_{n−1} sampled at xs; rows
// are sample points.
Eigen::MatrixXd hermite_table(std::span<const double> xs, Eigen::Index n, double h) {
    Eigen::MatrixXd table(Eigen::Index(xs.size()), n);
    const double norm = std::pow(h, -0.25) * std::pow(std::numbers::pi, -0.25);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double y = xs[i] / std::sqrt(h);
        double prev = 0.0;
        double cur = norm * std::exp(-0.5 * y * y);
        for (Eigen::Index k = 0; k < n; ++k) {
            table(Eigen::Index(i), k) = cur;
            const double kd = double(k);
            const double next = std::sqrt(2.0 / (kd + 1.0)) * y * cur - std::sqrt(kd / (kd + 1.0)) * prev;
            prev = cur;
            cur = next;
        }
    }
    return table;
}

bool in_gamma(Complex w, const Rect& g) {
    constexpr double tie = 1e-12;
    return w.real() >= g.x_min - tie && w.real() <= g.x_max + tie && w.imag() >= g.y_min - tie &&
           w.imag() <= g.y_max + tie;
}

}  // namespace

Complex sample_iid(IidLaw law, std::mt19937_64& gen) {
    switch (law) {
        case IidLaw::pm1:
            return {(gen() >> 63) ? 1.0 : -1.0, 0.0};
        case IidLaw::uniform_disc: {
            const double r = std::sqrt(2.0 * uniform01(gen));
            const double a = 2.0 * std::numbers::pi * uniform01(gen);
            return {r * std::cos(a), r * std::sin(a)};
        }
    }
    throw InvalidArgument("sample_iid: unknown law");
}

ComplexMatrix sample_iid_matrix(Eigen::Index n, IidLaw law, std::mt19937_64& gen) {
    if (n < 1) throw InvalidArgument("sample_iid_matrix: N must be >= 1");
    ComplexMatrix q(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) q(i, j) = sample_iid(law, gen);
    }
    return q;
}

ComplexMatrix potential_matrix(const DiscretizedOperator& op, std::span<const Complex> coefficients) {
    const Eigen::Index n = op.dim;
    const Eigen::Index modes = Eigen::Index(coefficients.size());
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    switch (op.basis) {
        case Basis::fourier: {
            const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
            for (Eigen::Index j = 0; j < modes; ++j) {
                const long f = potential_frequency(j);
                for (Eigen::Index col = 0; col < n; ++col) {
                    const Eigen::Index row = col + f;
                    if (row >= 0 && row < n) m(row, col) += coefficients[std::size_t(j)] * norm;
                }
            }
            return m;
        }
        case Basis::hermite: {
            const Eigen::Index top = std::max(n, modes);
            const double reach = 1.5 * std::sqrt((2.0 * double(top) + 1.0) * op.h) + 6.0 * std::sqrt(op.h);
            const double dx = op.h / 8.0;
            const long steps = long(std::ceil(2.0 * reach / dx));
            std::vector<double> xs(std::size_t(steps) + 1);
            for (long k = 0; k <= steps; ++k) xs[std::size_t(k)] = -reach + 2.0 * reach * double(k) / double(steps);
            const double w = 2.0 * reach / double(steps);
            const Eigen::MatrixXd phi = hermite_table(xs, top, op.h);
            ComplexVector v = ComplexVector::Zero(Eigen::Index(xs.size()));
            for (Eigen::Index j = 0; j < modes; ++j) v += coefficients[std::size_t(j)] * phi.col(j).cast<Complex>();
            const Eigen::MatrixXd basis = phi.leftCols(n);
            const ComplexMatrix weighted = (v * w).asDiagonal() * basis.cast<Complex>();
            return basis.transpose().cast<Complex>() * weighted;
        }
        case Basis::canonical:
            break;
    }
    throw InvalidArgument("potential_matrix: operator basis has no function realization");
}

ComplexMatrix sample_random_potential(const DiscretizedOperator& op, const PerturbationSpec& spec,
                                      std::mt19937_64& gen) {
    if (!op.symbol) throw InvalidArgument("sample_random_potential: operator has no symbol");
    if (!op.symbol->xi_symmetric && !spec.force) {
        throw InvalidArgument("sample_random_potential: symbol of '" + op.model +
                              "' is not even in xi; pass force to override");
    }
    const Eigen::Index modes =
        spec.n_modes > 0 ? spec.n_modes : Eigen::Index(std::ceil(4.0 / op.h));
    const double radius = spec.radius > 0.0 ? spec.radius : 1.0 / op.h;
    std::vector<Complex> v(std::size_t(modes), Complex(0.0, 0.0));
    for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxRejections) {
            throw NumericalError("sample_random_potential: no draw with ||v|| <= R after " +
                                 std::to_string(kMaxRejections) + " tries (R too small)");
        }
        double norm2 = 0.0;
        for (Complex& c : v) {
            c = complex_gaussian(gen);
            norm2 += std::norm(c);
        }
        if (std::sqrt(norm2) <= radius) break;
    }
    return potential_matrix(op, v);
}

WeylExperimentReport probabilistic_weyl_experiment(const DiscretizedOperator& op, const Rect& gamma,
                                                   const PerturbationSpec& spec, int draws,
                                                   std::uint64_t seed, int workers,
                                                   int density_points) {
    if (draws < 1) throw InvalidArgument("weyl experiment: draws must be >= 1");
    if (!(spec.delta >= 0.0)) throw InvalidArgument("weyl experiment: delta must be >= 0");
    if (!op.symbol) throw InvalidArgument("weyl experiment: operator '" + op.model + "' has no symbol");
    if (!(gamma.x_min < gamma.x_max && gamma.y_min < gamma.y_max)) {
        throw InvalidArgument("weyl experiment: Gamma must be a nondegenerate rectangle");
    }
    if (density_points < 2) throw InvalidArgument("weyl experiment: density_points must be >= 2");
    const SymbolModel& symbol = *op.symbol;

    WeylExperimentReport rep;
    rep.seed = seed;
    rep.draws = draws;
    rep.h = op.h;
    rep.dim = op.dim;
    rep.delta = spec.delta;
    rep.gamma = gamma;
    rep.weyl_prediction = weyl_prediction(symbol, gamma, op.h);

    const ComplexMatrix p = op.dense();
    const SchurForm schur(p);
    std::vector<std::optional<std::vector<Complex>>> spectra(draws);
    std::vector<double> ratios(draws, 0.0);
    std::vector<std::size_t> violations(draws, 0);

    parallel_for(std::size_t(draws), workers, [&](std::size_t d) {
        auto gen = make_stream(seed, d);
        ComplexMatrix q;
        switch (spec.kind) {
            case PerturbationKind::gaussian_matrix: q = sample_gaussian_matrix(op.dim, gen); break;
            case PerturbationKind::iid_matrix: q = sample_iid_matrix(op.dim, spec.law, gen); break;
            case PerturbationKind::random_potential: q = sample_random_potential(op, spec, gen); break;
        }
        std::vector<Complex> lambdas;
        try {
            lambdas = eigenvalues(p + spec.delta * q);
        } catch (const NumericalError&) {
            return;
        }
        const double bound = spec.delta * operator_norm(q);
        if (bound > 0.0) {
            for (Complex lambda : lambdas) {
                const double ratio = sigma_min_shifted(schur, lambda) / bound;
                ratios[d] = std::max(ratios[d], ratio);
                if (ratio > 1.0 + 1e-8) ++violations[d];
            }
        }
        spectra[d] = std::move(lambdas);
    });

    std::vector<double> levels(density_points);
    for (int k = 0; k < density_points; ++k) {
        levels[k] = std::lerp(gamma.y_min, gamma.y_max, double(k) / (density_points - 1));
    }
    rep.density.im_levels = levels;
    rep.density.mean_cumulative.assign(levels.size(), 0.0);
    for (int d = 0; d < draws; ++d) {
        if (!spectra[d]) {
            rep.dropped_draws.push_back(d);
            continue;
        }
        const auto& lambdas = *spectra[d];
        int count = 0;
        for (Complex w : lambdas) {
            if (!in_gamma(w, gamma)) continue;
            ++count;
            for (std::size_t k = 0; k < levels.size(); ++k) {
                if (w.imag() <= levels[k] + 1e-12) rep.density.mean_cumulative[k] += 1.0;
            }
        }
        rep.counts.push_back(count);
        rep.containment_ratio = std::max(rep.containment_ratio, ratios[d]);
        rep.containment_violations += violations[d];
        rep.eigenvalues.push_back(lambdas);
    }
    const double used = double(rep.counts.size());
    if (used == 0) throw NumericalError("weyl experiment: every draw failed");
    for (double& c : rep.density.mean_cumulative) c /= used;
    double sum = 0.0;
    for (int c : rep.counts) sum += c;
    rep.mean_count = sum / used;
    double var = 0.0;
    for (int c : rep.counts) var += (c - rep.mean_count) * (c - rep.mean_count);
    rep.stddev_count = used > 1 ? std::sqrt(var / (used - 1.0)) : 0.0;
    rep.relative_discrepancy = rep.weyl_prediction > 0.0
                                   ? std::abs(rep.mean_count - rep.weyl_prediction) / rep.weyl_prediction
                                   : std::abs(rep.mean_count);

    rep.density.weyl.resize(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        rep.density.weyl[k] =
            levels[k] > gamma.y_min
                ? weyl_prediction(symbol, Rect{gamma.x_min, gamma.x_max, gamma.y_min, levels[k]}, op.h)
                : 0.0;
    }
    return rep;
}

namespace {

template <class Sampler>
SSVTailReport tail_experiment(const ComplexMatrix& x0, double delta, std::span<const double> t_grid,
                              int draws, std::uint64_t seed, int workers, bool allow_no_fit,
                              Sampler&& sample) {
    if (!(delta > 0.0)) throw InvalidArgument("ssv tail: delta must be > 0");
    if (draws < 1000) throw InvalidArgument("ssv tail: draws must be >= 1000");
    if (t_grid.empty()) throw InvalidArgument("ssv tail: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw InvalidArgument("ssv tail: t grid must be positive and ascending");
        }
    }
    SSVTailReport rep;
    rep.delta = delta;
    rep.draws = draws;
    rep.dim = x0.rows();
    rep.t.assign(t_grid.begin(), t_grid.end());
    rep.samples.assign(draws, 0.0);
    parallel_for(std::size_t(draws), workers, [&](std::size_t d) {
        auto gen = make_stream(seed, d);
        const ComplexMatrix q = sample(x0.rows(), gen);
        rep.samples[d] = smallest_singular_value(x0 + delta * q) / delta;
    });
    std::vector<double> sorted = rep.samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = double(x0.rows());
    std::vector<double> log_t;
    std::vector<double> log_p;
    for (double t : rep.t) {
        const auto hits = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        const double p = double(hits) / double(draws);
        rep.tail.push_back(p);
        if (p > rep.bound_constant * n * t * t) rep.bound_holds = false;
        if (p > 0.0 && p >= 10.0 / double(draws) && p <= 0.1) {
            log_t.push_back(std::log(t));
            log_p.push_back(std::log(p));
        }
    }
    if (log_t.size() >= 3) {
        rep.slope = fit_slope(log_t, log_p);
    } else if (!allow_no_fit) {
        throw InsufficientDraws("ssv tail: fewer than 3 t values inside the fit window (insufficient draws)");
    }
    return rep;
}

}  // namespace

SSVTailReport ssv_tail_experiment(const ComplexMatrix& x0, double delta, std::span<const double> t_grid,
                                  int draws, std::uint64_t seed, int workers, bool allow_no_fit) {
    return tail_experiment(x0, delta, t_grid, draws, seed, workers, allow_no_fit,
                           [](Eigen::Index n, std::mt19937_64& gen) { return sample_gaussian_matrix(n, gen); });
}

SSVTailReport iid_perturbation_demo(const ComplexMatrix& x0, IidLaw law, double delta,
                                    std::span<const double> t_grid, int draws, std::uint64_t seed,
                                    int workers) {
    return tail_experiment(x0, delta, t_grid, draws, seed, workers, true,
                           [law](Eigen::Index n, std::mt19937_64& gen) { return sample_iid_matrix(n, law, gen); });
}

}  // namespace pslab
