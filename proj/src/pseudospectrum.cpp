#include "pslab/pseudospectrum.hpp"

#include <algorithm>
#include <cmath>

#include "pslab/parallel.hpp"
#include "pslab/rng.hpp"
#include "pslab/symbol_calculus.hpp"

namespace pslab {

SigmaMinField scan(const ComplexMatrix& a, const ComplexGrid& grid, int workers) {
    grid.validate();
    const SchurForm schur(a);
    SigmaMinField field;
    field.grid = grid;
    field.dim = a.rows();
    field.values.assign(grid.size(), 0.0);
    std::vector<std::uint8_t> failed(grid.size(), 0);
    parallel_for(std::size_t(grid.ny), workers, [&](std::size_t iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const std::size_t idx = grid.index(ix, int(iy));
            const double s = sigma_min_shifted(schur, grid.node(ix, int(iy)));
            if (std::isfinite(s) && s >= 0.0) {
                field.values[idx] = s;
            } else {
                failed[idx] = 1;
            }
        }
    });
    field.missing = std::size_t(std::count(failed.begin(), failed.end(), 1));
    return field;
}

SigmaMinField scan(const DiscretizedOperator& op, const ComplexGrid& grid, int workers) {
    SigmaMinField field = scan(op.dense(), grid, workers);
    field.model = op.model;
    field.h = op.h;
    return field;
}

std::vector<std::uint8_t> region(const SigmaMinField& field, double eps) {
    if (!(eps >= 0.0)) throw InvalidArgument("region: eps must be >= 0");
    std::vector<std::uint8_t> mask(field.values.size());
    std::transform(field.values.begin(), field.values.end(), mask.begin(),
                   [eps](double s) { return std::uint8_t(s < eps); });
    return mask;
}

InclusionReport perturbation_inclusion_check(const ComplexMatrix& p, double eps, int draws,
                                             std::uint64_t seed, int workers) {
    if (!(eps > 0.0)) throw InvalidArgument("perturbation_inclusion_check: eps must be > 0");
    if (draws < 1) throw InvalidArgument("perturbation_inclusion_check: draws must be >= 1");
    const SchurForm schur(p);
    std::vector<InclusionReport> per_draw(draws);
    parallel_for(std::size_t(draws), workers, [&](std::size_t d) {
        auto gen = make_stream(seed, d);
        ComplexMatrix q = sample_gaussian_matrix(p.rows(), gen);
        q *= 0.99 / operator_norm(q);
        const std::vector<Complex> lambdas = eigenvalues(p + eps * q);
        InclusionReport& r = per_draw[d];
        for (Complex lambda : lambdas) {
            const double ratio = sigma_min_shifted(schur, lambda) / eps;
            r.max_ratio = std::max(r.max_ratio, ratio);
            if (!(ratio < 1.0 + 1e-6)) ++r.violations;
        }
        r.eigenvalues_checked = lambdas.size();
    });
    InclusionReport total;
    total.draws = draws;
    for (const InclusionReport& r : per_draw) {
        total.eigenvalues_checked += r.eigenvalues_checked;
        total.violations += r.violations;
        total.max_ratio = std::max(total.max_ratio, r.max_ratio);
    }
    return total;
}

Eigen::Index hermite_dimension(double h, double energy) {
    if (!(h > 0.0)) throw InvalidArgument("hermite_dimension: h must be positive");
    return std::max<Eigen::Index>(4, Eigen::Index(std::ceil((energy / h - 1.0) / 2.0)));
}

OperatorFamily davies_family(double energy) {
    return [energy](double h) { return davies_ho(h, hermite_dimension(h, energy)); };
}

ResolventGrowth boundary_exponent_fit(const OperatorFamily& family, Complex z0,
                                      std::span<const double> h_list, int workers) {
    if (h_list.size() < 2) throw InvalidArgument("boundary_exponent_fit: need >= 2 values of h");
    std::vector<std::optional<double>> norms(h_list.size());
    parallel_for(h_list.size(), workers, [&](std::size_t i) {
        const DiscretizedOperator op = family(h_list[i]);
        norms[i] = resolvent_norm_at(op.matrix, z0);
    });
    ResolventGrowth out;
    std::vector<double> log_inv_h;
    std::vector<double> inv_h;
    std::vector<double> log_norm;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        if (!norms[i]) {
            out.dropped_h.push_back(h_list[i]);
            continue;
        }
        out.h.push_back(h_list[i]);
        out.norm.push_back(*norms[i]);
        log_inv_h.push_back(-std::log(h_list[i]));
        inv_h.push_back(1.0 / h_list[i]);
        log_norm.push_back(std::log(*norms[i]));
    }
    if (out.h.size() < 2) throw NumericalError("boundary_exponent_fit: fewer than 2 usable h values");
    out.power_slope = fit_slope(log_inv_h, log_norm);
    out.exponential_rate = fit_slope(inv_h, log_norm);
    return out;
}

}  // namespace pslab
