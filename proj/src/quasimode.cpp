#include "pslab/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pslab/linalg.hpp"
#include "pslab/parallel.hpp"
#include "pslab/symbol_calculus.hpp"

namespace pslab {
namespace {

constexpr Complex kI(0.0, 1.0);

double smooth_step(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double flat_top_cutoff(double r) {
    const double a = std::abs(r);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    const double up = smooth_step(1.0 - a);
    return up / (up + smooth_step(a - 0.5));
}

// Values φ_0(y) … φ_{n−1}(y) of the L²-normalized Hermite functions, with a
// running log-scale so large |y| neither underflows nor overflows early.
void hermite_functions(double y, Eigen::Index n, std::vector<double>& out) {
    out.assign(std::size_t(n), 0.0);
    constexpr double kRescale = 1e150;
    const double log_rescale = std::log(kRescale);
    double log_scale = -0.5 * y * y - 0.25 * std::log(std::numbers::pi);
    double prev = 0.0;
    double cur = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        out[std::size_t(k)] = cur * std::exp(log_scale);
        const double kd = static_cast<double>(k);
        const double next = std::sqrt(2.0 / (kd + 1.0)) * y * cur - std::sqrt(kd / (kd + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += log_rescale;
        }
    }
}

}  // namespace

JordanQuasimode jordan_quasimode(Eigen::Index n, Complex z) {
    if (n < 1) throw InvalidArgument("jordan_quasimode: N must be >= 1");
    if (!(std::abs(z) < 1.0)) throw InvalidArgument("jordan_quasimode: requires |z| < 1");
    JordanQuasimode q;
    q.vector.resize(n);
    Complex power(1.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        q.vector(i) = power;
        power *= z;
    }
    const DiscretizedOperator p = jordan_block(n);
    const ComplexVector r = p.matrix * q.vector - z * q.vector;
    q.residual = r.norm();
    return q;
}

PhaseSpacePoint beam_center(const SymbolModel& model, Complex z, BeamSign sign) {
    const Rect box = auto_phase_box(model, Rect{z.real(), z.real(), z.imag(), z.imag()});
    const std::vector<PhaseSpacePoint> points = level_set(model, z, box);
    std::optional<PhaseSpacePoint> best;
    for (const PhaseSpacePoint& p : points) {
        const double b = half_imag_bracket(model, p);
        const bool admissible = sign == BeamSign::plus ? b < -kBracketVanishing : b > kBracketVanishing;
        if (!admissible) continue;
        if (!best || p.xi > best->xi + 1e-9 || (std::abs(p.xi - best->xi) <= 1e-9 && p.x < best->x)) {
            best = p;
        }
    }
    if (!best) {
        throw NoAdmissibleCenter("beam_center: no admissible center on p0^{-1}(z) for model " +
                                 model.name);
    }
    return *best;
}

Complex GaussianBeam::operator()(double x) const {
    const double s = x - x0;
    const double chi = flat_top_cutoff(s / cutoff_halfwidth);
    if (chi == 0.0) return {0.0, 0.0};
    return chi * std::exp(kI * (xi0 * s + 0.5 * phase_hessian * s * s) / h);
}

GaussianBeam build_beam(const SymbolModel& model, Complex z, PhaseSpacePoint center, double h,
                        BeamSign sign) {
    if (!(h > 0.0)) throw InvalidArgument("build_beam: h must be positive");
    if (std::abs(model.p0(center.x, center.xi) - z) > kLevelSetTolerance) {
        throw InvalidArgument("build_beam: center is not on the level set p0 = z");
    }
    const Complex p_xi = model.dxi(center.x, center.xi);
    if (std::abs(p_xi) <= 1e-12) throw TurningPoint("build_beam: d_xi p0 = 0 at center; unsupported");
    GaussianBeam beam;
    beam.x0 = center.x;
    beam.xi0 = center.xi;
    beam.phase_hessian = -model.dx(center.x, center.xi) / p_xi;
    beam.h = h;
    beam.cutoff_halfwidth = model.domain == PhaseDomain::circle ? std::numbers::pi / 2.0 : 1.0;
    beam.branch = sign;
    if (!(beam.phase_hessian.imag() > 0.0)) {
        throw InvalidArgument("build_beam: Im(phase Hessian) <= 0; center is on the wrong bracket branch");
    }
    return beam;
}

ComplexVector expand_in_basis(const GaussianBeam& beam, Basis basis, Eigen::Index dim, double h) {
    const double w = beam.cutoff_halfwidth;
    const double dx = h / 8.0;
    const long steps = long(std::ceil(2.0 * w / dx));
    const double step = 2.0 * w / double(steps);
    ComplexVector c = ComplexVector::Zero(dim);
    std::vector<double> phi;
    for (long k = 1; k < steps; ++k) {  // cutoff vanishes at both ends
        const double x = beam.x0 - w + double(k) * step;
        const Complex u = beam(x);
        if (u == Complex(0.0, 0.0)) continue;
        switch (basis) {
            case Basis::hermite: {
                hermite_functions(x / std::sqrt(h), dim, phi);
                const double norm = std::pow(h, -0.25) * step;
                for (Eigen::Index n = 0; n < dim; ++n) c(n) += u * (phi[std::size_t(n)] * norm);
                break;
            }
            case Basis::fourier: {
                const double norm = step / std::sqrt(2.0 * std::numbers::pi);
                for (Eigen::Index r = 0; r < dim; ++r) {
                    const double freq = double(fourier_frequency(r, dim));
                    c(r) += u * std::exp(-kI * (freq * x)) * norm;
                }
                break;
            }
            case Basis::canonical:
                throw InvalidArgument("expand_in_basis: canonical basis has no function realization");
        }
    }
    return c;
}

double relative_residual(const SparseComplexMatrix& p, Complex z, const ComplexVector& u) {
    const double un = u.norm();
    if (!(un > 0.0)) throw NumericalError("relative_residual: zero vector");
    return (p * u - z * u).norm() / un;
}

QuasimodeReport residual_decay(const OperatorFamily& family, Complex z,
                               std::span<const double> h_list, BeamSign sign, int workers) {
    if (h_list.size() < 2) throw InvalidArgument("residual_decay: need >= 2 values of h");
    QuasimodeReport report;
    report.samples.resize(h_list.size());
    parallel_for(h_list.size(), workers, [&](std::size_t i) {
        const double h = h_list[i];
        const DiscretizedOperator op = family(h);
        if (!op.symbol) throw InvalidArgument("residual_decay: operator has no symbol");
        const PhaseSpacePoint center = beam_center(*op.symbol, z, sign);
        const GaussianBeam beam = build_beam(*op.symbol, z, center, h, sign);

        QuasimodeSample& s = report.samples[i];
        s.h = h;
        s.dim = op.dim;
        s.residual = relative_residual(op.matrix, z, expand_in_basis(beam, op.basis, op.dim, h));
        Eigen::Index doubled_dim = 2 * op.dim;
        if (op.basis == Basis::fourier) doubled_dim += 1;  // keep it odd
        const DiscretizedOperator doubled = make_operator(op.model, h, doubled_dim);
        s.residual_doubled =
            relative_residual(doubled.matrix, z, expand_in_basis(beam, doubled.basis, doubled.dim, h));
        s.truncation_dominated = std::abs(s.residual_doubled - s.residual) > 0.1 * s.residual;
        s.sigma_min = sigma_min_shifted(op.matrix, z);
    });
    std::vector<double> log_h;
    std::vector<double> log_r;
    for (const QuasimodeSample& s : report.samples) {
        log_h.push_back(std::log(s.h));
        log_r.push_back(std::log(s.residual));
    }
    report.slope = fit_slope(log_h, log_r);
    return report;
}

RankOneCertificate rank_one_certificate(const ComplexMatrix& p, Complex z, const ComplexVector& u) {
    const double un2 = u.squaredNorm();
    if (!(un2 > 0.0)) throw InvalidArgument("rank_one_certificate: zero quasimode");
    const ComplexVector r = p * u - z * u;
    RankOneCertificate cert;
    cert.perturbation = -(r * u.adjoint()) / un2;
    cert.relative_residual = r.norm() / std::sqrt(un2);
    return cert;
}

}  // namespace pslab
