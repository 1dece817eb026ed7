#include "pslab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace pslab {
namespace {

using Triplet = Eigen::Triplet<Complex>;

constexpr Complex kI(0.0, 1.0);

double quadratic_radius(double m_max) { return m_max < 1.0 ? -1.0 : std::sqrt(m_max - 1.0); }

DiscretizedOperator assemble(std::string model, Eigen::Index n, double h, Basis basis,
                             const std::vector<Triplet>& entries,
                             std::optional<SymbolModel> symbol) {
    DiscretizedOperator op;
    op.model = std::move(model);
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(entries.begin(), entries.end());
    op.matrix.makeCompressed();
    op.h = h;
    op.dim = n;
    op.basis = basis;
    op.symbol = std::move(symbol);
    return op;
}

void require_h(double h, const char* where) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument(std::string(where) + ": h must be positive");
    }
}

}  // namespace

SymbolModel harmonic_oscillator_symbol() {
    SymbolModel s;
    s.name = "ho";
    s.p0 = [](double x, double xi) { return Complex(xi * xi + x * x, 0.0); };
    s.dx = [](double x, double) { return Complex(2.0 * x, 0.0); };
    s.dxi = [](double, double xi) { return Complex(2.0 * xi, 0.0); };
    s.dxx = [](double, double) { return Complex(2.0, 0.0); };
    s.dxxi = [](double, double) { return Complex(0.0, 0.0); };
    s.dxixi = [](double, double) { return Complex(2.0, 0.0); };
    s.order_weight = [](double x, double xi) { return 1.0 + xi * xi + x * x; };
    s.z0 = Complex(-1.0, 0.0);
    s.domain = PhaseDomain::line;
    s.temperance_c = 2.0;
    s.temperance_n = 2.0;
    s.ellipticity_c = 1.0;
    s.xi_symmetric = true;
    s.phase_radius = quadratic_radius;
    return s;
}

SymbolModel davies_symbol() {
    SymbolModel s;
    s.name = "davies";
    s.p0 = [](double x, double xi) { return Complex(xi * xi, x * x); };
    s.dx = [](double x, double) { return Complex(0.0, 2.0 * x); };
    s.dxi = [](double, double xi) { return Complex(2.0 * xi, 0.0); };
    s.dxx = [](double, double) { return Complex(0.0, 2.0); };
    s.dxxi = [](double, double) { return Complex(0.0, 0.0); };
    s.dxixi = [](double, double) { return Complex(2.0, 0.0); };
    s.order_weight = [](double x, double xi) { return 1.0 + xi * xi + x * x; };
    s.z0 = Complex(-1.0, 0.0);
    s.domain = PhaseDomain::line;
    s.temperance_c = 2.0;
    s.temperance_n = 2.0;
    // |(1+ξ²) + i x²| ≥ (1 + ξ² + x²)/√2
    s.ellipticity_c = std::numbers::sqrt2;
    s.xi_symmetric = true;
    s.phase_radius = quadratic_radius;
    return s;
}

SymbolModel hager_symbol() {
    SymbolModel s;
    s.name = "hager";
    s.p0 = [](double x, double xi) { return xi + std::exp(-kI * x); };
    s.dx = [](double x, double) { return -kI * std::exp(-kI * x); };
    s.dxi = [](double, double) { return Complex(1.0, 0.0); };
    s.dxx = [](double x, double) { return -std::exp(-kI * x); };
    s.dxxi = [](double, double) { return Complex(0.0, 0.0); };
    s.dxixi = [](double, double) { return Complex(0.0, 0.0); };
    s.order_weight = [](double, double xi) { return 1.0 + std::abs(xi); };
    s.z0 = Complex(0.0, 2.0);
    s.domain = PhaseDomain::circle;
    s.temperance_c = std::numbers::sqrt2;
    s.temperance_n = 1.0;
    // |ξ + e^{−ix} − 2i| ≥ max(|ξ| − 1, 1) ≥ (1 + |ξ|)/3
    s.ellipticity_c = 3.0;
    s.xi_symmetric = false;
    s.phase_radius = [](double m_max) { return m_max < 1.0 ? -1.0 : m_max - 1.0; };
    return s;
}

DiscretizedOperator jordan_block(Eigen::Index n) {
    if (n < 1) throw InvalidArgument("jordan_block: N must be >= 1");
    std::vector<Triplet> entries;
    for (Eigen::Index i = 0; i + 1 < n; ++i) entries.emplace_back(i, i + 1, Complex(1.0, 0.0));
    return assemble("jordan", n, 1.0, Basis::canonical, entries, std::nullopt);
}

DiscretizedOperator selfadjoint_ho(double h, Eigen::Index n) {
    require_h(h, "selfadjoint_ho");
    if (n < 1) throw InvalidArgument("selfadjoint_ho: N must be >= 1");
    std::vector<Triplet> entries;
    for (Eigen::Index k = 0; k < n; ++k) {
        entries.emplace_back(k, k, Complex((2.0 * static_cast<double>(k) + 1.0) * h, 0.0));
    }
    return assemble("ho", n, h, Basis::hermite, entries, harmonic_oscillator_symbol());
}

DiscretizedOperator davies_ho(double h, Eigen::Index n) {
    require_h(h, "davies_ho");
    if (n < 4) throw InvalidArgument("davies_ho: N must be >= 4");
    std::vector<Triplet> entries;
    const Complex diag_coeff = Complex(1.0, 1.0) * (0.5 * h);
    const Complex off_coeff = Complex(-1.0, 1.0) * (0.5 * h);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        entries.emplace_back(k, k, diag_coeff * (2.0 * kd + 1.0));
        if (k + 2 < n) {
            const Complex v = off_coeff * std::sqrt((kd + 1.0) * (kd + 2.0));
            entries.emplace_back(k, k + 2, v);
            entries.emplace_back(k + 2, k, v);
        }
    }
    return assemble("davies", n, h, Basis::hermite, entries, davies_symbol());
}

DiscretizedOperator hager_model(double h, Eigen::Index n) {
    require_h(h, "hager_model");
    if (n < 1 || n % 2 == 0) throw InvalidArgument("hager_model: N must be odd");
    std::vector<Triplet> entries;
    for (Eigen::Index r = 0; r < n; ++r) {
        entries.emplace_back(r, r, Complex(h * static_cast<double>(fourier_frequency(r, n)), 0.0));
        if (r + 1 < n) entries.emplace_back(r, r + 1, Complex(1.0, 0.0));
    }
    return assemble("hager", n, h, Basis::fourier, entries, hager_symbol());
}

ComplexMatrix hager_matrix(double h, Eigen::Index n) {
    require_h(h, "hager_matrix");
    if (n < 1) throw InvalidArgument("hager_matrix: N must be >= 1");
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        m(r, r) = h * static_cast<double>(r - n / 2);
        if (r + 1 < n) m(r, r + 1) = 1.0;
    }
    return m;
}

DiscretizedOperator make_operator(const std::string& model, double h, Eigen::Index n) {
    if (model == "jordan") return jordan_block(n);
    if (model == "ho") return selfadjoint_ho(h, n);
    if (model == "davies") return davies_ho(h, n);
    if (model == "hager") return hager_model(h, n);
    throw InvalidArgument("unknown model '" + model + "' (expected jordan, ho, davies, hager)");
}

SymbolModel make_symbol(const std::string& model) {
    if (model == "ho") return harmonic_oscillator_symbol();
    if (model == "davies") return davies_symbol();
    if (model == "hager") return hager_symbol();
    throw InvalidArgument("model '" + model + "' has no symbol (expected ho, davies, hager)");
}

Rect auto_phase_box(const SymbolModel& model, const Rect& image) {
    double reach = 0.0;
    for (double re : {image.x_min, image.x_max}) {
        for (double im : {image.y_min, image.y_max}) {
            reach = std::max(reach, std::abs(Complex(re, im) - model.z0));
        }
    }
    double radius = model.phase_radius(model.ellipticity_c * reach);
    radius = radius < 0.0 ? 0.5 : 1.05 * radius + 0.05;
    if (model.domain == PhaseDomain::circle) {
        return Rect{0.0, 2.0 * std::numbers::pi, -radius, radius};
    }
    return Rect{-radius, radius, -radius, radius};
}

bool basis_covers(const SymbolModel& model, Basis basis, Eigen::Index n, double h,
                  const Rect& image, int resolution) {
    const Rect box = auto_phase_box(model, image);
    const double dx = box.width() / resolution;
    const double dxi = box.height() / resolution;
    double max_weight = 0.0;
    double max_xi = 0.0;
    bool any = false;
    for (int i = 0; i < resolution; ++i) {
        const double x = box.x_min + (i + 0.5) * dx;
        for (int j = 0; j < resolution; ++j) {
            const double xi = box.y_min + (j + 0.5) * dxi;
            const Complex v = model.p0(x, xi);
            if (!image.contains(v.real(), v.imag())) continue;
            any = true;
            max_weight = std::max(max_weight, model.order_weight(x, xi));
            max_xi = std::max(max_xi, std::abs(xi));
        }
    }
    if (!any) return true;
    const double nd = static_cast<double>(n);
    switch (basis) {
        case Basis::hermite:
            return (2.0 * nd + 1.0) * h >= 2.0 * max_weight;
        case Basis::fourier:
            return h * (nd - 1.0) / 2.0 >= max_xi;
        case Basis::canonical:
            break;
    }
    throw InvalidArgument("basis_covers: canonical basis has no phase-space window");
}

}  // namespace pslab
