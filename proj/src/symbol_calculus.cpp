#include "pslab/symbol_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "pslab/parallel.hpp"

namespace pslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Real-valued component i ∈ {1, 2} of a complex derivative value.
double part(Complex v, int i) { return i == 1 ? v.real() : v.imag(); }

struct Jet2 {
    Complex p, x, xi, xx, xxi, xixi;
};

Jet2 jet(const SymbolModel& m, double x, double xi) {
    return {m.p0(x, xi), m.dx(x, xi), m.dxi(x, xi), m.dxx(x, xi), m.dxxi(x, xi), m.dxixi(x, xi)};
}

double bracket2(const Jet2& j, int a, int b) {
    return part(j.xi, a) * part(j.x, b) - part(j.x, a) * part(j.xi, b);
}

double bracket3(const Jet2& j, int a, int b, int c) {
    // B = {f_b, f_c}; differentiate once more with the exact second derivatives.
    const double bx = part(j.xxi, b) * part(j.x, c) + part(j.xi, b) * part(j.xx, c) -
                      part(j.xx, b) * part(j.xi, c) - part(j.x, b) * part(j.xxi, c);
    const double bxi = part(j.xixi, b) * part(j.x, c) + part(j.xi, b) * part(j.xxi, c) -
                       part(j.xxi, b) * part(j.xi, c) - part(j.x, b) * part(j.xixi, c);
    return part(j.xi, a) * bx - part(j.x, a) * bxi;
}

double reduce_period(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

void for_each_word(int length, const std::function<bool(std::span<const int>)>& visit) {
    std::vector<int> word(length, 1);
    for (int mask = 0; mask < (1 << length); ++mask) {
        for (int i = 0; i < length; ++i) word[i] = (mask >> (length - 1 - i)) & 1 ? 2 : 1;
        if (visit(word)) return;
    }
}

// Smallest j ≤ cap with a nonvanishing bracket of length j + 1.
std::optional<int> point_order(const SymbolModel& model, PhaseSpacePoint rho, int cap) {
    if (cap + 1 > kMaxBracketLength) {
        throw UnsupportedDepth("order: cap " + std::to_string(cap) + " needs brackets of length " +
                               std::to_string(cap + 1) + " (max " +
                               std::to_string(kMaxBracketLength) + ")");
    }
    for (int j = 1; j <= cap; ++j) {
        bool found = false;
        for_each_word(j + 1, [&](std::span<const int> w) {
            found = std::abs(iterated_bracket(model, w, rho)) > kOrderVanishing;
            return found;
        });
        if (found) return j;
    }
    return std::nullopt;
}

PhaseSpacePoint newton_refine(const SymbolModel& model, Complex z, PhaseSpacePoint rho,
                              bool circle, double* residual) {
    constexpr int kMaxIterations = 200;
    for (int it = 0; it < kMaxIterations; ++it) {
        const Complex r = model.p0(rho.x, rho.xi) - z;
        if (std::abs(r) <= 1e-15 * (1.0 + std::abs(z))) break;
        const Complex px = model.dx(rho.x, rho.xi);
        const Complex pxi = model.dxi(rho.x, rho.xi);
        Eigen::Matrix2d jac;
        jac << px.real(), pxi.real(), px.imag(), pxi.imag();
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-12);
        const Eigen::Vector2d step = svd.solve(Eigen::Vector2d(-r.real(), -r.imag()));
        rho.x += step(0);
        rho.xi += step(1);
        if (step.norm() <= 1e-15 * (1.0 + std::abs(rho.x) + std::abs(rho.xi))) break;
    }
    if (circle) rho.x = reduce_period(rho.x);
    *residual = std::abs(model.p0(rho.x, rho.xi) - z);
    return rho;
}

// Image of a phase-space cell as an axis-aligned box [c ± r_re] × [c ± r_im],
// bounded by the first-order terms and twice the second-order term.
struct CellImage {
    Complex center;
    double r_re;
    double r_im;
};

CellImage cell_image(const SymbolModel& m, double x, double xi, double a, double b) {
    const Jet2 j = jet(m, x, xi);
    auto radius = [&](int i) {
        return std::abs(part(j.x, i)) * a + std::abs(part(j.xi, i)) * b +
               std::abs(part(j.xx, i)) * a * a + 2.0 * std::abs(part(j.xxi, i)) * a * b +
               std::abs(part(j.xixi, i)) * b * b;
    };
    return {j.p, radius(1), radius(2)};
}

enum class CellClass { inside, outside, ambiguous };

CellClass classify(const CellImage& c, const ImageDisc& d) {
    const double dre = std::abs(c.center.real() - d.center.real());
    const double dim = std::abs(c.center.imag() - d.center.imag());
    if (std::hypot(dre + c.r_re, dim + c.r_im) <= d.radius) return CellClass::inside;
    if (std::hypot(std::max(0.0, dre - c.r_re), std::max(0.0, dim - c.r_im)) > d.radius) {
        return CellClass::outside;
    }
    return CellClass::ambiguous;
}

CellClass classify(const CellImage& c, const Rect& r) {
    const double re = c.center.real();
    const double im = c.center.imag();
    if (re - c.r_re >= r.x_min && re + c.r_re <= r.x_max && im - c.r_im >= r.y_min &&
        im + c.r_im <= r.y_max) {
        return CellClass::inside;
    }
    if (re + c.r_re < r.x_min || re - c.r_re > r.x_max || im + c.r_im < r.y_min ||
        im - c.r_im > r.y_max) {
        return CellClass::outside;
    }
    return CellClass::ambiguous;
}

bool point_in(Complex w, const ImageDisc& d) { return std::abs(w - d.center) <= d.radius; }
bool point_in(Complex w, const Rect& r) { return r.contains(w.real(), w.imag()); }

struct Cell {
    double x, xi, a, b;  // center and half-widths
};

template <class Target>
double adaptive_volume(const SymbolModel& model, const Target& target, const Rect& box,
                       double rel_tol) {
    constexpr int kCoarse = 64;
    constexpr int kMaxLevels = 40;
    constexpr std::size_t kMaxCells = 4'000'000;
    const bool circle = model.domain == PhaseDomain::circle;
    const double box_area = box.width() * box.height();

    auto touches_edge = [&](const Cell& c) {
        const double eps = 1e-12 * (1.0 + box.width() + box.height());
        const bool xi_edge = c.xi - c.b <= box.y_min + eps || c.xi + c.b >= box.y_max - eps;
        const bool x_edge = c.x - c.a <= box.x_min + eps || c.x + c.a >= box.x_max - eps;
        return xi_edge || (!circle && x_edge);
    };
    auto fail_box = [] {
        throw BoxTooSmall("preimage volume: set reaches the phase box boundary (box too small)");
    };

    std::vector<Cell> pending;
    pending.reserve(kCoarse * kCoarse);
    const double a0 = box.width() / (2.0 * kCoarse);
    const double b0 = box.height() / (2.0 * kCoarse);
    for (int i = 0; i < kCoarse; ++i) {
        for (int j = 0; j < kCoarse; ++j) {
            pending.push_back({box.x_min + (2 * i + 1) * a0, box.y_min + (2 * j + 1) * b0, a0, b0});
        }
    }

    double inside_area = 0.0;
    for (int level = 0;; ++level) {
        std::vector<Cell> ambiguous;
        for (const Cell& c : pending) {
            switch (classify(cell_image(model, c.x, c.xi, c.a, c.b), target)) {
                case CellClass::inside:
                    if (touches_edge(c)) fail_box();
                    inside_area += 4.0 * c.a * c.b;
                    break;
                case CellClass::outside:
                    break;
                case CellClass::ambiguous:
                    ambiguous.push_back(c);
                    break;
            }
        }
        if (ambiguous.empty()) return inside_area;
        const double cell_area = 4.0 * ambiguous.front().a * ambiguous.front().b;
        double midpoint_area = 0.0;
        for (const Cell& c : ambiguous) {
            if (point_in(model.p0(c.x, c.xi), target)) {
                if (touches_edge(c)) fail_box();
                midpoint_area += cell_area;
            }
        }
        const double ambiguous_area = cell_area * static_cast<double>(ambiguous.size());
        const double estimate = inside_area + midpoint_area;
        const bool resolved = ambiguous_area <= rel_tol * estimate ||
                              ambiguous_area <= 1e-14 * box_area;
        if (resolved || level + 1 >= kMaxLevels || 4 * ambiguous.size() > kMaxCells) {
            return estimate;
        }
        pending.clear();
        for (const Cell& c : ambiguous) {
            const double a = 0.5 * c.a;
            const double b = 0.5 * c.b;
            pending.push_back({c.x - a, c.xi - b, a, b});
            pending.push_back({c.x + a, c.xi - b, a, b});
            pending.push_back({c.x - a, c.xi + b, a, b});
            pending.push_back({c.x + a, c.xi + b, a, b});
        }
    }
}

// Flags every node within one pitch of w.
void mark_near(const ComplexGrid& grid, Complex w, std::vector<std::uint8_t>& mask) {
    const double pitch = grid.pitch();
    const int ix0 = std::max(0, int(std::floor((w.real() - pitch - grid.re_min) / grid.re_step())));
    const int ix1 = std::min(grid.nx - 1, int(std::ceil((w.real() + pitch - grid.re_min) / grid.re_step())));
    const int iy0 = std::max(0, int(std::floor((w.imag() - pitch - grid.im_min) / grid.im_step())));
    const int iy1 = std::min(grid.ny - 1, int(std::ceil((w.imag() + pitch - grid.im_min) / grid.im_step())));
    for (int iy = iy0; iy <= iy1; ++iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
            if (std::abs(grid.node(ix, iy) - w) <= pitch) mask[grid.index(ix, iy)] = 1;
        }
    }
}

// Samples p0 over midpoints of a resolution² lattice of the phase box, row
// by row in parallel, and ORs per-row masks in row order.
template <class Visit>
void sample_image(const ComplexGrid& grid, const Rect& box,
                  int resolution, int workers, int n_masks, Visit&& visit,
                  std::vector<std::vector<std::uint8_t>>& out) {
    grid.validate();
    if (resolution < 1) throw InvalidArgument("phase-space resolution must be >= 1");
    const double dx = box.width() / resolution;
    const double dxi = box.height() / resolution;
    const std::size_t n_workers = std::max(1, workers);
    std::vector<std::vector<std::vector<std::uint8_t>>> partial(
        n_workers, std::vector<std::vector<std::uint8_t>>(n_masks));
    for (auto& w : partial) {
        for (auto& m : w) m.assign(grid.size(), 0);
    }
    parallel_for(n_workers, int(n_workers), [&](std::size_t worker) {
        for (int i = int(worker); i < resolution; i += int(n_workers)) {
            const double x = box.x_min + (i + 0.5) * dx;
            for (int j = 0; j < resolution; ++j) {
                const double xi = box.y_min + (j + 0.5) * dxi;
                visit(x, xi, partial[worker]);
            }
        }
    });
    out.assign(n_masks, std::vector<std::uint8_t>(grid.size(), 0));
    for (const auto& w : partial) {
        for (int k = 0; k < n_masks; ++k) {
            for (std::size_t idx = 0; idx < grid.size(); ++idx) out[k][idx] |= w[k][idx];
        }
    }
}

}  // namespace

double half_imag_bracket(const SymbolModel& model, PhaseSpacePoint rho) {
    return bracket2(jet(model, rho.x, rho.xi), 1, 2);
}

double iterated_bracket(const SymbolModel& model, std::span<const int> word, PhaseSpacePoint rho) {
    if (word.size() < 2) throw InvalidArgument("iterated_bracket: word length must be >= 2");
    for (int w : word) {
        if (w != 1 && w != 2) throw InvalidArgument("iterated_bracket: word letters must be 1 or 2");
    }
    if (word.size() > std::size_t(kMaxBracketLength)) {
        throw UnsupportedDepth("iterated_bracket: words longer than " +
                               std::to_string(kMaxBracketLength) + " are unsupported");
    }
    if (word.size() == 2) return bracket2(jet(model, rho.x, rho.xi), word[0], word[1]);
    if (word.size() == 3) return bracket3(jet(model, rho.x, rho.xi), word[0], word[1], word[2]);

    // Length 4: {f_a, C} with C the exact length-3 bracket, differentiated
    // by central differences.
    constexpr double step = 1e-4;
    auto inner = [&](double x, double xi) {
        return bracket3(jet(model, x, xi), word[1], word[2], word[3]);
    };
    const double cx = (inner(rho.x + step, rho.xi) - inner(rho.x - step, rho.xi)) / (2.0 * step);
    const double cxi = (inner(rho.x, rho.xi + step) - inner(rho.x, rho.xi - step)) / (2.0 * step);
    const Jet2 j = jet(model, rho.x, rho.xi);
    return part(j.xi, word[0]) * cx - part(j.x, word[0]) * cxi;
}

BracketReport bracket_report(const SymbolModel& model, PhaseSpacePoint rho, int cap) {
    BracketReport r;
    r.point = rho;
    r.half_imag_bracket = half_imag_bracket(model, rho);
    r.order = point_order(model, rho, cap);
    if (r.half_imag_bracket < -kBracketVanishing) {
        r.classification = BracketClass::lambda_plus;
    } else if (r.half_imag_bracket > kBracketVanishing) {
        r.classification = BracketClass::lambda_minus;
    }
    return r;
}

std::optional<int> order_at(const SymbolModel& model, Complex z,
                            std::span<const PhaseSpacePoint> level_set_sample, int cap) {
    if (level_set_sample.empty()) throw InvalidArgument("order_at: empty level-set sample");
    if (cap < 1) throw InvalidArgument("order_at: cap must be >= 1");
    int order = 0;
    for (const PhaseSpacePoint& rho : level_set_sample) {
        if (std::abs(model.p0(rho.x, rho.xi) - z) > kLevelSetTolerance) {
            throw InvalidArgument("order_at: sample point is not on the level set p0 = z");
        }
        const auto k = point_order(model, rho, cap);
        if (!k) return std::nullopt;
        order = std::max(order, *k);
    }
    return order;
}

std::vector<PhaseSpacePoint> level_set(const SymbolModel& model, Complex z, const Rect& box,
                                       int resolution) {
    if (resolution < 3) throw InvalidArgument("level_set: resolution must be >= 3");
    const bool circle = model.domain == PhaseDomain::circle;
    const double dx = box.width() / (resolution - 1);
    const double dxi = box.height() / (resolution - 1);
    std::vector<double> dist(std::size_t(resolution) * resolution);
    auto at = [&](int i, int j) -> double& { return dist[std::size_t(i) * resolution + j]; };
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            at(i, j) = std::abs(model.p0(box.x_min + i * dx, box.y_min + j * dxi) - z);
        }
    }

    std::vector<PhaseSpacePoint> found;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const double d = at(i, j);
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    int ii = i + di;
                    const int jj = j + dj;
                    if (circle) ii = (ii + resolution - 1) % (resolution - 1);
                    if (ii < 0 || ii >= resolution || jj < 0 || jj >= resolution) continue;
                    if (at(ii, jj) < d) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (!is_min) continue;
            const double x = box.x_min + i * dx;
            const double xi = box.y_min + j * dxi;
            const double slope = std::abs(model.dx(x, xi)) * dx + std::abs(model.dxi(x, xi)) * dxi;
            if (d > 2.0 * slope + 1e-12) continue;
            double residual = 0.0;
            const PhaseSpacePoint p = newton_refine(model, z, {x, xi}, circle, &residual);
            if (residual > kLevelSetTolerance || !box.contains(p.x, p.xi)) continue;
            found.push_back(p);
        }
    }

    std::sort(found.begin(), found.end(), [](const PhaseSpacePoint& l, const PhaseSpacePoint& r) {
        return l.x != r.x ? l.x < r.x : l.xi < r.xi;
    });
    std::vector<PhaseSpacePoint> unique;
    for (const PhaseSpacePoint& p : found) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const PhaseSpacePoint& q) {
            double ddx = std::abs(p.x - q.x);
            if (circle) ddx = std::min(ddx, kTwoPi - ddx);
            return ddx < 1e-6 && std::abs(p.xi - q.xi) < 1e-6;
        });
        if (!dup) unique.push_back(p);
    }
    return unique;
}

std::vector<std::uint8_t> classical_spectrum_mask(const SymbolModel& model, const ComplexGrid& grid,
                                                  const Rect& phase_box, int resolution,
                                                  int workers) {
    std::vector<std::vector<std::uint8_t>> out;
    sample_image(grid, phase_box, resolution, workers, 1,
                 [&](double x, double xi, std::vector<std::vector<std::uint8_t>>& masks) {
                     mark_near(grid, model.p0(x, xi), masks[0]);
                 },
                 out);
    return std::move(out[0]);
}

LambdaMask lambda_pm_mask(const SymbolModel& model, const ComplexGrid& grid,
                          const Rect& phase_box, int resolution, int workers) {
    std::vector<std::vector<std::uint8_t>> out;
    sample_image(grid, phase_box, resolution, workers, 2,
                 [&](double x, double xi, std::vector<std::vector<std::uint8_t>>& masks) {
                     const double b = half_imag_bracket(model, {x, xi});
                     if (b < -kBracketVanishing) mark_near(grid, model.p0(x, xi), masks[0]);
                     if (b > kBracketVanishing) mark_near(grid, model.p0(x, xi), masks[1]);
                 },
                 out);
    return {std::move(out[0]), std::move(out[1])};
}

double sublevel_volume(const SymbolModel& model, Complex z, double t, const Rect& box,
                       int resolution) {
    if (!(t >= 0.0)) throw InvalidArgument("sublevel_volume: t must be >= 0");
    if (resolution < 2) throw InvalidArgument("sublevel_volume: resolution must be >= 2");
    const bool circle = model.domain == PhaseDomain::circle;
    const double dx = box.width() / resolution;
    const double dxi = box.height() / resolution;
    std::size_t count = 0;
    for (int i = 0; i < resolution; ++i) {
        const double x = box.x_min + (i + 0.5) * dx;
        for (int j = 0; j < resolution; ++j) {
            const double xi = box.y_min + (j + 0.5) * dxi;
            if (std::norm(model.p0(x, xi) - z) > t) continue;
            const bool edge = j == 0 || j == resolution - 1 || (!circle && (i == 0 || i == resolution - 1));
            if (edge) throw BoxTooSmall("sublevel_volume: set reaches the phase box boundary (box too small)");
            ++count;
        }
    }
    return static_cast<double>(count) * dx * dxi;
}

double preimage_volume(const SymbolModel& model, const ImageDisc& target, const Rect& box,
                       double rel_tol) {
    if (target.radius < 0.0) throw InvalidArgument("preimage_volume: negative radius");
    return adaptive_volume(model, target, box, rel_tol);
}

double preimage_volume(const SymbolModel& model, const Rect& target, const Rect& box,
                       double rel_tol) {
    return adaptive_volume(model, target, box, rel_tol);
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw InvalidArgument("fit_slope: need >= 2 matched points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_slope: abscissae are all equal");
    return sxy / sxx;
}

double kappa_fit(const SymbolModel& model, Complex z, std::span<const double> t_list) {
    if (t_list.size() < 4) throw InvalidArgument("kappa_fit: need at least 4 values of t");
    const double t_max = *std::max_element(t_list.begin(), t_list.end());
    const double r = std::sqrt(t_max);
    const Rect box = auto_phase_box(model, Rect{z.real() - r, z.real() + r, z.imag() - r, z.imag() + r});
    std::vector<double> log_t;
    std::vector<double> log_v;
    for (double t : t_list) {
        if (!(t > 0.0)) throw InvalidArgument("kappa_fit: t values must be positive");
        const double v = preimage_volume(model, ImageDisc{z, std::sqrt(t)}, box, 1e-3);
        if (v <= 0.0) continue;
        log_t.push_back(std::log(t));
        log_v.push_back(std::log(v));
    }
    if (log_t.size() < 3) throw NumericalError("kappa_fit: fewer than 3 nonzero volumes");
    return fit_slope(log_t, log_v);
}

double weyl_prediction(const SymbolModel& model, const Rect& gamma, double h) {
    if (!(h > 0.0)) throw InvalidArgument("weyl_prediction: h must be positive");
    const Rect box = auto_phase_box(model, gamma);
    return preimage_volume(model, gamma, box) / (2.0 * std::numbers::pi * h);
}

}  // namespace pslab
