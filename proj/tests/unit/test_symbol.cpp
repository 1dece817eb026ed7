#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "pslab/symbol_calculus.hpp"

using namespace pslab;

namespace {

oracle::RealFn re_part(const SymbolModel& m) {
    return [f = m.p0](double x, double xi) { return f(x, xi).real(); };
}
oracle::RealFn im_part(const SymbolModel& m) {
    return [f = m.p0](double x, double xi) { return f(x, xi).imag(); };
}

std::vector<PhaseSpacePoint> sample_points(int n, double span, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-span, span);
    std::vector<PhaseSpacePoint> out;
    for (int k = 0; k < n; ++k) out.push_back({u(gen), u(gen)});
    return out;
}

}  // namespace

TEST_CASE("half imaginary bracket") {
    const SymbolModel davies = davies_symbol();
    for (const auto& r : sample_points(200, 2.0, 1)) {
        CHECK(half_imag_bracket(davies, r) == doctest::Approx(4.0 * r.xi * r.x).epsilon(1e-12).scale(1.0));
    }
    const SymbolModel hager = hager_symbol();
    for (double xi : {-3.0, 0.0, 0.7}) CHECK(half_imag_bracket(hager, {0.0, xi}) == doctest::Approx(-1.0));
    for (const auto& r : sample_points(200, 3.0, 2)) {
        CHECK(half_imag_bracket(hager, r) == doctest::Approx(-std::cos(r.x)));
    }
}

TEST_CASE("half imaginary bracket matches finite differences") {
    for (const SymbolModel& m : {davies_symbol(), hager_symbol(), harmonic_oscillator_symbol()}) {
        const auto fd = oracle::bracket(re_part(m), im_part(m), 1e-5);
        for (const auto& r : sample_points(300, 2.0, 3)) {
            CHECK(std::abs(half_imag_bracket(m, r) - fd(r.x, r.xi)) < 1e-6);
        }
    }
}

TEST_CASE("real symbols have vanishing bracket") {
    const SymbolModel ho = harmonic_oscillator_symbol();
    for (const auto& r : sample_points(1000, 5.0, 4)) CHECK(half_imag_bracket(ho, r) == 0.0);
    const std::vector<std::vector<int>> words = {{1, 2}, {2, 1}, {1, 1, 2}, {2, 1, 2}, {1, 2, 1, 2}, {2, 2, 1, 2}};
    for (const auto& w : words) {
        for (const auto& r : sample_points(50, 3.0, 5)) CHECK(std::abs(iterated_bracket(ho, w, r)) < 1e-9);
    }
}

TEST_CASE("bracket antisymmetry") {
    for (const SymbolModel& m : {davies_symbol(), hager_symbol()}) {
        const std::vector<int> w12{1, 2};
        const std::vector<int> w21{2, 1};
        for (const auto& r : sample_points(200, 2.0, 6)) {
            CHECK(std::abs(iterated_bracket(m, w12, r) + iterated_bracket(m, w21, r)) < 1e-12);
            CHECK(std::abs(iterated_bracket(m, w12, r) - half_imag_bracket(m, r)) < 1e-12);
        }
    }
}

TEST_CASE("davies iterated brackets") {
    const SymbolModel davies = davies_symbol();
    const std::vector<int> w112{1, 1, 2};
    const std::vector<int> w212{2, 1, 2};
    for (const auto& r : sample_points(100, 2.0, 7)) {
        // {ξ², 4ξx} = 8ξ², {x², 4ξx} = −8x²
        CHECK(iterated_bracket(davies, w112, r) == doctest::Approx(8.0 * r.xi * r.xi).scale(1.0));
        CHECK(iterated_bracket(davies, w212, r) == doctest::Approx(-8.0 * r.x * r.x).scale(1.0));
    }
}

TEST_CASE("iterated brackets match nested finite differences") {
    for (const SymbolModel& m : {davies_symbol(), hager_symbol()}) {
        const auto p1 = re_part(m);
        const auto p2 = im_part(m);
        const auto b12 = oracle::bracket(p1, p2, 1e-3);
        const auto b112 = oracle::bracket(p1, b12, 1e-3);
        const auto b212 = oracle::bracket(p2, b12, 1e-3);
        const auto b1212 = oracle::bracket(p1, b212, 1e-2);
        const std::vector<int> w112{1, 1, 2};
        const std::vector<int> w212{2, 1, 2};
        const std::vector<int> w1212{1, 2, 1, 2};
        for (const auto& r : sample_points(40, 1.5, 8)) {
            CHECK(std::abs(iterated_bracket(m, w112, r) - b112(r.x, r.xi)) < 1e-5);
            CHECK(std::abs(iterated_bracket(m, w212, r) - b212(r.x, r.xi)) < 1e-5);
            CHECK(std::abs(iterated_bracket(m, w1212, r) - b1212(r.x, r.xi)) < 2e-3);
        }
    }
}

TEST_CASE("bracket words are validated") {
    const SymbolModel davies = davies_symbol();
    const std::vector<int> too_long{1, 2, 1, 2, 1};
    CHECK_THROWS_AS(iterated_bracket(davies, too_long, {0.1, 0.2}), UnsupportedDepth);
    const std::vector<int> short_word{1};
    CHECK_THROWS_AS(iterated_bracket(davies, short_word, {0.1, 0.2}), InvalidArgument);
    const std::vector<int> bad{1, 3};
    CHECK_THROWS_AS(iterated_bracket(davies, bad, {0.1, 0.2}), InvalidArgument);
}

TEST_CASE("level sets") {
    const SymbolModel davies = davies_symbol();
    const Complex z(1.0, 1.0);
    const auto pts = level_set(davies, z, Rect{-2, 2, -2, 2});
    CHECK(pts.size() == 4);
    for (const auto& p : pts) {
        CHECK(std::abs(davies.p0(p.x, p.xi) - z) <= kLevelSetTolerance);
        CHECK(std::abs(std::abs(p.x) - 1.0) < 1e-8);
        CHECK(std::abs(std::abs(p.xi) - 1.0) < 1e-8);
    }
    const auto boundary = level_set(davies, 1.0, Rect{-2, 2, -2, 2});
    REQUIRE_FALSE(boundary.empty());
    for (const auto& p : boundary) CHECK(std::abs(davies.p0(p.x, p.xi) - 1.0) <= kLevelSetTolerance);
}

TEST_CASE("order of points") {
    const SymbolModel davies = davies_symbol();
    const Rect box{-2, 2, -2, 2};
    const auto at_one = level_set(davies, 1.0, box);
    const auto k1 = order_at(davies, 1.0, at_one, 3);
    REQUIRE(k1);
    CHECK(*k1 == 2);

    const auto interior = level_set(davies, Complex(1.0, 1.0), box);
    const auto k2 = order_at(davies, Complex(1.0, 1.0), interior, 3);
    REQUIRE(k2);
    CHECK(*k2 == 1);

    const SymbolModel hager = hager_symbol();
    const Complex zh(0.0, 0.2);
    const auto hp = level_set(hager, zh, auto_phase_box(hager, Rect{0, 0, 0.2, 0.2}));
    REQUIRE(hp.size() == 2);
    const auto k3 = order_at(hager, zh, hp, 3);
    REQUIRE(k3);
    CHECK(*k3 == 1);

    CHECK_THROWS_AS(order_at(davies, 1.0, std::vector<PhaseSpacePoint>{}, 3), InvalidArgument);
    // a real symbol never leaves order 0 vanishing: every bracket is zero
    const SymbolModel ho = harmonic_oscillator_symbol();
    const auto hop = level_set(ho, 1.0, box);
    CHECK_FALSE(order_at(ho, 1.0, hop, 3).has_value());
}

TEST_CASE("classical spectrum masks") {
    const ComplexGrid grid{-1.0, 2.0, -1.0, 2.0, 31, 31};
    const double pitch = grid.pitch();

    const SymbolModel davies = davies_symbol();
    const auto dm = classical_spectrum_mask(davies, grid, Rect{-2, 2, -2, 2}, 401);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Complex z = grid.node(ix, iy);
            if (z.real() >= 0 && z.imag() >= 0) CHECK(dm[grid.index(ix, iy)] == 1);
            if (z.real() < -1.01 * pitch || z.imag() < -1.01 * pitch) CHECK(dm[grid.index(ix, iy)] == 0);
        }
    }

    const ComplexGrid hgrid{-1.0, 1.0, -2.0, 2.0, 21, 41};
    const SymbolModel hager = hager_symbol();
    const auto hm = classical_spectrum_mask(hager, hgrid, Rect{0, 2 * std::numbers::pi, -3, 3}, 801);
    for (int iy = 0; iy < hgrid.ny; ++iy) {
        for (int ix = 0; ix < hgrid.nx; ++ix) {
            const double im = hgrid.im_at(iy);
            if (std::abs(im) <= 1.0) CHECK(hm[hgrid.index(ix, iy)] == 1);
            if (std::abs(im) > 1.0 + 1.01 * hgrid.pitch()) CHECK(hm[hgrid.index(ix, iy)] == 0);
        }
    }

    const SymbolModel ho = harmonic_oscillator_symbol();
    const auto om = classical_spectrum_mask(ho, grid, Rect{-2, 2, -2, 2}, 401);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Complex z = grid.node(ix, iy);
            if (std::abs(z.imag()) > 1.01 * pitch || z.real() < -1.01 * pitch) CHECK(om[grid.index(ix, iy)] == 0);
            if (z.imag() == 0.0 && z.real() >= 0.0) CHECK(om[grid.index(ix, iy)] == 1);
        }
    }
}

TEST_CASE("lambda masks") {
    const ComplexGrid grid{0.0, 2.0, 0.0, 2.0, 11, 11};
    const auto dm = lambda_pm_mask(davies_symbol(), grid, Rect{-2, 2, -2, 2}, 401);
    const auto at = grid.index(5, 5);  // z = 1 + i
    CHECK(dm.plus[at] == 1);
    CHECK(dm.minus[at] == 1);

    const auto hom = lambda_pm_mask(harmonic_oscillator_symbol(), grid, Rect{-2, 2, -2, 2}, 201);
    CHECK(std::count(hom.plus.begin(), hom.plus.end(), 1) == 0);
    CHECK(std::count(hom.minus.begin(), hom.minus.end(), 1) == 0);

    const ComplexGrid hgrid{-0.1, 0.1, 0.1, 0.3, 3, 3};
    const auto hm = lambda_pm_mask(hager_symbol(), hgrid, Rect{0, 2 * std::numbers::pi, -2, 2}, 801);
    CHECK(hm.plus[hgrid.index(1, 1)] == 1);
    CHECK(hm.minus[hgrid.index(1, 1)] == 1);
}

TEST_CASE("lambda masks are stable under refinement") {
    const ComplexGrid grid{0.0, 2.0, 0.0, 2.0, 21, 21};
    const Rect box{-2, 2, -2, 2};
    const auto a = lambda_pm_mask(davies_symbol(), grid, box, 501);
    const auto b = lambda_pm_mask(davies_symbol(), grid, box, 1001);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Complex z = grid.node(ix, iy);
            if (z.real() <= grid.pitch() || z.imag() <= grid.pitch()) continue;
            CHECK(a.plus[grid.index(ix, iy)] == b.plus[grid.index(ix, iy)]);
            CHECK(a.minus[grid.index(ix, iy)] == b.minus[grid.index(ix, iy)]);
        }
    }
}

TEST_CASE("sublevel volume") {
    const SymbolModel hager = hager_symbol();
    const Rect hbox{0, 2 * std::numbers::pi, -2, 2};
    CHECK(sublevel_volume(hager, 0.3, 0.0, hbox, 401) == 0.0);

    const double t = 0.05;
    const double ref = oracle::hager_sublevel_volume(0.3, t);
    CHECK(sublevel_volume(hager, 0.3, t, hbox, 2001) == doctest::Approx(ref).epsilon(0.02));

    double prev = 0.0;
    for (double tt : {1e-3, 3e-3, 1e-2, 3e-2, 0.1}) {
        const double v = sublevel_volume(hager, 0.3, tt, hbox, 801);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(sublevel_volume(davies_symbol(), Complex(1.0, 1.0), 0.1, Rect{-1.05, 1.05, -1.05, 1.05}, 201),
                    BoxTooSmall);
}

TEST_CASE("preimage volume matches the sublevel oracles") {
    const SymbolModel davies = davies_symbol();
    for (Complex z : {Complex(1.0, 1.0), Complex(1.0, 0.0), Complex(0.5, 2.0)}) {
        for (double t : {1e-4, 1e-2}) {
            const double r = std::sqrt(t);
            const Rect box = auto_phase_box(davies, Rect{z.real() - r, z.real() + r, z.imag() - r, z.imag() + r});
            const double v = preimage_volume(davies, ImageDisc{z, r}, box, 1e-4);
            CHECK(v == doctest::Approx(oracle::davies_sublevel_volume(z, t)).epsilon(2e-3));
        }
    }
    const SymbolModel hager = hager_symbol();
    const Rect hbox{0, 2 * std::numbers::pi, -3, 3};
    const double v = preimage_volume(hager, ImageDisc{Complex(0.3, 0.2), 0.1}, hbox, 1e-4);
    CHECK(v == doctest::Approx(oracle::hager_sublevel_volume(Complex(0.3, 0.2), 0.01)).epsilon(2e-3));
}

TEST_CASE("kappa exponents") {
    const std::vector<double> ts{1e-5, 1e-4, 1e-3, 1e-2};
    const SymbolModel davies = davies_symbol();
    CHECK(kappa_fit(davies, Complex(1.0, 1.0), ts) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(kappa_fit(davies, Complex(1.0, 0.0), ts) == doctest::Approx(0.75).epsilon(0.1 / 0.75));
    CHECK(kappa_fit(hager_symbol(), Complex(0.3, 0.2), ts) == doctest::Approx(1.0).epsilon(0.1));
    const std::vector<double> few{1e-4, 1e-3, 1e-2};
    CHECK_THROWS(kappa_fit(davies, Complex(1.0, 1.0), few));
}

TEST_CASE("weyl prediction") {
    const SymbolModel hager = hager_symbol();
    const double h = 4.0 / 601;
    const double w = weyl_prediction(hager, Rect{-0.5, 0.5, -0.5, 0.5}, h);
    CHECK(w == doctest::Approx(1.0 / (3.0 * h)).epsilon(1e-3));
    const double ref = oracle::hager_preimage_volume(-0.5, 0.5, -0.5, 0.5) / (2 * std::numbers::pi * h);
    CHECK(w == doctest::Approx(ref).epsilon(1e-3));

    CHECK(weyl_prediction(hager, Rect{-0.5, 0.5, 2.5, 3.5}, h) == 0.0);

    const double ho = weyl_prediction(harmonic_oscillator_symbol(), Rect{1.0, 2.0, -1e-3, 1e-3}, 0.01);
    CHECK(ho == doctest::Approx(50.0).epsilon(1e-3));
}

TEST_CASE("fit_slope") {
    const std::vector<double> xs{0, 1, 2, 3};
    const std::vector<double> ys{1, 3, 5, 7};
    CHECK(fit_slope(xs, ys) == doctest::Approx(2.0));
}
