#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "pslab/io.hpp"
#include "pslab/pseudospectrum.hpp"
#include "pslab/quasimode.hpp"

using namespace pslab;

namespace {

std::size_t count(const std::vector<std::uint8_t>& m) { return std::count(m.begin(), m.end(), 1); }

bool subset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("jordan pseudospectrum contains the half disc") {
    const ComplexGrid grid{-0.9, 0.9, -0.9, 0.9, 61, 61};
    const SigmaMinField field = scan(jordan_block(20), grid);
    CHECK(field.missing == 0);
    const auto mask = region(field, 1e-2);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            if (std::abs(grid.node(ix, iy)) <= 0.5) CHECK(mask[grid.index(ix, iy)] == 1);
        }
    }
}

TEST_CASE("scan agrees with the SVD oracle") {
    const ComplexGrid grid{-1.2, 1.2, -1.2, 1.2, 9, 9};
    std::mt19937_64 gen(31);
    const ComplexMatrix a = oracle::random_matrix(20, gen) / 5.0;
    const SigmaMinField field = scan(a, grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double ref = oracle::sigma_min_shifted(a, grid.node(ix, iy));
            CHECK(std::abs(field.at(ix, iy) - ref) <= 1e-8 * ref + 1e-14);
        }
    }
}

TEST_CASE("normal operators: field is the distance to the spectrum") {
    const ComplexGrid grid{0.0, 2.0, -1.0, 1.0, 21, 21};
    const SigmaMinField id = scan(ComplexMatrix::Identity(4, 4), grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            CHECK(std::abs(id.at(ix, iy) - std::abs(1.0 - grid.node(ix, iy))) < 1e-12);
        }
    }

    std::mt19937_64 gen(32);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexMatrix d = ComplexMatrix::Zero(12, 12);
        for (int k = 0; k < 12; ++k) d(k, k) = Complex(u(gen), u(gen));
        const SigmaMinField f = scan(d, grid);
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                double dist = 1e300;
                for (int k = 0; k < 12; ++k) dist = std::min(dist, std::abs(d(k, k) - grid.node(ix, iy)));
                CHECK(std::abs(f.at(ix, iy) - dist) <= 1e-10);
            }
        }
    }
}

TEST_CASE("davies pseudospectral effect at 1+i") {
    const DiscretizedOperator op = davies_ho(0.05, 400);
    const ComplexGrid grid{0.95, 1.05, 0.95, 1.05, 3, 3};
    const SigmaMinField field = scan(op, grid);
    const double ref = oracle::sigma_min_shifted(op.dense(), Complex(1.0, 1.0));
    CHECK(field.at(1, 1) == doctest::Approx(ref).epsilon(1e-6));
    CHECK(field.at(1, 1) < 1.1e-6);
    // exponential in 1/h: roughly two decades per step of 1/h by 5
    const double finer = sigma_min_shifted(davies_ho(0.04, 400).matrix, Complex(1.0, 1.0));
    CHECK(finer < 1e-7);
    // distance to the spectrum is of order h
    double dist = 1e300;
    for (Complex w : eigenvalues(op.dense())) dist = std::min(dist, std::abs(w - Complex(1.0, 1.0)));
    CHECK(dist > 0.01);
}

TEST_CASE("region edge cases and nesting") {
    const ComplexGrid grid{-1.0, 1.0, -1.0, 1.0, 41, 41};
    const SigmaMinField field = scan(jordan_block(20), grid);
    const double top = *std::max_element(field.values.begin(), field.values.end());
    CHECK(count(region(field, top * 1.01)) == grid.size());
    CHECK(count(region(field, 0.0)) == 0);

    const auto wide = region(field, 1e-2);
    const auto narrow = region(field, 1e-3);
    CHECK(subset(narrow, wide));
    CHECK(count(wide) > count(narrow));

    const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-5, 1e-8};
    for (std::size_t k = 1; k < eps.size(); ++k) {
        CHECK(subset(region(field, eps[k]), region(field, eps[k - 1])));
    }
}

TEST_CASE("scan is independent of the worker count") {
    const ComplexGrid grid{0.0, 3.0, 0.0, 3.0, 23, 17};
    const DiscretizedOperator op = davies_ho(0.1, 80);
    const SigmaMinField one = scan(op, grid, 1);
    const SigmaMinField three = scan(op, grid, 3);
    CHECK(field_csv(one) == field_csv(three));
    CHECK(one.values == three.values);
}

TEST_CASE("identity contours are circles") {
    const ComplexGrid grid{0.5, 1.5, -0.5, 0.5, 101, 101};
    const SigmaMinField field = scan(ComplexMatrix::Identity(3, 3), grid);
    const std::vector<double> levels{0.1, 0.3};
    const ContourSet set = contours(field, levels);
    REQUIRE(set.levels.size() == 2);
    for (const auto& lvl : set.levels) {
        REQUIRE(lvl.lines.size() == 1);
        CHECK(lvl.lines[0].closed);
        for (Complex p : lvl.lines[0].points) {
            CHECK(std::abs(std::abs(p - 1.0) - lvl.level) <= 0.5 * grid.pitch());
        }
    }
}

TEST_CASE("jordan contours are nested") {
    const ComplexGrid grid{-1.0, 1.0, -1.0, 1.0, 81, 81};
    const SigmaMinField field = scan(jordan_block(10), grid);
    const std::vector<double> levels{1e-4, 1e-2};
    const ContourSet set = contours(field, levels);
    REQUIRE(set.levels.size() == 2);
    REQUIRE_FALSE(set.levels[0].lines.empty());
    REQUIRE_FALSE(set.levels[1].lines.empty());
    double inner = 0.0;
    for (const auto& l : set.levels[0].lines)
        for (Complex p : l.points) inner = std::max(inner, std::abs(p));
    double outer = 1e300;
    for (const auto& l : set.levels[1].lines)
        for (Complex p : l.points) outer = std::min(outer, std::abs(p));
    CHECK(inner < outer);
}

TEST_CASE("contour edge cases") {
    SigmaMinField field;
    field.grid = ComplexGrid{0, 1, 0, 1, 2, 2};
    field.values = {1.0, 1.0, 1.0, 1.0};
    const std::vector<double> levels{0.5};
    CHECK(contours(field, levels).empty());

    const std::vector<double> unsorted{0.5, 0.1};
    CHECK_THROWS_AS(contours(field, unsorted), InvalidArgument);
    const std::vector<double> negative{-0.1};
    CHECK_THROWS_AS(contours(field, negative), InvalidArgument);
}

TEST_CASE("saddle cells follow the corner average") {
    SigmaMinField field;
    field.grid = ComplexGrid{0, 1, 0, 1, 2, 2};
    // diagonal corners high, average above the level: the low corners are cut off separately
    field.values = {0.0, 1.0, 1.0, 0.0};
    const std::vector<double> levels{0.4};
    const ContourSet set = contours(field, levels);
    REQUIRE(set.levels.size() == 1);
    CHECK(set.levels[0].lines.size() == 2);
    // average below the level: the high corners are separated instead; still two segments
    const std::vector<double> high{0.6};
    CHECK(contours(field, high).levels[0].lines.size() == 2);
}

TEST_CASE("perturbation inclusion") {
    const InclusionReport j = perturbation_inclusion_check(jordan_block(30).dense(), 1e-3, 20, 5);
    CHECK(j.violations == 0);
    CHECK(j.eigenvalues_checked == 600);
    CHECK(j.max_ratio < 1.0);

    const InclusionReport id = perturbation_inclusion_check(ComplexMatrix::Identity(10, 10), 0.1, 10, 6);
    CHECK(id.violations == 0);
    CHECK(id.max_ratio < 1.0);  // every eigenvalue within 0.1 of 1

    // unperturbed limit
    const InclusionReport tiny = perturbation_inclusion_check(jordan_block(5).dense(), 1e-12, 3, 7);
    CHECK(tiny.violations == 0);
}

TEST_CASE("property: inclusion on random instances") {
    std::mt19937_64 gen(33);
    std::size_t violations = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const ComplexMatrix a = oracle::random_matrix(15, gen);
        violations += perturbation_inclusion_check(a, 1e-2, 2, 100 + trial).violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("hermite dimension") {
    CHECK(hermite_dimension(0.5, 4.0) == 4);
    const Eigen::Index n = hermite_dimension(0.01, 16.0);
    CHECK((2 * n + 1) * 0.01 >= 16.0);
    CHECK((2 * (n - 1) + 1) * 0.01 < 16.0);
}

TEST_CASE("resolvent growth along the davies family") {
    const std::vector<double> hs{0.02, 0.01, 0.005, 0.0025};
    const ResolventGrowth boundary = boundary_exponent_fit(davies_family(16.0), 1.0, hs);
    CHECK(boundary.power_slope == doctest::Approx(2.0 / 3.0).epsilon(0.08 / (2.0 / 3.0)));
    CHECK(boundary.dropped_h.empty());

    const ResolventGrowth outside = boundary_exponent_fit(davies_family(16.0), -1.0, hs);
    CHECK(std::abs(outside.power_slope) < 0.05);
    for (double r : outside.norm) CHECK(r <= 1.0 + 1e-9);

    const std::vector<double> coarse{0.1, 0.075, 0.05, 0.04};
    const ResolventGrowth interior = boundary_exponent_fit(davies_family(16.0), Complex(1.0, 1.0), coarse);
    CHECK(interior.exponential_rate > 0.5);
    CHECK(interior.power_slope > 3.0 * boundary.power_slope);
    for (std::size_t k = 1; k < interior.norm.size(); ++k) CHECK(interior.norm[k] > 10.0 * interior.norm[k - 1]);
}

TEST_CASE("singular shifts are dropped") {
    const std::vector<double> hs{1.0, 0.5};
    // z = h on the selfadjoint oscillator hits the eigenvalue at h = 1 exactly
    const OperatorFamily ho = [](double h) { return selfadjoint_ho(h, 10); };
    const std::vector<double> with_extra{1.0, 0.5, 0.3};
    const ResolventGrowth g = boundary_exponent_fit(ho, 1.0, with_extra);
    REQUIRE(g.dropped_h.size() == 1);
    CHECK(g.dropped_h[0] == 1.0);
    CHECK(g.h.size() == 2);
}
