#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "diffsearch/drift.hpp"
#include "diffsearch/errors.hpp"
#include "generators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace diffsearch;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const double ln2 = std::log(2.0);

std::vector<TargetDistribution> balanced_entries() {
    return {catalog("degenerate", {{"A", 1.0}}), catalog("uniform", {{"A", 1.0}}),
            catalog("exponential", {{"lambda", 1.0}}), catalog("gaussian", {{"sigma", 1.0}}),
            catalog("pareto", {{"alpha", 4.0}, {"A0", 1.0}})};
}

// Minus uniform on [-1,0]; plus uniform scaled so the balance condition holds at p.
TargetDistribution balanced_asymmetric(double p) {
    return TargetDistribution(p, HalfSupportMeasure::uniform(Side::negative, 1.0),
                              HalfSupportMeasure::uniform(Side::positive, balance_rhs(p)));
}

// Continuous piecewise-linear function through random values on a grid of (lo, hi).
RealFunction random_piecewise_linear(gen::Source& src, double lo, double hi, int pieces, double amp) {
    std::vector<double> xs(pieces + 1);
    std::vector<double> ys(pieces + 1);
    for (int i = 0; i <= pieces; ++i) {
        xs[i] = lo + (hi - lo) * i / pieces;
        ys[i] = src.uniform(-amp, amp);
    }
    return [xs, ys](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        std::size_t j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
        const double s = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return ys[j] + s * (ys[j + 1] - ys[j]);
    };
}

} // namespace

TEST_CASE("optimal drift closed forms") {
    const Drift deg = optimal_drift(catalog("degenerate", {{"A", 1.0}}), 1.0);
    for (double x : {0.01, 0.3, 0.77, 0.999}) {
        CHECK(deg(x) == doctest::Approx(ln2 / 2).epsilon(1e-10));
        CHECK(deg(-x) == doctest::Approx(-ln2 / 2).epsilon(1e-10));
    }
    const Drift uni = optimal_drift(catalog("uniform", {{"A", 1.0}}), 1.0);
    for (double x : {0.01, 0.3, 0.77, 0.999}) {
        const double expected = -1.0 / (4.0 * (1.0 - x)) + (3.0 * ln2 / 4.0) * std::sqrt(1.0 - x);
        CHECK(uni(x) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(uni(-x) == doctest::Approx(-expected).epsilon(1e-10));
    }
    const Drift ex = optimal_drift(catalog("exponential", {{"lambda", 1.0}}), 1.0);
    CHECK(ex(0.0) == doctest::Approx(-0.25 + ln2 / 4).epsilon(1e-10));
    for (double x : {0.5, 2.0, 10.0})
        CHECK(ex(x) == doctest::Approx(-0.25 + 0.25 * ln2 * std::exp(-x / 2)).epsilon(1e-10));

    const Drift deg2 = optimal_drift(catalog("degenerate", {{"A", 2.0}}), 3.0);
    CHECK(deg2(0.5) == doctest::Approx(3.0 * ln2 / 4.0).epsilon(1e-10));
}

TEST_CASE("optimal drift potential matches its quadrature") {
    for (const auto& t : balanced_entries()) {
        const Drift b0 = optimal_drift(t, 1.0);
        const Drift numeric(b0.function(), b0.domain(), 1.0, b0.boundaries());
        for (double x : {-0.9, -0.4, 0.2, 0.6, 0.95}) {
            CHECK(b0.log_speed_density(x) == doctest::Approx(numeric.log_speed_density(x)).epsilon(1e-9));
        }
        CHECK(check_admissible(b0) == Admissibility::admissible);
    }
}

TEST_CASE("boundary flags of the optimal drift") {
    const Drift uni = optimal_drift(catalog("uniform", {{"A", 1.0}}), 1.0);
    CHECK(uni.boundaries().right == BoundaryKind::reflecting);
    CHECK(uni.boundaries().singular_right);
    const Drift deg = optimal_drift(catalog("degenerate", {{"A", 1.0}}), 1.0);
    CHECK(deg.boundaries().left == BoundaryKind::reflecting);
    CHECK_FALSE(deg.boundaries().singular_left);
    const Drift g = optimal_drift(catalog("gaussian", {{"sigma", 1.0}}), 1.0);
    CHECK(g.boundaries().left == BoundaryKind::open_infinite);
    CHECK_THROWS_AS(optimal_drift(TargetDistribution::symmetric(HalfSupportMeasure::discrete(Side::positive, {{1.0, 1.0}})), 1.0),
                    Error);
    const TargetDistribution heavy(0.5, HalfSupportMeasure::pareto(Side::negative, 1.0, 1.0),
                                   HalfSupportMeasure::pareto(Side::positive, 1.0, 1.0));
    CHECK_THROWS_AS(optimal_drift(heavy, 1.0), Error);
}

TEST_CASE("reachability") {
    CHECK(reachability(HalfSupportMeasure::gaussian(Side::positive, 1.0)) == Reachability::unreachable);
    CHECK(reachability(HalfSupportMeasure::uniform(Side::positive, 1.0)) == Reachability::reachable);
    CHECK(reachability(HalfSupportMeasure::degenerate(Side::positive, 1.0)) == Reachability::reachable);

    auto power_tail = [](double order) {
        CustomTail spec;
        spec.tail = [order](double r) { return std::pow(1.0 - r, order); };
        spec.density = [order](double r) { return order * std::pow(1.0 - r, order - 1.0); };
        spec.extent = 1.0;
        return HalfSupportMeasure::from_functions(Side::positive, spec);
    };
    CHECK(reachability(power_tail(0.5)) == Reachability::reachable);
    CHECK(reachability(power_tail(1.0)) == Reachability::reachable);
    CHECK(reachability(power_tail(2.0)) == Reachability::unreachable);
    CHECK(reachability(power_tail(3.0)) == Reachability::unreachable);
}

TEST_CASE("admissibility") {
    const Drift zero([](double) { return 0.0; }, Interval(-1, 1), 1.0);
    CHECK(check_admissible(zero) == Admissibility::admissible);
    const Drift free([](double) { return 0.0; }, Interval(-inf, inf), 1.0,
                     {BoundaryKind::open_infinite, BoundaryKind::open_infinite});
    CHECK(check_admissible(free) == Admissibility::not_positive_recurrent);
    const Drift pull([](double x) { return x > 0 ? -1.0 : 1.0; }, Interval(-inf, inf), 1.0,
                     {BoundaryKind::open_infinite, BoundaryKind::open_infinite});
    CHECK(check_admissible(pull) == Admissibility::admissible);
    const SpeedProfile sp(pull);
    CHECK(sp.total() == doctest::Approx(1.0).epsilon(1e-10));
    const Drift push([](double x) { return x > 0 ? 1.0 : -1.0; }, Interval(-inf, inf), 1.0,
                     {BoundaryKind::open_infinite, BoundaryKind::open_infinite});
    CHECK(check_admissible(push) == Admissibility::not_positive_recurrent);
    const Drift broken([](double x) { return x > 0.5 ? std::nan("") : 0.0; }, Interval(-1, 1), 1.0, {},
                       [](double) { return 0.0; });
    CHECK(check_admissible(broken) == Admissibility::ill_formed);
    CHECK_THROWS_AS(cdf_from_drift(free), Error);
}

TEST_CASE("cdf from drift") {
    const ScaledCdf F0 = cdf_from_drift(Drift([](double) { return 0.0; }, Interval(-1, 1), 1.0));
    for (double x : {-0.9, -0.2, 0.0, 0.5, 0.99}) {
        CHECK(F0.F(x) == doctest::Approx((x + 1) / 2).epsilon(1e-12));
        CHECK(F0.f(x) == doctest::Approx(0.5).epsilon(1e-12));
    }
    for (double c : {-2.0, 0.7, 3.0}) {
        const ScaledCdf F = cdf_from_drift(Drift([c](double) { return c; }, Interval(-1, 1), 2.0));
        for (double x : {-0.9, -0.2, 0.0, 0.5, 0.99}) {
            const double expected = (std::exp(c * x) - std::exp(-c)) / (std::exp(c) - std::exp(-c));
            CHECK(F.F(x) == doctest::Approx(expected).epsilon(1e-11));
        }
    }
}

TEST_CASE("scaled cdf integrates its density") {
    gen::Source src(41);
    const ScaledCdf F = cdf_from_drift(Drift(random_piecewise_linear(src, -1, 1, 5, 3.0), Interval(-1, 1), 1.0));
    for (int i = 0; i < 10; ++i) {
        const double a = src.uniform(-1, 1);
        CHECK(std::fabs(F.F(a) - integrate(F.f, Interval(-1, a)).value) < 1e-8);
    }
}

TEST_CASE("drift from cdf") {
    ScaledCdf lin{[](double x) { return (x + 1) / 2; }, [](double) { return 0.5; }, Interval(-1, 1), 1.0, 0.0, {}};
    const Drift b = drift_from_cdf(lin, 1.0);
    for (double x : {-0.5, 0.0, 0.8}) CHECK(std::fabs(b(x)) < 1e-12);

    ScaledCdf zero{[](double x) { return x; }, [](double x) { return x > 0.5 ? 0.0 : 1.0; }, Interval(-1, 1), 1.0, 0.0, {}};
    CHECK_THROWS_AS(drift_from_cdf(zero, 1.0)(0.7), Error);
}

TEST_CASE("round trip on random drifts") {
    gen::Source src(7);
    for (int trial = 0; trial < 10; ++trial) {
        const double lo = -src.uniform(0.5, 3.0);
        const double hi = src.uniform(0.5, 3.0);
        const double D = src.uniform(0.5, 2.0);
        const Drift b(random_piecewise_linear(src, lo, hi, src.integer(2, 8), 3.0), Interval(lo, hi), D);
        const Drift back = drift_from_cdf(cdf_from_drift(b), D);
        for (int i = 0; i < 100; ++i) {
            const double x = src.uniform(lo + 1e-3, hi - 1e-3);
            CHECK(std::fabs(back(x) - b(x)) < 1e-5);
        }
    }
}

TEST_CASE("round trip on piecewise-constant drifts away from the jumps") {
    gen::Source src(9);
    for (int trial = 0; trial < 5; ++trial) {
        const auto jumps = src.cuts(3, -0.9, 0.9);
        std::vector<double> levels(4);
        for (double& v : levels) v = src.uniform(-2, 2);
        auto b = [jumps, levels](double x) {
            const std::size_t k = static_cast<std::size_t>(std::upper_bound(jumps.begin(), jumps.end(), x) - jumps.begin());
            return levels[k];
        };
        const Drift d(b, Interval(-1, 1), 1.0);
        const Drift back = drift_from_cdf(cdf_from_drift(d), 1.0);
        for (int i = 0; i < 100; ++i) {
            const double x = src.uniform(-0.999, 0.999);
            bool near_jump = false;
            for (double j : jumps) near_jump = near_jump || std::fabs(x - j) < 1e-3;
            if (near_jump) continue;
            CHECK(std::fabs(back(x) - d(x)) < 1e-5);
        }
    }
}

TEST_CASE("critical cdf") {
    const ScaledCdf deg = critical_cdf(catalog("degenerate", {{"A", 1.0}}));
    CHECK(deg.F(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(deg.F(1.0) == 1.0);
    CHECK(deg.F(-1.0) == 0.0);
    for (double a : {0.1, 0.5, 0.9}) {
        CHECK(deg.F(a) == doctest::Approx(std::pow(2.0, a - 1.0)).epsilon(1e-13));
        CHECK(deg.F(-a) == doctest::Approx(1.0 - std::pow(2.0, a - 1.0)).epsilon(1e-13));
    }

    for (const auto& t : balanced_entries()) {
        const ScaledCdf F = critical_cdf(t);
        CHECK(std::fabs(F.density_jump_at_origin) < 1e-9);
        CHECK(F.F(0.0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(F.F(-1e-12) == doctest::Approx(0.5).epsilon(1e-9));
    }

    const TargetDistribution unbalanced(1.0 / 3.0, HalfSupportMeasure::uniform(Side::negative, 2.0),
                                        HalfSupportMeasure::uniform(Side::positive, 1.0));
    const ScaledCdf U = critical_cdf(unbalanced);
    CHECK(U.F(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(U.F(-1e-15) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // f(0+) = k1 (1-p), f(0-) = k2 p
    const CriticalConstants c = critical_constants(unbalanced);
    CHECK(U.density_jump_at_origin == doctest::Approx(c.k1 * 2.0 / 3.0 - c.k2 / 3.0));
    CHECK(std::fabs(U.density_jump_at_origin) > 0.1);
}

TEST_CASE("critical constants under balance") {
    for (double p : {0.2, 0.35, 0.5, 0.8}) {
        const TargetDistribution t = balanced_asymmetric(p);
        CHECK(is_balanced(t));
        const CriticalConstants c = critical_constants(t);
        CHECK(c.k1 / (c.k1 + c.k2) == doctest::Approx(p).epsilon(1e-9));
        CHECK(std::fabs(critical_cdf(t).density_jump_at_origin) < 1e-9);
    }
}

TEST_CASE("cdf of the optimal drift is the critical cdf") {
    std::vector<TargetDistribution> entries = balanced_entries();
    entries.push_back(balanced_asymmetric(0.3));
    for (const auto& t : entries) {
        const Drift b0 = optimal_drift(t, 1.0);
        const ScaledCdf F = cdf_from_drift(b0);
        const ScaledCdf F0 = critical_cdf(t);
        const double lo = -effective_extent(t.minus(), 1e-9);
        const double hi = effective_extent(t.plus(), 1e-9);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = lo + (hi - lo) * (i + 0.5) / 1000.0;
            worst = std::max(worst, std::fabs(F.F(x) - F0.F(x)));
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("drift of the critical cdf is the optimal drift") {
    const TargetDistribution t = catalog("exponential", {{"lambda", 1.0}});
    const Drift b = drift_from_cdf(critical_cdf(t), 1.0);
    for (double x : {0.1, 0.5, 2.0, 6.0}) {
        const double expected = -0.25 + 0.25 * ln2 * std::exp(-x / 2);
        CHECK(std::fabs(b(x) - expected) < 1e-5);
        CHECK(std::fabs(b(-x) + expected) < 1e-5);
    }
}

TEST_CASE("drift table") {
    const TargetDistribution t = catalog("degenerate", {{"A", 1.0}});
    const auto rows = drift_table(optimal_drift(t, 1.0), critical_cdf(t), Interval(0, 1), 4);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].x == 0.125);
    CHECK(rows[3].b == doctest::Approx(ln2 / 2));
    std::ostringstream os;
    write_drift_table_csv(os, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,b,F,f");
    std::getline(is, line);
    CHECK(line.rfind("0.125,0.346573590279972", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
}
