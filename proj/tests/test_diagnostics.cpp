#include <doctest.h>

#include <cmath>

#include "core/diagnostics.hpp"
#include "core/oracles.hpp"

using namespace tlab;

namespace {

Grid unit_square(int n) { return Grid(2, Point{-1, -1, 0}, Point{1, 1, 0}, n); }

constexpr double kHalfPi = 1.5707963267948966;

}  // namespace

TEST_CASE("volume density") {
    const Grid g = unit_square(257);  // h = 1/128
    const Point origin{0, 0, 0};

    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    CHECK(volume_density(uh, origin, 0.25).value == doctest::Approx(0.0));

    const GridFunction plane = sample(g, [](const Point& x) { return x[0]; });
    const FlaggedValue v = volume_density(plane, origin, 0.25);
    CHECK(std::abs(v.value - kHalfPi) <= 0.05);
    CHECK_FALSE(v.flag);

    // in-plane bound: V_r never exceeds the unit-ball volume (pi in 2-D)
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction noise =
            sample(g, [&rng](const Point&) { return rng.uniform(-1, 1); });
        const double value = volume_density(noise, origin, 0.3).value;
        CHECK(value >= 0.0);
        CHECK(value <= 3.15);
    }

    CHECK(volume_density(plane, origin, 0.01).flag);  // r < 2h
}

TEST_CASE("min diameter") {
    std::vector<Point> collinear = {{0, 0, 0}, {0.5, 0.5, 0}, {1, 1, 0}};
    CHECK(min_diameter(collinear, 2) <= 1e-12);

    std::vector<Point> square = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    CHECK(min_diameter(square, 2) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<Point> circle;
    for (int k = 0; k < 256; ++k) {
        const double t = 2.0 * kHalfPi * 2.0 * k / 256.0;
        circle.push_back({std::cos(t), std::sin(t), 0});
    }
    CHECK(std::abs(min_diameter(circle, 2) - 2.0) <= 1e-3);

    CHECK_THROWS_AS(min_diameter({}, 2), invalid_input);
    CHECK(min_diameter({{0.3, 0.7, 0}}, 2) == 0.0);
}

TEST_CASE("min diameter is rotation and translation invariant in 2-D") {
    Rng rng(5);
    std::vector<Point> cloud;
    for (int k = 0; k < 40; ++k) cloud.push_back({rng.uniform(-1, 1), rng.uniform(-0.3, 0.3), 0});
    const double base = min_diameter(cloud, 2);
    for (int trial = 0; trial < 5; ++trial) {
        const double theta = rng.uniform(0, 6.28);
        const double tx = rng.uniform(-5, 5), ty = rng.uniform(-5, 5);
        std::vector<Point> moved;
        for (const Point& p : cloud)
            moved.push_back({std::cos(theta) * p[0] - std::sin(theta) * p[1] + tx,
                             std::sin(theta) * p[0] + std::cos(theta) * p[1] + ty, 0});
        CHECK(min_diameter(moved, 2) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("min diameter in 3-D by sampled directions") {
    // thin slab of thickness 0.1, rotated
    Rng rng(9);
    std::vector<Point> slab;
    for (int k = 0; k < 300; ++k) {
        const Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.05, 0.05)};
        slab.push_back({p[0], 0.8 * p[1] - 0.6 * p[2], 0.6 * p[1] + 0.8 * p[2]});
    }
    const double width = min_diameter(slab, 3);
    CHECK(width <= 0.11);
    CHECK(width >= 0.05);
}

TEST_CASE("thickness") {
    const Grid g = unit_square(129);
    const double h = g.spacing();
    const Point origin{0, 0, 0};

    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    const FlaggedValue t = thickness(uh, origin, 0.25);
    CHECK(std::abs(t.value - 1.0) <= 4.0 * h / 0.25);

    const Oracle p2 = custom_quadratic({0.5, 0.0});
    const GridFunction up2 = sample(g, [&](const Point& x) { return p2(x); });
    CHECK(thickness(up2, origin, 0.25).value <= 2.0 * h / 0.25);

    const GridFunction ones = sample(g, [](const Point&) { return 1.0; });
    const FlaggedValue empty = thickness(ones, origin, 0.25);
    CHECK(empty.value == 0.0);
    CHECK(empty.flag);

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const Point on_circle{0.5, 0, 0};
    CHECK(thickness(ur, on_circle, 0.125).value <= 2.0 * h / 0.125);
}

TEST_CASE("growth profile of the half-space solution") {
    const Grid g = unit_square(513);  // h = 1/256
    const Oracle half = half_space_solution(1.0);
    const GridFunction u = sample(g, [&](const Point& x) { return half(x); });
    const GrowthProfile gp = growth_profile(u, Point{0, 0, 0}, 2, 6);
    for (std::size_t i = 0; i < gp.sup.size(); ++i) {
        CHECK(gp.sup[i] ==
              doctest::Approx(0.5 * gp.radius[i] * gp.radius[i]).epsilon(1e-12));
        CHECK(gp.in_m[i]);
    }
    CHECK(std::abs(gp.exponent - 2.0) <= 0.02);
    // dyadic suprema are non-increasing
    for (std::size_t i = 0; i + 1 < gp.sup.size(); ++i) CHECK(gp.sup[i + 1] <= gp.sup[i]);
}

TEST_CASE("growth profile of the radial example at an interface point") {
    const Grid g = unit_square(513);
    const Oracle radial = radial_solution(2);
    const GridFunction u = sample(g, [&](const Point& x) { return radial(x); });
    const GrowthProfile gp = growth_profile(u, Point{0.5, 0, 0}, 3, 6);
    // closed form: sup over B_r of |v| is (r + r^2)/4
    for (std::size_t i = 0; i < gp.sup.size(); ++i) {
        const double r = gp.radius[i];
        CHECK(gp.sup[i] == doctest::Approx((r + r * r) / 4.0).epsilon(0.02));
    }
    CHECK(std::abs(gp.exponent - 1.0) <= 0.1);
}

TEST_CASE("growth profile flags a vanishing field") {
    const Grid g = unit_square(65);
    const GridFunction zero(g, 0.0);
    CHECK(growth_profile(zero, Point{0, 0, 0}, 2, 4).degenerate);
}

TEST_CASE("nondegeneracy profile") {
    const Grid g = unit_square(129);
    const double h = g.spacing();
    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    const NondegeneracyProfile np =
        nondegeneracy_profile(uh, Point{0, 0, 0}, {0.0625, 0.125, 0.25});
    for (std::size_t i = 0; i < np.radius.size(); ++i)
        CHECK(std::abs(np.value[i] - 0.5) <= 10.0 * h / np.radius[i]);
    CHECK(np.min_value > 0.0);

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const NondegeneracyProfile nr =
        nondegeneracy_profile(ur, Point{0.5, 0, 0}, {0.0625, 0.125, 0.25});
    // closed form: N(r) = (r + r^2) / (4 r^2), minimal at r = 1/4
    CHECK(std::abs(nr.min_value - 1.25) <= 0.1);

    const GridFunction neg = sample(g, [](const Point& x) { return -1.0 - x[0] * x[0]; });
    const NondegeneracyProfile nn = nondegeneracy_profile(neg, Point{0, 0, 0}, {0.25});
    CHECK(nn.min_value <= 0.0);  // reported as a non-degeneracy failure

    // a radius the grid cannot reach leaves the annulus empty
    CHECK_THROWS_AS(nondegeneracy_profile(uh, Point{0, 0, 0}, {100.0}), invalid_input);
}

TEST_CASE("blow-up rescaling") {
    const Grid g = unit_square(129);
    Rng rng(13);
    const SymMatrix m = random_with_spectrum(rng, 2, 0.5, 1.5);
    const GridFunction u = sample(g, [&](const Point& x) {
        double v = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) v += 0.5 * m.at(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        return v;
    });
    // 2-homogeneous input is invariant under the parabolic zoom
    const GridFunction zoom = blow_up(u, Point{0, 0, 0}, 0.25, 33);
    for (long i = 0; i < zoom.grid.node_count(); ++i) {
        const Point y = zoom.grid.coords(i);
        double expect = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) expect += 0.5 * m.at(a, b) * y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
        CHECK(zoom[i] == doctest::Approx(expect).epsilon(1e-6));
    }

    CHECK_THROWS_AS(blow_up(u, Point{0.9, 0, 0}, 0.25, 17), out_of_domain);
}

TEST_CASE("blow-up thickness identity for the half-space solution") {
    const Grid g = unit_square(129);
    const double h = g.spacing();
    const Oracle half = half_space_solution(1.0);
    const GridFunction u = sample(g, [&](const Point& x) { return half(x); });
    for (double r : {0.125, 0.25}) {
        const double direct = thickness(u, Point{0, 0, 0}, r).value;
        const int target_n = static_cast<int>(std::lround(2.0 * r / h)) + 1;
        const GridFunction zoom = blow_up(u, Point{0, 0, 0}, r, target_n);
        const double zoomed = thickness(zoom, Point{0, 0, 0}, 1.0).value;
        CHECK(std::abs(zoomed - direct) <= 4.0 * h / r);
    }
}

TEST_CASE("blow-up of the radial example at the interface has linear growth") {
    const Grid g = unit_square(513);  // h = 1/256
    const Oracle radial = radial_solution(2);
    const GridFunction u = sample(g, [&](const Point& x) { return radial(x); });
    const double r = 1.0 / 16.0;
    const GridFunction zoom = blow_up(u, Point{0.5, 0, 0}, r, 33);
    const GrowthProfile gp = growth_profile(zoom, Point{0, 0, 0}, 1, 3);
    CHECK(std::abs(gp.exponent - 1.0) <= 0.1);
}

TEST_CASE("viscosity pair check") {
    const Grid g = unit_square(129);
    const OperatorSpec lap = OperatorSpec::make_linear(SymMatrix::identity(2), {1.0, 1.0});

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const ViscosityPairCheck r = check_viscosity_pair(ur, lap, lap, update_partition(ur, 0.0));
    CHECK(r.violations == 0);
    CHECK(r.checked > 0);

    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    const ViscosityPairCheck hcheck =
        check_viscosity_pair(uh, lap, lap, update_partition(uh, 0.0));
    CHECK(hcheck.violations == 0);

    // constructed violation: Delta(5|x|^2/2) = 10 > 1 everywhere
    const GridFunction bad =
        sample(g, [](const Point& x) { return 2.5 * (x[0] * x[0] + x[1] * x[1]); });
    const ViscosityPairCheck bcheck =
        check_viscosity_pair(bad, lap, lap, update_partition(bad, 0.0));
    CHECK(bcheck.violations == bcheck.checked);
    CHECK(bcheck.checked > 0);
}

TEST_CASE("viscosity pair on a heterogeneous two-phase solve") {
    ProblemSpec p;
    p.grid = unit_square(33);
    p.f1 = OperatorSpec::make_pucci_plus({1.0, 2.0});
    p.f2 = OperatorSpec::make_pucci_minus({1.0, 2.0});
    p.rhs = 2.0;
    const Oracle v = radial_solution(2);
    p.dirichlet = [v](const Point& x) { return v(x); };
    p.delta = 0.0;
    SolverConfig cfg;
    cfg.outer_max_iters = 200;
    const SolveResult r = solve(p, cfg);
    REQUIRE(r.converged);
    const ViscosityPairCheck check =
        check_viscosity_pair(r.u, p.f1, p.f2, r.partition, p.rhs);
    CHECK(check.violations == 0);
    CHECK(check.checked > 0);
}

TEST_CASE("class membership flags") {
    const Grid g = unit_square(65);
    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const PartitionState part = update_partition(ur, 0.0);

    const ClassMembership cm = class_membership(ur, {1.0, 1.0}, 1.0, part);
    CHECK(cm.in_s_upper);
    CHECK(cm.in_s_lower);
    CHECK(cm.in_s);
    CHECK(cm.in_s_star);

    const GridFunction neg =
        sample(g, [](const Point& x) { return -2.5 * (x[0] * x[0] + x[1] * x[1]); });
    const ClassMembership cn =
        class_membership(neg, {1.0, 1.0}, 1.0, update_partition(neg, 0.0));
    CHECK_FALSE(cn.in_s_lower);
}

TEST_CASE("c11 seminorm") {
    const Grid g = unit_square(129);
    const StencilSet s = StencilSet::make(2, 8);

    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    CHECK(c11_seminorm(uh, s) == doctest::Approx(1.0).epsilon(1e-10));

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    CHECK(c11_seminorm(ur, s) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("convexity gap") {
    const Grid g = unit_square(129);
    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    CHECK(convexity_gap(uh) <= 10.0 * g.spacing());

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    CHECK(convexity_gap(ur) <= 1e-10);

    const Oracle bowl = custom_quadratic({-1.0, -1.0});
    const GridFunction ub = sample(g, [&](const Point& x) { return bowl(x); });
    CHECK(convexity_gap(ub) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("gradient support check") {
    const Grid g = unit_square(129);
    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    CHECK(gradient_support_check(uh, update_partition(uh, 0.0)) == 0);

    const GridFunction zero(g, 0.0);
    CHECK(gradient_support_check(zero, update_partition(zero, 0.0)) == 0);

    // the radial interface carries |grad v| = 1/4 != 0: zero-band nodes there
    // violate the vanishing-gradient hypothesis, and the count reports it
    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const double h = g.spacing();
    CHECK(gradient_support_check(ur, update_partition(ur, h * h)) > 0);
}

TEST_CASE("free boundary cell fraction") {
    const Grid g = unit_square(129);
    const double h = g.spacing();
    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    const double fraction = fb_cell_fraction(update_partition(uh, 0.0), g);
    const double expected = h * 2.0 / 4.0;  // one-cell collar around a length-2 interface
    CHECK(fraction >= expected / 2.0);
    CHECK(fraction <= expected * 2.0);

    const GridFunction ones = sample(g, [](const Point&) { return 1.0; });
    CHECK(fb_cell_fraction(update_partition(ones, 0.0), g) == 0.0);

    const GridFunction zero(g, 0.0);
    CHECK(fb_cell_fraction(update_partition(zero, 0.0), g) == 0.0);
}

TEST_CASE("diagnostics are local: fields agreeing on a ball agree in measurements") {
    const Grid g = unit_square(129);
    const Oracle half = half_space_solution(1.0);
    GridFunction a = sample(g, [&](const Point& x) { return half(x); });
    GridFunction b = a;
    // perturb far outside B_{0.3}(0)
    for (long i = 0; i < g.node_count(); ++i) {
        const Point x = g.coords(i);
        if (std::hypot(x[0], x[1]) > 0.6) b[i] += 10.0;
    }
    const Point origin{0, 0, 0};
    CHECK(volume_density(a, origin, 0.25).value == volume_density(b, origin, 0.25).value);
    CHECK(thickness(a, origin, 0.25).value == thickness(b, origin, 0.25).value);
    const GrowthProfile ga = growth_profile(a, origin, 2, 5);
    const GrowthProfile gb = growth_profile(b, origin, 2, 5);
    CHECK(ga.sup == gb.sup);
}
