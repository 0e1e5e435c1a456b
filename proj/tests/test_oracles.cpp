#include <doctest.h>

#include <cmath>

#include "core/oracles.hpp"
#include "core/solver.hpp"

using namespace tlab;

namespace {
Grid unit_square(int n) { return Grid(2, Point{-1, -1, 0}, Point{1, 1, 0}, n); }
}

TEST_CASE("radial solution values and metadata") {
    const Oracle v = radial_solution(2);
    CHECK(v(Point{0, 0, 0}) == doctest::Approx(-1.0 / 16.0).epsilon(1e-15));
    CHECK(v(Point{0.5, 0, 0}) == doctest::Approx(0.0));
    CHECK(v(Point{0.3, 0.4, 0}) == doctest::Approx(0.0));  // |x| = 1/2
    CHECK(v.fb_radius == 0.5);

    const Oracle v3 = radial_solution(3);
    // D^2 v = I/d, so any directional second derivative is 1/d
    const double h = 1e-3;
    const double dd =
        (v3(Point{h, 0, 0}) - 2.0 * v3(Point{0, 0, 0}) + v3(Point{-h, 0, 0})) / (h * h);
    CHECK(dd == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("radial solution solves the equation discretely") {
    const Grid g = unit_square(65);
    const Oracle v = radial_solution(2);
    const GridFunction u = sample(g, [&](const Point& x) { return v(x); });
    ProblemSpec p;
    p.grid = g;
    p.f1 = OperatorSpec::make_linear(SymMatrix::identity(2), {1.0, 1.0});
    p.f2 = p.f1;
    p.dirichlet = [&](const Point& x) { return v(x); };
    p.delta = 0.0;
    const GridFunction res = residual_field(u, p);
    CHECK(res.max_abs() <= 1e-12);
}

TEST_CASE("half-space solution values") {
    const Oracle u = half_space_solution(1.0);
    CHECK(u(Point{0.5, 7.0, 0}) == doctest::Approx(0.125));
    CHECK(u(Point{-0.3, 2.0, 0}) == doctest::Approx(0.0));
    CHECK(u(Point{0.0, 0.0, 0}) == doctest::Approx(0.0));
    CHECK(u.exact_solution);

    const Oracle shifted = half_space_solution(1.0, 0.25);
    CHECK(shifted(Point{-1.0, 0, 0}) == doctest::Approx(0.25));
    CHECK_FALSE(shifted.exact_solution);  // positive with vanishing Hessian on x1 <= 0

    CHECK_THROWS_AS(half_space_solution(0.0), invalid_input);
}

TEST_CASE("half-space solution with solver gamma satisfies the equation") {
    const EllipticityBounds b{1.0, 2.0};
    const OperatorSpec f1 = OperatorSpec::make_bellman(make_bellman_family(
        b, {SymMatrix::diagonal({2.0, 1.0}), SymMatrix::diagonal({1.0, 2.0})}));
    const GammaResult gamma = half_space_gamma(f1);
    const Oracle u = half_space_solution(gamma.gamma);

    const Grid g = unit_square(65);
    const GridFunction field = sample(g, [&](const Point& x) { return u(x); });
    ProblemSpec p;
    p.grid = g;
    p.f1 = f1;
    p.f2 = f1;
    p.dirichlet = [&](const Point& x) { return u(x); };
    p.delta = 0.0;
    const GridFunction res = residual_field(field, p);
    // the kink sits on a node column; second differences are exact elsewhere
    double worst_plus = 0.0;
    for (long i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary(i)) continue;
        if (g.coords(i)[0] > 2.0 * g.spacing()) worst_plus = std::max(worst_plus, std::abs(res[i]));
    }
    CHECK(worst_plus <= 1e-10);
}

TEST_CASE("quadratic oracle validity flags") {
    const OperatorSpec lap = OperatorSpec::make_linear(SymMatrix::identity(2), {1.0, 1.0});
    CHECK(quadratic_p2({0.25, 0.25}, lap).valid);
    CHECK(quadratic_p2({0.5, 0.0}, lap).valid);
    CHECK_FALSE(quadratic_p2({0.5, 0.5}, lap).valid);

    const OperatorSpec pucci = OperatorSpec::make_pucci_plus({1.0, 2.0});
    CHECK(quadratic_p2({0.125, 0.125}, pucci).valid);

    const QuadraticOracle q = quadratic_p2({0.25, 0.25}, lap);
    CHECK(q.oracle(Point{1.0, 1.0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("custom quadratic supports rotation and negative coefficients") {
    const Oracle bowl = custom_quadratic({-1.0, -1.0});
    CHECK(bowl(Point{0.5, 0.5, 0}) == doctest::Approx(-0.5));

    const Oracle rotated = custom_quadratic({1.0, 0.0}, 0.5);
    const double c = std::cos(0.5), s = std::sin(0.5);
    CHECK(rotated(Point{1.0, 2.0, 0}) ==
          doctest::Approx((c * 1.0 + s * 2.0) * (c * 1.0 + s * 2.0)).epsilon(1e-12));
}

TEST_CASE("sampled oracle partitions match the analytic sets within one cell") {
    const Grid g = unit_square(65);
    const double h = g.spacing();

    const Oracle radial = radial_solution(2);
    const GridFunction ur = sample(g, [&](const Point& x) { return radial(x); });
    const PartitionState pr = update_partition(ur, 0.0);
    for (long i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary(i)) continue;
        const Point x = g.coords(i);
        const double r = std::hypot(x[0], x[1]);
        const NodeLabel l = pr.labels[static_cast<std::size_t>(i)];
        if (l == NodeLabel::minus) CHECK(r < 0.5 + 1e-12);
        if (l == NodeLabel::plus) CHECK(r > 0.5 - 1e-12);
    }
    for (long node : pr.fb_nodes) {
        const Point x = g.coords(node);
        CHECK(std::abs(std::hypot(x[0], x[1]) - 0.5) <= h + 1e-12);
    }

    const Oracle half = half_space_solution(1.0);
    const GridFunction uh = sample(g, [&](const Point& x) { return half(x); });
    const PartitionState ph = update_partition(uh, 0.0);
    for (long i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary(i)) continue;
        const NodeLabel l = ph.labels[static_cast<std::size_t>(i)];
        const double x1 = g.coords(i)[0];
        if (l == NodeLabel::plus) CHECK(x1 > 0.0);
        if (l == NodeLabel::zero) CHECK(x1 <= 0.0 + 1e-12);
    }
    for (long node : ph.fb_nodes) CHECK(std::abs(g.coords(node)[0]) <= h + 1e-12);
}
