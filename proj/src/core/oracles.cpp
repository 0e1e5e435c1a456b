#include "core/oracles.hpp"

#include <cmath>

namespace tlab {

Oracle radial_solution(int dim) {
    if (dim < 1) throw invalid_input("radial_solution: dimension must be >= 1");
    Oracle o;
    o.kind = "radial";
    o.fb_radius = 0.5;
    const double d = static_cast<double>(dim);
    o.eval = [d, dim](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a)
            r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        return r2 / (2.0 * d) - 1.0 / (8.0 * d);
    };
    return o;
}

Oracle half_space_solution(double gamma, double shift) {
    if (!(gamma > 0.0)) throw invalid_input("half_space_solution: gamma must be positive");
    Oracle o;
    o.kind = "half_space";
    o.gamma = gamma;
    o.shift = shift;
    o.exact_solution = (shift == 0.0);
    o.eval = [gamma, shift](const Point& x) {
        const double p = x[0] > 0.0 ? x[0] : 0.0;
        return 0.5 * gamma * p * p + shift;
    };
    return o;
}

QuadraticOracle quadratic_p2(const std::vector<double>& a, const OperatorSpec& op) {
    QuadraticOracle q;
    q.oracle.kind = "quadratic_p2";
    q.oracle.coeffs = a;
    const std::size_t d = a.size();
    q.oracle.eval = [a, d](const Point& x) {
        double v = 0.0;
        for (std::size_t j = 0; j < d; ++j) v += a[j] * x[j] * x[j];
        return v;
    };
    std::vector<double> diag(a);
    for (double& c : diag) c *= 2.0;  // D^2 P2 = 2 diag(a)
    q.equation_value = evaluate(op, SymMatrix::diagonal(diag));
    q.valid = std::abs(q.equation_value - 1.0) <= 1e-12;
    return q;
}

Oracle custom_quadratic(const std::vector<double>& a, double rotation) {
    Oracle o;
    o.kind = "custom_quadratic";
    o.coeffs = a;
    const std::size_t d = a.size();
    const double c = std::cos(rotation), s = std::sin(rotation);
    o.eval = [a, d, c, s](const Point& x) {
        Point y = x;
        if (d >= 2) {
            y[0] = c * x[0] + s * x[1];
            y[1] = -s * x[0] + c * x[1];
        }
        double v = 0.0;
        for (std::size_t j = 0; j < d; ++j) v += a[j] * y[j] * y[j];
        return v;
    };
    return o;
}

}  // namespace tlab
