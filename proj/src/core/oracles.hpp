#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/elliptic.hpp"
#include "core/grid.hpp"

namespace tlab {

/// Analytic test function sampled on demand, with the closed-form facts the
/// diagnostics are checked against.
struct Oracle {
    std::string kind;
    std::function<double(const Point&)> eval;

    // kind-specific metadata
    double fb_radius = 0.0;       ///< radial: the zero circle |x| = 1/2
    double gamma = 0.0;           ///< half_space
    double shift = 0.0;           ///< half_space constant C
    std::vector<double> coeffs;   ///< quadratic kinds
    bool exact_solution = true;   ///< false for shifted half-space (C != 0)

    double operator()(const Point& x) const { return eval(x); }
};

/// v(x) = |x|^2/(2d) - 1/(8d): negative inside |x| < 1/2, positive outside,
/// Laplacian identically one, Hessian I/d.
Oracle radial_solution(int dim);

/// u(x) = gamma (x1)_+^2 / 2 + C. Only C = 0 gives an exact solution (for
/// C != 0 the function is positive on {x1 <= 0} where the Hessian vanishes,
/// so the equation fails there); nonzero shifts are kept for rescaling tests
/// and flagged via `exact_solution`.
Oracle half_space_solution(double gamma, double shift = 0.0);

struct QuadraticOracle {
    Oracle oracle;
    bool valid = false;       ///< evaluate(op, D^2 P2) == 1 (within 1e-12)
    double equation_value = 0.0;
};

/// P2(x) = sum_j a_j x_j^2 with validity checked against the given operator.
QuadraticOracle quadratic_p2(const std::vector<double>& a, const OperatorSpec& op);

/// sum_j a_j ((R x)_j)^2 with R a rotation by `rotation` radians in the
/// (x1, x2) plane; coefficients of either sign (used for non-convex controls).
Oracle custom_quadratic(const std::vector<double>& a, double rotation = 0.0);

}  // namespace tlab
