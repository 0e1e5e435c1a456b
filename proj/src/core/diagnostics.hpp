#pragma once

#include <optional>
#include <vector>

#include "core/elliptic.hpp"
#include "core/grid.hpp"
#include "core/solver.hpp"
#include "core/stencil.hpp"

namespace tlab {

struct FlaggedValue {
    double value = 0.0;
    bool flag = false;  ///< low-resolution / empty-set marker
};

/// vol(B_r(c) ∩ {u < -delta}) / r^d via node counting.
/// Flags r < 2h as low resolution.
FlaggedValue volume_density(const GridFunction& u, const Point& center, double r,
                            double delta = 0.0);

/// Smallest slab width of a point set: exact rotating-calipers hull width in
/// 2-D, sampled directions (Fibonacci sphere + one refinement pass) in 3-D.
/// Throws invalid_input on an empty set; a single point gives 0.
double min_diameter(const std::vector<Point>& points, int dim);

/// MD({|u| <= delta} ∩ B_r(x)) / r. Empty intersection gives 0 with the flag.
FlaggedValue thickness(const GridFunction& u, const Point& x, double r, double delta = 0.0);

struct GrowthProfile {
    std::vector<int> j;
    std::vector<double> radius;
    std::vector<double> sup;        ///< S_j = sup over B_{2^-j} of |u|
    std::vector<double> ratio;      ///< S_j * 2^(2j)
    std::vector<bool> in_m;         ///< S_{j+1} >= S_j / 16
    double exponent = 0.0;          ///< least-squares slope of log S vs log r
    double amplitude = 0.0;         ///< exp(intercept)
    bool degenerate = false;        ///< all sampled suprema vanish
};

/// Dyadic suprema S_j for j in [j0, j1] (plus S_{j1+1} for the last
/// membership test when the radius still resolves the grid).
GrowthProfile growth_profile(const GridFunction& u, const Point& center, int j0, int j1);

struct NondegeneracyProfile {
    std::vector<double> radius;
    std::vector<double> value;  ///< N(r) = sup over the discrete sphere of u, / r^2
    double min_value = 0.0;
};

/// Sphere suprema over the annulus | |x-c| - r | <= h. Throws invalid_input if
/// an annulus holds no nodes.
NondegeneracyProfile nondegeneracy_profile(const GridFunction& u, const Point& center,
                                           const std::vector<double>& radii);

/// u(x0 + r y) / r^2 resampled on the unit box [-1,1]^d with target_n nodes
/// per axis (bilinear/trilinear interpolation). Throws out_of_domain if the
/// zoom box leaves the source grid.
GridFunction blow_up(const GridFunction& u, const Point& x0, double r, int target_n);

struct ViscosityPairCheck {
    long violations = 0;
    long checked = 0;
    double worst_min_excess = 0.0;  ///< max of min(F1,F2) - rhs over checked nodes
    double worst_max_deficit = 0.0; ///< min of max(F1,F2) + rhs over checked nodes
    double tolerance = 0.0;
};

/// Pointwise check of min(F1(D^2u), F2(D^2u)) <= rhs and
/// max(F1(D^2u), F2(D^2u)) >= -rhs through central Hessians, skipping nodes
/// within two cells of the free boundary where the kink pollutes the stencil.
ViscosityPairCheck check_viscosity_pair(const GridFunction& u, const OperatorSpec& f1,
                                        const OperatorSpec& f2, const PartitionState& part,
                                        double rhs = 1.0);

struct ClassMembership {
    bool in_s_upper = false;  ///< M^-(D^2u) <= f everywhere checked
    bool in_s_lower = false;  ///< M^+(D^2u) >= f
    bool in_s = false;
    bool in_s_star = false;   ///< M^-(D^2u) <= |f| and M^+(D^2u) >= -|f|
    long checked = 0;
};

ClassMembership class_membership(const GridFunction& u, const EllipticityBounds& b, double f,
                                 const PartitionState& part);

/// Max over stencil directions and nodes in the central half of the domain of
/// |second difference|.
double c11_seminorm(const GridFunction& u, const StencilSet& s);

/// -min over interior nodes of the smallest central-Hessian eigenvalue,
/// clamped at 0 for convex inputs.
double convexity_gap(const GridFunction& u);

/// Counts zero-labeled nodes whose central-difference gradient exceeds
/// 10 h max(1, |u|_inf).
long gradient_support_check(const GridFunction& u, const PartitionState& part);

/// (free-boundary node count * h^d) / box volume.
double fb_cell_fraction(const PartitionState& part, const Grid& grid);

}  // namespace tlab
