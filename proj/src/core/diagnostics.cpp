#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tlab {

namespace {

double dist2(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return s;
}

/// Visits every node inside the bounding box of B_r(center).
template <typename Fn>
void for_nodes_near(const Grid& g, const Point& center, double r, Fn&& fn) {
    MultiIndex lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        const double rel_lo = (center[ia] - r - g.lower()[ia]) / g.spacing();
        const double rel_hi = (center[ia] + r - g.lower()[ia]) / g.spacing();
        lo[ia] = std::max(0, static_cast<int>(std::floor(rel_lo)));
        hi[ia] = std::min(g.nodes_per_axis() - 1, static_cast<int>(std::ceil(rel_hi)));
        if (lo[ia] > hi[ia]) return;
    }
    MultiIndex mi = lo;
    while (true) {
        fn(g.flat_index(mi), g.coords(g.flat_index(mi)));
        int axis = g.dim() - 1;
        while (axis >= 0) {
            auto ia = static_cast<std::size_t>(axis);
            if (++mi[ia] <= hi[ia]) break;
            mi[ia] = lo[ia];
            --axis;
        }
        if (axis < 0) break;
    }
}

double slab_width(const std::vector<Point>& points, const Point& dir, int dim) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Point& p : points) {
        double proj = 0.0;
        for (int a = 0; a < dim; ++a)
            proj += p[static_cast<std::size_t>(a)] * dir[static_cast<std::size_t>(a)];
        lo = std::min(lo, proj);
        hi = std::max(hi, proj);
    }
    return hi - lo;
}

/// Andrew monotone chain; returns hull vertices in counter-clockwise order.
std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a[0] == b[0] && a[1] == b[1];
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    const auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double hull_width_2d(const std::vector<Point>& points) {
    const std::vector<Point> hull = convex_hull_2d(points);
    if (hull.size() <= 2) {
        // Degenerate (collinear) set: width along the normal of the segment.
        if (hull.size() < 2) return 0.0;
        Point dir{hull[1][1] - hull[0][1], -(hull[1][0] - hull[0][0]), 0.0};
        const double norm = std::hypot(dir[0], dir[1]);
        if (norm == 0.0) return 0.0;
        dir[0] /= norm;
        dir[1] /= norm;
        return slab_width(points, dir, 2);
    }
    // Rotating calipers: the minimal slab is normal to some hull edge.
    double best = std::numeric_limits<double>::infinity();
    const std::size_t m = hull.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % m];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double norm = std::hypot(ex, ey);
        if (norm == 0.0) continue;
        const Point normal{-ey / norm, ex / norm, 0.0};
        double far = 0.0;
        for (const Point& p : hull)
            far = std::max(far, std::abs((p[0] - a[0]) * normal[0] + (p[1] - a[1]) * normal[1]));
        best = std::min(best, far);
    }
    return std::isfinite(best) ? best : 0.0;
}

double sampled_width(const std::vector<Point>& points, int dim) {
    // Fibonacci-sphere directions with one shrinking local refinement pass.
    constexpr int kSamples = 1024;
    constexpr double golden = 2.399963229728653;  // pi (3 - sqrt 5)
    double best = std::numeric_limits<double>::infinity();
    Point best_dir{0, 0, 1};
    for (int i = 0; i < kSamples; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / kSamples;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        const Point dir{rho * std::cos(phi), rho * std::sin(phi), z};
        const double w = slab_width(points, dir, dim);
        if (w < best) {
            best = w;
            best_dir = dir;
        }
    }
    for (double step : {0.05, 0.01, 0.002}) {
        for (int i = -2; i <= 2; ++i) {
            for (int j = -2; j <= 2; ++j) {
                Point t1{-best_dir[1], best_dir[0], 0.0};
                double n1 = std::hypot(t1[0], t1[1]);
                if (n1 < 1e-12) t1 = Point{1, 0, 0}, n1 = 1.0;
                t1[0] /= n1;
                t1[1] /= n1;
                const Point t2{best_dir[1] * t1[2] - best_dir[2] * t1[1],
                               best_dir[2] * t1[0] - best_dir[0] * t1[2],
                               best_dir[0] * t1[1] - best_dir[1] * t1[0]};
                Point dir{best_dir[0] + step * (i * t1[0] + j * t2[0]),
                          best_dir[1] + step * (i * t1[1] + j * t2[1]),
                          best_dir[2] + step * (i * t1[2] + j * t2[2])};
                const double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
                dir[0] /= norm;
                dir[1] /= norm;
                dir[2] /= norm;
                const double w = slab_width(points, dir, dim);
                if (w < best) {
                    best = w;
                    best_dir = dir;
                }
            }
        }
    }
    return best;
}

}  // namespace

FlaggedValue volume_density(const GridFunction& u, const Point& center, double r,
                            double delta) {
    if (!(r > 0.0)) throw invalid_input("volume_density: radius must be positive");
    const Grid& g = u.grid;
    long count = 0;
    const double r2 = r * r;
    for_nodes_near(g, center, r, [&](long node, const Point& x) {
        if (dist2(x, center, g.dim()) <= r2 && u[node] < -delta) ++count;
    });
    double cell = 1.0;
    for (int a = 0; a < g.dim(); ++a) cell *= g.spacing();
    FlaggedValue out;
    out.value = static_cast<double>(count) * cell / std::pow(r, g.dim());
    out.flag = r < 2.0 * g.spacing();
    return out;
}

double min_diameter(const std::vector<Point>& points, int dim) {
    if (points.empty()) throw invalid_input("min_diameter: empty point set");
    if (points.size() == 1) return 0.0;
    if (dim == 1) {
        double lo = points[0][0], hi = points[0][0];
        for (const Point& p : points) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        return hi - lo;
    }
    if (dim == 2) return hull_width_2d(points);
    return sampled_width(points, dim);
}

FlaggedValue thickness(const GridFunction& u, const Point& x, double r, double delta) {
    if (!(r > 0.0)) throw invalid_input("thickness: radius must be positive");
    const Grid& g = u.grid;
    std::vector<Point> zero_set;
    const double r2 = r * r;
    for_nodes_near(g, x, r, [&](long node, const Point& p) {
        if (dist2(p, x, g.dim()) <= r2 && std::abs(u[node]) <= delta) zero_set.push_back(p);
    });
    FlaggedValue out;
    if (zero_set.empty()) {
        out.flag = true;
        return out;
    }
    out.value = min_diameter(zero_set, g.dim()) / r;
    return out;
}

GrowthProfile growth_profile(const GridFunction& u, const Point& center, int j0, int j1) {
    if (j0 > j1) throw invalid_input("growth_profile: need j0 <= j1");
    const Grid& g = u.grid;
    GrowthProfile out;

    // One extra level when it still resolves the grid, for the last
    // membership test.
    const auto sup_at = [&](int j) {
        const double r = std::pow(2.0, -j);
        double sup = 0.0;
        const double r2 = r * r;
        for_nodes_near(g, center, r, [&](long node, const Point& x) {
            if (dist2(x, center, g.dim()) <= r2) sup = std::max(sup, std::abs(u[node]));
        });
        return sup;
    };

    std::vector<double> sups;
    int j_extra = j1;
    if (std::pow(2.0, -(j1 + 1)) >= g.spacing()) j_extra = j1 + 1;
    for (int j = j0; j <= j_extra; ++j) sups.push_back(sup_at(j));

    bool all_zero = true;
    for (int j = j0; j <= j1; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j - j0);
        const double r = std::pow(2.0, -j);
        out.j.push_back(j);
        out.radius.push_back(r);
        out.sup.push_back(sups[idx]);
        out.ratio.push_back(sups[idx] * std::pow(4.0, j));
        if (sups[idx] > 0.0) all_zero = false;
        const bool has_next = idx + 1 < sups.size();
        out.in_m.push_back(has_next && sups[idx + 1] >= sups[idx] / 16.0 && sups[idx] > 0.0);
    }
    out.degenerate = all_zero;
    if (all_zero) return out;

    // OLS on (log r, log S) over positive suprema.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < out.sup.size(); ++i) {
        if (out.sup[i] <= 0.0) continue;
        const double lx = std::log(out.radius[i]);
        const double ly = std::log(out.sup[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n >= 2) {
        const double denom = n * sxx - sx * sx;
        out.exponent = (n * sxy - sx * sy) / denom;
        out.amplitude = std::exp((sy - out.exponent * sx) / n);
    }
    return out;
}

NondegeneracyProfile nondegeneracy_profile(const GridFunction& u, const Point& center,
                                           const std::vector<double>& radii) {
    const Grid& g = u.grid;
    NondegeneracyProfile out;
    out.min_value = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        if (!(r > 0.0)) throw invalid_input("nondegeneracy_profile: radius must be positive");
        double sup = -std::numeric_limits<double>::infinity();
        long hits = 0;
        for_nodes_near(g, center, r + g.spacing(), [&](long node, const Point& x) {
            const double d = std::sqrt(dist2(x, center, g.dim()));
            if (std::abs(d - r) <= g.spacing()) {
                sup = std::max(sup, u[node]);
                ++hits;
            }
        });
        if (hits == 0)
            throw invalid_input("nondegeneracy_profile: annulus holds no nodes (radius too small)");
        out.radius.push_back(r);
        out.value.push_back(sup / (r * r));
        out.min_value = std::min(out.min_value, sup / (r * r));
    }
    return out;
}

GridFunction blow_up(const GridFunction& u, const Point& x0, double r, int target_n) {
    if (!(r > 0.0)) throw invalid_input("blow_up: radius must be positive");
    const Grid& g = u.grid;
    for (int a = 0; a < g.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        if (x0[ia] - r < g.lower()[ia] - 1e-12 || x0[ia] + r > g.upper()[ia] + 1e-12)
            throw out_of_domain("blow_up: zoom box leaves the source grid");
    }
    Point lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        lo[static_cast<std::size_t>(a)] = -1.0;
        hi[static_cast<std::size_t>(a)] = 1.0;
    }
    const Grid target(g.dim(), lo, hi, target_n);
    GridFunction out(target);

    const long count = target.node_count();
    for (long i = 0; i < count; ++i) {
        const Point y = target.coords(i);
        Point x{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a)
            x[static_cast<std::size_t>(a)] =
                x0[static_cast<std::size_t>(a)] + r * y[static_cast<std::size_t>(a)];

        // multilinear interpolation in the source cell containing x
        MultiIndex base{0, 0, 0};
        Point frac{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a) {
            const auto ia = static_cast<std::size_t>(a);
            double rel = (x[ia] - g.lower()[ia]) / g.spacing();
            rel = std::clamp(rel, 0.0, static_cast<double>(g.nodes_per_axis() - 1));
            int cell = static_cast<int>(std::floor(rel));
            cell = std::min(cell, g.nodes_per_axis() - 2);
            base[ia] = cell;
            frac[ia] = rel - cell;
        }
        double value = 0.0;
        const int corners = 1 << g.dim();
        for (int c = 0; c < corners; ++c) {
            double weight = 1.0;
            MultiIndex mi = base;
            for (int a = 0; a < g.dim(); ++a) {
                const auto ia = static_cast<std::size_t>(a);
                if ((c >> a) & 1) {
                    mi[ia] += 1;
                    weight *= frac[ia];
                } else {
                    weight *= 1.0 - frac[ia];
                }
            }
            if (weight != 0.0) value += weight * u[g.flat_index(mi)];
        }
        out[i] = value / (r * r);
    }
    return out;
}

namespace {

/// Interior nodes farther than two cells (Chebyshev) from every free-boundary
/// node, and at least one cell from the box boundary.
std::vector<long> hessian_check_nodes(const Grid& g, const PartitionState& part) {
    const long count = g.node_count();
    std::vector<bool> near_fb(static_cast<std::size_t>(count), false);
    for (long fb : part.fb_nodes) {
        const MultiIndex mi = g.multi_index(fb);
        MultiIndex nb{0, 0, 0};
        const int reach = 2;
        for (int d0 = -reach; d0 <= reach; ++d0)
            for (int d1 = (g.dim() > 1 ? -reach : 0); d1 <= (g.dim() > 1 ? reach : 0); ++d1)
                for (int d2 = (g.dim() > 2 ? -reach : 0); d2 <= (g.dim() > 2 ? reach : 0); ++d2) {
                    nb = mi;
                    nb[0] += d0;
                    if (g.dim() > 1) nb[1] += d1;
                    if (g.dim() > 2) nb[2] += d2;
                    if (g.contains(nb)) near_fb[static_cast<std::size_t>(g.flat_index(nb))] = true;
                }
    }
    std::vector<long> nodes;
    for (long i = 0; i < count; ++i) {
        if (near_fb[static_cast<std::size_t>(i)]) continue;
        if (g.cells_from_boundary(g.multi_index(i)) < 1) continue;
        nodes.push_back(i);
    }
    return nodes;
}

}  // namespace

ViscosityPairCheck check_viscosity_pair(const GridFunction& u, const OperatorSpec& f1,
                                        const OperatorSpec& f2, const PartitionState& part,
                                        double rhs) {
    const Grid& g = u.grid;
    ViscosityPairCheck out;
    const double scale = std::max(1.0, u.max_abs());
    out.tolerance = 10.0 * g.spacing() * g.spacing() * scale;
    out.worst_min_excess = -std::numeric_limits<double>::infinity();
    out.worst_max_deficit = std::numeric_limits<double>::infinity();
    for (long node : hessian_check_nodes(g, part)) {
        const SymMatrix hess = central_hessian(u, node);
        const double v1 = evaluate(f1, hess);
        const double v2 = evaluate(f2, hess);
        const double lo = std::min(v1, v2);
        const double hi = std::max(v1, v2);
        out.worst_min_excess = std::max(out.worst_min_excess, lo - rhs);
        out.worst_max_deficit = std::min(out.worst_max_deficit, hi + rhs);
        if (lo > rhs + out.tolerance || hi < -rhs - out.tolerance) ++out.violations;
        ++out.checked;
    }
    return out;
}

ClassMembership class_membership(const GridFunction& u, const EllipticityBounds& b, double f,
                                 const PartitionState& part) {
    const Grid& g = u.grid;
    ClassMembership out;
    const double scale = std::max(1.0, u.max_abs());
    const double tol = 10.0 * g.spacing() * g.spacing() * scale;
    out.in_s_upper = true;
    out.in_s_lower = true;
    out.in_s_star = true;
    for (long node : hessian_check_nodes(g, part)) {
        const SymMatrix hess = central_hessian(u, node);
        const double minus = pucci_minus(hess, b);
        const double plus = pucci_plus(hess, b);
        if (minus > f + tol) out.in_s_upper = false;
        if (plus < f - tol) out.in_s_lower = false;
        if (minus > std::abs(f) + tol || plus < -std::abs(f) - tol) out.in_s_star = false;
        ++out.checked;
    }
    out.in_s = out.in_s_upper && out.in_s_lower;
    return out;
}

double c11_seminorm(const GridFunction& u, const StencilSet& s) {
    const Grid& g = u.grid;
    const long count = g.node_count();
    double worst = 0.0;
    for (long node = 0; node < count; ++node) {
        const Point x = g.coords(node);
        bool central = true;
        for (int a = 0; a < g.dim(); ++a) {
            const auto ia = static_cast<std::size_t>(a);
            const double mid = 0.5 * (g.lower()[ia] + g.upper()[ia]);
            const double quarter = 0.25 * (g.upper()[ia] - g.lower()[ia]);
            if (std::abs(x[ia] - mid) > quarter + 1e-12) central = false;
        }
        if (!central) continue;
        const MultiIndex mi = g.multi_index(node);
        if (g.cells_from_boundary(mi) < s.max_reach) continue;
        for (const auto& off : s.offsets)
            worst = std::max(worst, std::abs(second_difference(u, node, off)));
    }
    return worst;
}

double convexity_gap(const GridFunction& u) {
    const Grid& g = u.grid;
    const long count = g.node_count();
    double min_eig = std::numeric_limits<double>::infinity();
    for (long node = 0; node < count; ++node) {
        if (g.cells_from_boundary(g.multi_index(node)) < 1) continue;
        min_eig = std::min(min_eig, central_hessian(u, node).eigenvalues().front());
    }
    if (!std::isfinite(min_eig)) return 0.0;
    return std::max(0.0, -min_eig);
}

long gradient_support_check(const GridFunction& u, const PartitionState& part) {
    const Grid& g = u.grid;
    const double tol = 10.0 * g.spacing() * std::max(1.0, u.max_abs());
    long violations = 0;
    const long count = g.node_count();
    for (long node = 0; node < count; ++node) {
        if (part.labels[static_cast<std::size_t>(node)] != NodeLabel::zero) continue;
        const MultiIndex mi = g.multi_index(node);
        if (g.cells_from_boundary(mi) < 1) continue;
        double grad2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            MultiIndex fwd = mi, bwd = mi;
            fwd[static_cast<std::size_t>(a)] += 1;
            bwd[static_cast<std::size_t>(a)] -= 1;
            const double da =
                (u[g.flat_index(fwd)] - u[g.flat_index(bwd)]) / (2.0 * g.spacing());
            grad2 += da * da;
        }
        if (std::sqrt(grad2) > tol) ++violations;
    }
    return violations;
}

double fb_cell_fraction(const PartitionState& part, const Grid& grid) {
    double cell = 1.0, volume = 1.0;
    for (int a = 0; a < grid.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        cell *= grid.spacing();
        volume *= grid.upper()[ia] - grid.lower()[ia];
    }
    return static_cast<double>(part.fb_nodes.size()) * cell / volume;
}

}  // namespace tlab
