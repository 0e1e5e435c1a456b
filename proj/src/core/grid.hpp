#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "core/util.hpp"

namespace tlab {

/// Point in up to three dimensions; unused trailing coordinates are zero.
using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Uniform Cartesian grid over a box with the same spacing h on every axis.
class Grid {
public:
    Grid() = default;
    /// n nodes per axis (n >= 3); box side lengths must agree so h is isotropic.
    Grid(int dim, const Point& lower, const Point& upper, int nodes_per_axis);

    int dim() const { return dim_; }
    int nodes_per_axis() const { return n_; }
    double spacing() const { return h_; }
    const Point& lower() const { return lower_; }
    const Point& upper() const { return upper_; }
    /// Euclidean diameter of the box.
    double diameter() const;

    long node_count() const {
        long c = 1;
        for (int a = 0; a < dim_; ++a) c *= n_;
        return c;
    }

    long flat_index(const MultiIndex& mi) const {
        long idx = 0;
        for (int a = 0; a < dim_; ++a) idx = idx * n_ + mi[static_cast<std::size_t>(a)];
        return idx;
    }

    MultiIndex multi_index(long flat) const {
        MultiIndex mi{0, 0, 0};
        for (int a = dim_ - 1; a >= 0; --a) {
            mi[static_cast<std::size_t>(a)] = static_cast<int>(flat % n_);
            flat /= n_;
        }
        return mi;
    }

    Point coords(long flat) const {
        const MultiIndex mi = multi_index(flat);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a)
            x[static_cast<std::size_t>(a)] =
                lower_[static_cast<std::size_t>(a)] + h_ * mi[static_cast<std::size_t>(a)];
        return x;
    }

    bool contains(const MultiIndex& mi) const {
        for (int a = 0; a < dim_; ++a) {
            const int i = mi[static_cast<std::size_t>(a)];
            if (i < 0 || i >= n_) return false;
        }
        return true;
    }

    bool is_boundary(const MultiIndex& mi) const {
        for (int a = 0; a < dim_; ++a) {
            const int i = mi[static_cast<std::size_t>(a)];
            if (i == 0 || i == n_ - 1) return true;
        }
        return false;
    }

    bool is_boundary(long flat) const { return is_boundary(multi_index(flat)); }

    /// Chebyshev distance (in cells) from the node to the box boundary.
    int cells_from_boundary(const MultiIndex& mi) const {
        int dist = n_;
        for (int a = 0; a < dim_; ++a) {
            const int i = mi[static_cast<std::size_t>(a)];
            dist = std::min(dist, std::min(i, n_ - 1 - i));
        }
        return dist;
    }

    bool operator==(const Grid& o) const;

private:
    int dim_ = 0;
    Point lower_{0, 0, 0};
    Point upper_{0, 0, 0};
    int n_ = 0;
    double h_ = 0.0;
};

/// Scalar function values, one per grid node, row-major (last axis fastest).
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.node_count()), fill) {}

    double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }

    double max_abs() const;
};

/// Samples an analytic function at every node.
GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& f);

/// Field dump: header x1,...,xd,u then one node per row in row-major order,
/// 17 significant digits.
void write_field_csv(const std::string& path, const GridFunction& gf);

/// Loads a field dump and validates it against the expected grid
/// (column count, node count, coordinates, finite values).
GridFunction read_field_csv(const std::string& path, const Grid& expected);

}  // namespace tlab
