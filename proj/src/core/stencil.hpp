#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/grid.hpp"
#include "core/sym_matrix.hpp"

namespace tlab {

/// Wide-stencil direction set: pairwise non-parallel integer offsets covering
/// the coordinate axes. In 2-D, K selects the angular resolution
/// (2 = axes, 4 = +diagonals, 8 = +knight moves, 16 = +max-norm-3 offsets);
/// requests between levels round up. 3-D uses axes, face and body diagonals.
struct StencilSet {
    int dim = 0;
    std::vector<MultiIndex> offsets;       ///< integer offsets, axes first
    std::vector<Point> unit_dirs;          ///< offsets normalized to unit length
    std::vector<double> offset_norms;      ///< |v| per offset
    int max_reach = 0;                     ///< Chebyshev radius of the widest offset

    static StencilSet make(int dim, int k);
};

/// (u(x + h v) - 2 u(x) + u(x - h v)) / (h |v|)^2 along the integer offset v;
/// exact on quadratics. Throws out_of_domain if an endpoint leaves the grid.
double second_difference(const GridFunction& u, long node, const MultiIndex& offset);

/// Second-order central differences for all Hessian entries. The node must be
/// at least one cell from the boundary.
SymMatrix central_hessian(const GridFunction& u, long node);

/// Nonnegative weights beta_k with sum_k beta_k e_k e_k^T ~ A (Frobenius
/// least squares) plus the axis-only fallback used near the boundary.
struct DirectionalDecomposition {
    std::vector<double> beta;       ///< per stencil direction, >= 0
    double residual = 0.0;          ///< Frobenius norm of A - sum beta e e^T
    std::vector<double> beta_axis;  ///< axis weights A_ii (dim entries)
    double residual_axis = 0.0;
};

/// Solves min ||E x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nonneg_least_squares(const Eigen::MatrixXd& e, const Eigen::VectorXd& b);

/// Decomposes a PSD matrix over the stencil cone. Residual is zero whenever A
/// lies in the convex cone of the direction dyads. Throws invalid_input if A
/// is not positive semidefinite.
DirectionalDecomposition decompose_positive(const SymMatrix& a, const StencilSet& s);

struct AppliedField {
    GridFunction values;             ///< interior residual field, zero on boundary nodes
    std::vector<long> fallback_nodes;  ///< nodes evaluated with the axis-only weights
};

/// Node-wise sum_k beta_k * second_difference(u, node, e_k) at interior nodes.
/// Nodes whose wide offsets would leave the grid fall back to the axis-only
/// decomposition and are flagged.
AppliedField apply_linear_operator(const DirectionalDecomposition& dec, const StencilSet& s,
                                   const GridFunction& u);

}  // namespace tlab
