#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/elliptic.hpp"
#include "core/grid.hpp"
#include "core/stencil.hpp"

namespace tlab {

/// Discrete free transmission problem F1(D^2u) on {u>0}, F2 on {u<0}, with
/// Dirichlet data and a regularized band of half-width `delta` around u = 0.
struct ProblemSpec {
    Grid grid;
    OperatorSpec f1;
    OperatorSpec f2;
    std::function<double(const Point&)> dirichlet;
    double rhs = 1.0;
    /// Band half-width; negative means auto (h^2 * box diameter). At zero the
    /// band disappears: labels follow the strict sign and exact zeros take the
    /// F1 branch.
    double delta = -1.0;

    double resolved_delta() const;
};

enum class NodeLabel : std::uint8_t { plus = 0, minus = 1, zero = 2, boundary = 3 };

struct PartitionState {
    std::vector<NodeLabel> labels;
    std::vector<long> fb_nodes;  ///< interior nodes with a differently-labeled axis neighbor
    long plus_count = 0;
    long minus_count = 0;
    long zero_count = 0;
};

/// Labels nodes by sign against the delta band and extracts the free-boundary
/// node list (interior nodes with a differently-labeled 2d-neighbor).
PartitionState update_partition(const GridFunction& u, double delta);

enum class InitialGuess { plus, minus, zero };

struct SolverConfig {
    int outer_max_iters = 100;
    int inner_max_iters = 50;
    double linear_tol = 1e-10;
    double residual_tol = 1e-8;
    double damping = 0.5;        ///< fraction of changed labels flipped on a cycle
    int stencil_k = 8;
    int pucci_frames = 16;       ///< frames when converting Pucci to a Bellman family
    InitialGuess initial_guess = InitialGuess::plus;
};

struct SolveResult {
    GridFunction u;
    PartitionState partition;
    int outer_iters = 0;
    std::vector<int> inner_iters;
    double residual = 0.0;
    std::vector<double> residual_history;
    bool converged = false;
    std::string message;
    double delta_used = 0.0;
    std::string initial_guess_used;
};

/// Monotone wide-stencil realization of an operator: one positive
/// decomposition per Bellman member (Pucci kinds are converted to a rotated
/// Bellman family first; min-form for pucci_minus).
class DiscreteOperator {
public:
    static DiscreteOperator build(const OperatorSpec& op, const StencilSet& s, int pucci_frames);

    /// Row of member k at a node: (neighbor, coefficient) pairs including the
    /// center. Near-boundary nodes where a wide offset exits use the axis-only
    /// weights; `used_fallback` reports it.
    void member_row(const Grid& g, long node, std::size_t k,
                    std::vector<std::pair<long, double>>& out, bool& used_fallback) const;

    double member_value(const GridFunction& u, long node, std::size_t k) const;

    /// Extremal (max or min) member value per interior node.
    AppliedField evaluate(const GridFunction& u) const;

    std::size_t member_count() const { return decs_.size(); }
    bool maximize() const { return maximize_; }
    bool axis_fallback_warning() const { return axis_fallback_warning_; }
    const StencilSet& stencil() const { return stencil_; }

private:
    StencilSet stencil_;
    std::vector<DirectionalDecomposition> decs_;
    bool maximize_ = true;
    bool axis_fallback_warning_ = false;
};

/// Pointwise residual of the transmission equation: F1-branch above the band,
/// F2-branch below, and the blended band equation
/// s F1 + (1-s) F2 - rhs |u|/delta with s = (u+delta)/(2 delta) inside.
GridFunction residual_field(const GridFunction& u, const ProblemSpec& p,
                            const DiscreteOperator& f1h, const DiscreteOperator& f2h);

/// Convenience overload building the discrete operators internally.
GridFunction residual_field(const GridFunction& u, const ProblemSpec& p,
                            const SolverConfig& cfg = {});

/// Howard policy iteration for F(D^2 u) = f with Dirichlet data: pick the
/// extremal member per node, solve the monotone linear system, repeat until
/// the policy is fixed.
GridFunction howard_solve(const OperatorSpec& f, const GridFunction& rhs,
                          const std::function<double(const Point&)>& dirichlet,
                          const Grid& grid, const SolverConfig& cfg = {});

/// Outer fixed point on the sign partition with inner Howard solves.
SolveResult solve(const ProblemSpec& p, const SolverConfig& cfg = {});

}  // namespace tlab
