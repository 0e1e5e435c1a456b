#include "core/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tlab {

double ProblemSpec::resolved_delta() const {
    if (delta >= 0.0) return delta;
    const double h = grid.spacing();
    return h * h * grid.diameter();
}

PartitionState update_partition(const GridFunction& u, double delta) {
    if (delta < 0.0) throw invalid_input("update_partition: delta must be >= 0");
    const Grid& g = u.grid;
    const long count = g.node_count();
    PartitionState p;
    p.labels.resize(static_cast<std::size_t>(count));

    const auto sign_label = [&](long i) {
        if (u[i] > delta) return NodeLabel::plus;
        if (u[i] < -delta) return NodeLabel::minus;
        return NodeLabel::zero;
    };

    for (long i = 0; i < count; ++i) {
        if (g.is_boundary(i)) {
            p.labels[static_cast<std::size_t>(i)] = NodeLabel::boundary;
            continue;
        }
        const NodeLabel l = sign_label(i);
        p.labels[static_cast<std::size_t>(i)] = l;
        if (l == NodeLabel::plus) ++p.plus_count;
        else if (l == NodeLabel::minus) ++p.minus_count;
        else ++p.zero_count;
    }

    // Free boundary: interior nodes whose sign class differs from an axis
    // neighbor's (boundary nodes compared by their own sign).
    for (long i = 0; i < count; ++i) {
        if (g.is_boundary(i)) continue;
        const MultiIndex mi = g.multi_index(i);
        const NodeLabel mine = sign_label(i);
        bool fb = false;
        for (int a = 0; a < g.dim() && !fb; ++a) {
            for (int dir = -1; dir <= 1 && !fb; dir += 2) {
                MultiIndex nb = mi;
                nb[static_cast<std::size_t>(a)] += dir;
                if (!g.contains(nb)) continue;
                if (sign_label(g.flat_index(nb)) != mine) fb = true;
            }
        }
        if (fb) p.fb_nodes.push_back(i);
    }
    return p;
}

DiscreteOperator DiscreteOperator::build(const OperatorSpec& op, const StencilSet& s,
                                         int pucci_frames) {
    DiscreteOperator d;
    d.stencil_ = s;
    std::vector<SymMatrix> members;
    switch (op.kind()) {
        case OperatorKind::pucci_plus:
            members = pucci_bellman_family(op.bounds(), pucci_frames, s.dim,
                                           &d.axis_fallback_warning_).matrices;
            d.maximize_ = true;
            break;
        case OperatorKind::pucci_minus:
            // The same admissible family; the infimum realizes M^-.
            members = pucci_bellman_family(op.bounds(), pucci_frames, s.dim,
                                           &d.axis_fallback_warning_).matrices;
            d.maximize_ = false;
            break;
        case OperatorKind::bellman:
        case OperatorKind::linear:
            members = op.members();
            d.maximize_ = true;
            break;
    }
    d.decs_.reserve(members.size());
    for (const auto& a : members) d.decs_.push_back(decompose_positive(a, s));
    return d;
}

void DiscreteOperator::member_row(const Grid& g, long node, std::size_t k,
                                  std::vector<std::pair<long, double>>& out,
                                  bool& used_fallback) const {
    out.clear();
    const MultiIndex mi = g.multi_index(node);
    const int margin = g.cells_from_boundary(mi);
    if (margin < 1) throw out_of_domain("member_row: boundary node");
    const double h2 = g.spacing() * g.spacing();
    const DirectionalDecomposition& dec = decs_[k];
    double center = 0.0;
    used_fallback = margin < stencil_.max_reach;
    if (!used_fallback) {
        for (std::size_t j = 0; j < stencil_.offsets.size(); ++j) {
            const double beta = dec.beta[j];
            if (beta == 0.0) continue;
            const double w = beta / (h2 * stencil_.offset_norms[j] * stencil_.offset_norms[j]);
            MultiIndex fwd = mi, bwd = mi;
            for (int a = 0; a < g.dim(); ++a) {
                const auto ia = static_cast<std::size_t>(a);
                fwd[ia] += stencil_.offsets[j][ia];
                bwd[ia] -= stencil_.offsets[j][ia];
            }
            out.emplace_back(g.flat_index(fwd), w);
            out.emplace_back(g.flat_index(bwd), w);
            center -= 2.0 * w;
        }
    } else {
        for (int a = 0; a < g.dim(); ++a) {
            const double beta = dec.beta_axis[static_cast<std::size_t>(a)];
            if (beta == 0.0) continue;
            const double w = beta / h2;
            MultiIndex fwd = mi, bwd = mi;
            fwd[static_cast<std::size_t>(a)] += 1;
            bwd[static_cast<std::size_t>(a)] -= 1;
            out.emplace_back(g.flat_index(fwd), w);
            out.emplace_back(g.flat_index(bwd), w);
            center -= 2.0 * w;
        }
    }
    out.emplace_back(node, center);
}

double DiscreteOperator::member_value(const GridFunction& u, long node, std::size_t k) const {
    std::vector<std::pair<long, double>> row;
    bool fallback = false;
    member_row(u.grid, node, k, row, fallback);
    double sum = 0.0;
    for (const auto& [idx, coeff] : row) sum += coeff * u[idx];
    return sum;
}

AppliedField DiscreteOperator::evaluate(const GridFunction& u) const {
    AppliedField out;
    out.values = GridFunction(u.grid);
    const Grid& g = u.grid;
    const long count = g.node_count();
    std::vector<std::pair<long, double>> row;
    for (long node = 0; node < count; ++node) {
        if (g.is_boundary(node)) continue;
        double best = 0.0;
        bool fallback_any = false;
        for (std::size_t k = 0; k < decs_.size(); ++k) {
            bool fb = false;
            member_row(g, node, k, row, fb);
            fallback_any |= fb;
            double v = 0.0;
            for (const auto& [idx, coeff] : row) v += coeff * u[idx];
            if (k == 0)
                best = v;
            else
                best = maximize_ ? std::max(best, v) : std::min(best, v);
        }
        out.values[node] = best;
        if (fallback_any) out.fallback_nodes.push_back(node);
    }
    return out;
}

namespace {

// Per-node frozen equation for the inner solve:
//   extremal_a [s1 (L1_a u)] + extremal_b [s2 (L2_b u)] - c0 u = target.
// Plus nodes use only the F1 part (s1 = 1, s2 = 0), minus nodes only F2, band
// nodes blend both with the zero-order damping from the |u|/delta term.
struct NodeEquation {
    double s1 = 0.0;
    double s2 = 0.0;
    double c0 = 0.0;
    double target = 0.0;
};

struct InnerProblem {
    const Grid* grid = nullptr;
    const DiscreteOperator* f1 = nullptr;
    const DiscreteOperator* f2 = nullptr;
    std::vector<NodeEquation> equations;   // one per node, meaningful for interior
    std::vector<long> interior;            // interior flat indices
    std::vector<long> interior_id;         // flat -> row (or -1)
};

struct Policy {
    std::vector<std::size_t> a;  // F1 member per node
    std::vector<std::size_t> b;  // F2 member per node

    bool operator==(const Policy& o) const { return a == o.a && b == o.b; }
};

std::size_t improve_one(const DiscreteOperator& op, const GridFunction& u, long node) {
    std::size_t best = 0;
    double best_v = op.member_value(u, node, 0);
    for (std::size_t k = 1; k < op.member_count(); ++k) {
        const double v = op.member_value(u, node, k);
        if (op.maximize() ? v > best_v : v < best_v) {
            best_v = v;
            best = k;
        }
    }
    return best;
}

Policy improve_policy(const InnerProblem& ip, const GridFunction& u) {
    const std::size_t count = static_cast<std::size_t>(ip.grid->node_count());
    Policy p;
    p.a.assign(count, 0);
    p.b.assign(count, 0);
    for (long node : ip.interior) {
        const NodeEquation& eq = ip.equations[static_cast<std::size_t>(node)];
        if (eq.s1 != 0.0 && ip.f1->member_count() > 1)
            p.a[static_cast<std::size_t>(node)] = improve_one(*ip.f1, u, node);
        if (eq.s2 != 0.0 && ip.f2->member_count() > 1)
            p.b[static_cast<std::size_t>(node)] = improve_one(*ip.f2, u, node);
    }
    return p;
}

// Assembles and solves the linear system for a frozen policy. Boundary values
// are taken from u and moved to the right-hand side.
void solve_frozen_policy(const InnerProblem& ip, const Policy& pol, GridFunction& u) {
    const long n = static_cast<long>(ip.interior.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 12);
    Eigen::VectorXd rhs(n);
    std::vector<std::pair<long, double>> row;

    for (long r = 0; r < n; ++r) {
        const long node = ip.interior[static_cast<std::size_t>(r)];
        const NodeEquation& eq = ip.equations[static_cast<std::size_t>(node)];
        double b = eq.target;
        const auto add_part = [&](const DiscreteOperator& op, std::size_t member, double scale) {
            bool fb = false;
            op.member_row(*ip.grid, node, member, row, fb);
            for (const auto& [idx, coeff] : row) {
                const long col = ip.interior_id[static_cast<std::size_t>(idx)];
                if (col >= 0)
                    triplets.emplace_back(static_cast<int>(r), static_cast<int>(col),
                                          scale * coeff);
                else
                    b -= scale * coeff * u[idx];
            }
        };
        if (eq.s1 != 0.0) add_part(*ip.f1, pol.a[static_cast<std::size_t>(node)], eq.s1);
        if (eq.s2 != 0.0) add_part(*ip.f2, pol.b[static_cast<std::size_t>(node)], eq.s2);
        if (eq.c0 != 0.0)
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(r), -eq.c0);
        rhs(r) = b;
    }

    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solver: singular linear system (monotone assembly violated)");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (long r = 0; r < n; ++r) u[ip.interior[static_cast<std::size_t>(r)]] = x(r);
}

// Howard iteration on the frozen node equations. Returns the iteration count.
int howard_inner(const InnerProblem& ip, GridFunction& u, int max_iters) {
    Policy pol = improve_policy(ip, u);
    int iters = 0;
    for (; iters < max_iters; ++iters) {
        solve_frozen_policy(ip, pol, u);
        Policy next = improve_policy(ip, u);
        if (next == pol) {
            ++iters;
            break;
        }
        pol = std::move(next);
    }
    return iters;
}

InnerProblem make_interior(const Grid& g) {
    InnerProblem ip;
    ip.grid = &g;
    const long count = g.node_count();
    ip.equations.resize(static_cast<std::size_t>(count));
    ip.interior_id.assign(static_cast<std::size_t>(count), -1);
    for (long i = 0; i < count; ++i) {
        if (g.is_boundary(i)) continue;
        ip.interior_id[static_cast<std::size_t>(i)] = static_cast<long>(ip.interior.size());
        ip.interior.push_back(i);
    }
    return ip;
}

std::uint64_t partition_hash(const PartitionState& p) {
    std::string bytes(p.labels.size(), '\0');
    for (std::size_t i = 0; i < p.labels.size(); ++i)
        bytes[i] = static_cast<char>(p.labels[i]);
    return fnv1a64(bytes);
}

GridFunction with_boundary_data(const Grid& g,
                                const std::function<double(const Point&)>& dirichlet) {
    GridFunction u(g);
    const long count = g.node_count();
    for (long i = 0; i < count; ++i)
        if (g.is_boundary(i)) u[i] = dirichlet(g.coords(i));
    return u;
}

}  // namespace

GridFunction residual_field(const GridFunction& u, const ProblemSpec& p,
                            const DiscreteOperator& f1h, const DiscreteOperator& f2h) {
    const double delta = p.resolved_delta();
    const AppliedField f1 = f1h.evaluate(u);
    const AppliedField f2 = f2h.evaluate(u);
    GridFunction r(u.grid);
    const long count = u.grid.node_count();
    for (long i = 0; i < count; ++i) {
        if (u.grid.is_boundary(i)) continue;
        const double v = u[i];
        if (v > delta) {
            r[i] = f1.values[i] - p.rhs;
        } else if (v < -delta) {
            r[i] = f2.values[i] - p.rhs;
        } else if (delta == 0.0) {
            r[i] = f1.values[i] - p.rhs;  // exact zeros take the F1 branch
        } else {
            const double s = (v + delta) / (2.0 * delta);
            r[i] = s * f1.values[i] + (1.0 - s) * f2.values[i] - p.rhs * std::abs(v) / delta;
        }
    }
    return r;
}

GridFunction residual_field(const GridFunction& u, const ProblemSpec& p,
                            const SolverConfig& cfg) {
    const StencilSet s = StencilSet::make(p.grid.dim(), cfg.stencil_k);
    const DiscreteOperator f1h = DiscreteOperator::build(p.f1, s, cfg.pucci_frames);
    const DiscreteOperator f2h = DiscreteOperator::build(p.f2, s, cfg.pucci_frames);
    return residual_field(u, p, f1h, f2h);
}

GridFunction howard_solve(const OperatorSpec& f, const GridFunction& rhs,
                          const std::function<double(const Point&)>& dirichlet,
                          const Grid& grid, const SolverConfig& cfg) {
    const StencilSet s = StencilSet::make(grid.dim(), cfg.stencil_k);
    const DiscreteOperator fh = DiscreteOperator::build(f, s, cfg.pucci_frames);
    InnerProblem ip = make_interior(grid);
    ip.f1 = &fh;
    ip.f2 = &fh;
    for (long node : ip.interior) {
        NodeEquation& eq = ip.equations[static_cast<std::size_t>(node)];
        eq.s1 = 1.0;
        eq.target = rhs[node];
    }
    GridFunction u = with_boundary_data(grid, dirichlet);
    howard_inner(ip, u, cfg.inner_max_iters);
    return u;
}

SolveResult solve(const ProblemSpec& p, const SolverConfig& cfg) {
    const Grid& g = p.grid;
    const double delta = p.resolved_delta();
    const StencilSet s = StencilSet::make(g.dim(), cfg.stencil_k);
    const DiscreteOperator f1h = DiscreteOperator::build(p.f1, s, cfg.pucci_frames);
    const DiscreteOperator f2h = DiscreteOperator::build(p.f2, s, cfg.pucci_frames);

    InnerProblem ip = make_interior(g);
    ip.f1 = &f1h;
    ip.f2 = &f2h;

    SolveResult result;
    result.delta_used = delta;

    // Initial iterate.
    GridFunction u = with_boundary_data(g, p.dirichlet);
    switch (cfg.initial_guess) {
        case InitialGuess::plus: {
            result.initial_guess_used = "plus";
            GridFunction f(g, 0.0);
            for (long node : ip.interior) f[node] = p.rhs;
            u = howard_solve(p.f1, f, p.dirichlet, g, cfg);
            break;
        }
        case InitialGuess::minus: {
            result.initial_guess_used = "minus";
            GridFunction f(g, 0.0);
            for (long node : ip.interior) f[node] = p.rhs;
            u = howard_solve(p.f2, f, p.dirichlet, g, cfg);
            break;
        }
        case InitialGuess::zero:
            result.initial_guess_used = "zero";
            break;
    }

    PartitionState part = update_partition(u, delta);
    std::vector<std::uint64_t> hash_history{partition_hash(part)};

    for (int outer = 1; outer <= cfg.outer_max_iters; ++outer) {
        result.outer_iters = outer;

        // Freeze the branch structure from the current partition and iterate.
        for (long node : ip.interior) {
            NodeEquation& eq = ip.equations[static_cast<std::size_t>(node)];
            const NodeLabel label = part.labels[static_cast<std::size_t>(node)];
            if (label == NodeLabel::plus || (label == NodeLabel::zero && delta == 0.0)) {
                eq = NodeEquation{1.0, 0.0, 0.0, p.rhs};
            } else if (label == NodeLabel::minus) {
                eq = NodeEquation{0.0, 1.0, 0.0, p.rhs};
            } else {
                const double v = u[node];
                const double sblend = std::clamp((v + delta) / (2.0 * delta), 0.0, 1.0);
                const double sigma = v >= 0.0 ? 1.0 : -1.0;
                eq = NodeEquation{sblend, 1.0 - sblend, sigma * p.rhs / delta, 0.0};
            }
        }

        result.inner_iters.push_back(howard_inner(ip, u, cfg.inner_max_iters));

        const GridFunction res = residual_field(u, p, f1h, f2h);
        const double res_norm = res.max_abs();
        result.residual_history.push_back(res_norm);

        PartitionState next = update_partition(u, delta);
        const std::uint64_t next_hash = partition_hash(next);

        if (next_hash == hash_history.back() && res_norm <= cfg.residual_tol) {
            result.converged = true;
            part = std::move(next);
            result.residual = res_norm;
            break;
        }

        // A/B/A oscillation: flip only the largest-|u| fraction of the
        // changed labels, keep the rest.
        if (hash_history.size() >= 2 && next_hash == hash_history[hash_history.size() - 2] &&
            next_hash != hash_history.back()) {
            std::vector<long> changed;
            for (long node : ip.interior)
                if (next.labels[static_cast<std::size_t>(node)] !=
                    part.labels[static_cast<std::size_t>(node)])
                    changed.push_back(node);
            std::sort(changed.begin(), changed.end(), [&](long lhs, long rhs) {
                return std::abs(u[lhs]) > std::abs(u[rhs]);
            });
            const std::size_t keep = static_cast<std::size_t>(
                std::ceil(cfg.damping * static_cast<double>(changed.size())));
            for (std::size_t i = keep; i < changed.size(); ++i)
                next.labels[static_cast<std::size_t>(changed[i])] =
                    part.labels[static_cast<std::size_t>(changed[i])];
        }

        part = std::move(next);
        hash_history.push_back(partition_hash(part));
        result.residual = res_norm;
    }

    result.u = std::move(u);
    result.partition = std::move(part);
    if (!result.converged)
        result.message = "outer iteration cap reached without partition stabilization";
    return result;
}

}  // namespace tlab
