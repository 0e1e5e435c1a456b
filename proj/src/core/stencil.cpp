#include "core/stencil.hpp"

#include <cmath>

namespace tlab {

namespace {

std::vector<MultiIndex> offsets_2d(int k) {
    // Levels: axes (2), + diagonals (4), + knight moves (8), + max-norm 3 (16).
    std::vector<MultiIndex> offs = {{1, 0, 0}, {0, 1, 0}};
    if (k <= 2) return offs;
    offs.push_back({1, 1, 0});
    offs.push_back({1, -1, 0});
    if (k <= 4) return offs;
    offs.push_back({2, 1, 0});
    offs.push_back({1, 2, 0});
    offs.push_back({2, -1, 0});
    offs.push_back({1, -2, 0});
    if (k <= 8) return offs;
    offs.push_back({3, 1, 0});
    offs.push_back({1, 3, 0});
    offs.push_back({3, -1, 0});
    offs.push_back({1, -3, 0});
    offs.push_back({3, 2, 0});
    offs.push_back({2, 3, 0});
    offs.push_back({3, -2, 0});
    offs.push_back({2, -3, 0});
    return offs;
}

std::vector<MultiIndex> offsets_3d(int k) {
    std::vector<MultiIndex> offs = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    if (k <= 3) return offs;
    offs.push_back({1, 1, 0});
    offs.push_back({1, -1, 0});
    offs.push_back({1, 0, 1});
    offs.push_back({1, 0, -1});
    offs.push_back({0, 1, 1});
    offs.push_back({0, 1, -1});
    if (k <= 9) return offs;
    offs.push_back({1, 1, 1});
    offs.push_back({1, 1, -1});
    offs.push_back({1, -1, 1});
    offs.push_back({1, -1, -1});
    return offs;
}

}  // namespace

StencilSet StencilSet::make(int dim, int k) {
    if (dim < 1 || dim > 3) throw invalid_input("StencilSet: dimension must be in {1,2,3}");
    if (k < 1) throw invalid_input("StencilSet: K must be >= 1");
    StencilSet s;
    s.dim = dim;
    if (dim == 1)
        s.offsets = {{1, 0, 0}};
    else if (dim == 2)
        s.offsets = offsets_2d(k);
    else
        s.offsets = offsets_3d(k);

    for (const auto& v : s.offsets) {
        double norm2 = 0.0;
        int reach = 0;
        for (int a = 0; a < dim; ++a) {
            norm2 += static_cast<double>(v[static_cast<std::size_t>(a)]) *
                     static_cast<double>(v[static_cast<std::size_t>(a)]);
            reach = std::max(reach, std::abs(v[static_cast<std::size_t>(a)]));
        }
        const double norm = std::sqrt(norm2);
        s.offset_norms.push_back(norm);
        Point dir{0, 0, 0};
        for (int a = 0; a < dim; ++a)
            dir[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)] / norm;
        s.unit_dirs.push_back(dir);
        s.max_reach = std::max(s.max_reach, reach);
    }
    return s;
}

double second_difference(const GridFunction& u, long node, const MultiIndex& offset) {
    const Grid& g = u.grid;
    const MultiIndex mi = g.multi_index(node);
    MultiIndex fwd = mi, bwd = mi;
    double norm2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        fwd[ia] += offset[ia];
        bwd[ia] -= offset[ia];
        norm2 += static_cast<double>(offset[ia]) * static_cast<double>(offset[ia]);
    }
    if (!g.contains(fwd) || !g.contains(bwd))
        throw out_of_domain("second_difference: offset leaves the grid");
    const double step2 = g.spacing() * g.spacing() * norm2;
    return (u[g.flat_index(fwd)] - 2.0 * u[node] + u[g.flat_index(bwd)]) / step2;
}

SymMatrix central_hessian(const GridFunction& u, long node) {
    const Grid& g = u.grid;
    const MultiIndex mi = g.multi_index(node);
    if (g.cells_from_boundary(mi) < 1)
        throw out_of_domain("central_hessian: node too close to the boundary");
    const double h = g.spacing();
    SymMatrix hess(g.dim());
    for (int a = 0; a < g.dim(); ++a) {
        MultiIndex off{0, 0, 0};
        off[static_cast<std::size_t>(a)] = 1;
        hess.set(a, a, second_difference(u, node, off));
        for (int b = 0; b < a; ++b) {
            MultiIndex pp = mi, pm = mi, mp = mi, mm = mi;
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            pp[ia] += 1; pp[ib] += 1;
            pm[ia] += 1; pm[ib] -= 1;
            mp[ia] -= 1; mp[ib] += 1;
            mm[ia] -= 1; mm[ib] -= 1;
            const double mixed = (u[g.flat_index(pp)] - u[g.flat_index(pm)] -
                                  u[g.flat_index(mp)] + u[g.flat_index(mm)]) /
                                 (4.0 * h * h);
            hess.set(a, b, mixed);
        }
    }
    return hess;
}

Eigen::VectorXd nonneg_least_squares(const Eigen::MatrixXd& e, const Eigen::VectorXd& b) {
    const Eigen::Index n = e.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, b.norm()) * std::max(1.0, e.norm());

    for (int iter = 0; iter < 3 * static_cast<int>(n) + 10; ++iter) {
        const Eigen::VectorXd w = e.transpose() * (b - e * x);
        // Most-improving inactive column; ties resolved by index order, which
        // keeps axis-first stencils deterministic.
        Eigen::Index best = -1;
        double wbest = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > wbest) {
                wbest = w(j);
                best = j;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < 3 * static_cast<int>(n) + 10; ++inner) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
            Eigen::MatrixXd ep(e.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c) ep.col(static_cast<Eigen::Index>(c)) = e.col(idx[c]);
            const Eigen::VectorXd z = ep.colPivHouseholderQr().solve(b);

            double alpha = 1.0;
            bool feasible = true;
            for (std::size_t c = 0; c < idx.size(); ++c) {
                if (z(static_cast<Eigen::Index>(c)) <= 0.0) {
                    feasible = false;
                    const double xc = x(idx[c]);
                    const double denom = xc - z(static_cast<Eigen::Index>(c));
                    if (denom > 0.0) alpha = std::min(alpha, xc / denom);
                }
            }
            if (feasible) {
                x.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c]) = z(static_cast<Eigen::Index>(c));
                break;
            }
            for (std::size_t c = 0; c < idx.size(); ++c)
                x(idx[c]) += alpha * (z(static_cast<Eigen::Index>(c)) - x(idx[c]));
            for (std::size_t c = 0; c < idx.size(); ++c) {
                if (x(idx[c]) <= tol) {
                    x(idx[c]) = 0.0;
                    passive[static_cast<std::size_t>(idx[c])] = false;
                }
            }
        }
    }
    return x;
}

DirectionalDecomposition decompose_positive(const SymMatrix& a, const StencilSet& s) {
    if (a.dim() != s.dim) throw invalid_input("decompose_positive: dimension mismatch");
    const auto ev = a.eigenvalues();
    if (ev.front() < -1e-10 * std::max(1.0, a.frobenius_norm()))
        throw invalid_input("decompose_positive: matrix is not positive semidefinite");

    // Frobenius inner product preserved by weighting off-diagonal rows by
    // sqrt(2) in the vectorization.
    const int d = s.dim;
    const int rows = d * (d + 1) / 2;
    const auto vectorize = [&](const SymMatrix& m, Eigen::VectorXd& out) {
        int r = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j)
                out(r++) = (i == j) ? m.at(i, j) : std::sqrt(2.0) * m.at(i, j);
    };

    Eigen::MatrixXd e(rows, static_cast<Eigen::Index>(s.offsets.size()));
    Eigen::VectorXd col(rows);
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        std::vector<double> dir(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) dir[static_cast<std::size_t>(i)] = s.unit_dirs[k][static_cast<std::size_t>(i)];
        vectorize(SymMatrix::outer(dir), col);
        e.col(static_cast<Eigen::Index>(k)) = col;
    }
    Eigen::VectorXd b(rows);
    vectorize(a, b);

    DirectionalDecomposition dec;
    const Eigen::VectorXd beta = nonneg_least_squares(e, b);
    dec.beta.assign(beta.data(), beta.data() + beta.size());
    dec.residual = (e * beta - b).norm();

    // Axis-only weights are the diagonal entries (nonnegative for PSD A);
    // whatever is off-diagonal becomes the fallback residual.
    dec.beta_axis.resize(static_cast<std::size_t>(d));
    double off2 = 0.0;
    for (int i = 0; i < d; ++i) {
        dec.beta_axis[static_cast<std::size_t>(i)] = std::max(0.0, a.at(i, i));
        for (int j = 0; j < d; ++j)
            if (i != j) off2 += a.at(i, j) * a.at(i, j);
    }
    dec.residual_axis = std::sqrt(off2);
    return dec;
}

AppliedField apply_linear_operator(const DirectionalDecomposition& dec, const StencilSet& s,
                                   const GridFunction& u) {
    AppliedField out;
    out.values = GridFunction(u.grid);
    const Grid& g = u.grid;
    const long count = g.node_count();
    for (long node = 0; node < count; ++node) {
        const MultiIndex mi = g.multi_index(node);
        const int margin = g.cells_from_boundary(mi);
        if (margin < 1) continue;
        if (margin >= s.max_reach) {
            double sum = 0.0;
            for (std::size_t k = 0; k < s.offsets.size(); ++k) {
                if (dec.beta[k] == 0.0) continue;
                sum += dec.beta[k] * second_difference(u, node, s.offsets[k]);
            }
            out.values[node] = sum;
        } else {
            double sum = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                MultiIndex off{0, 0, 0};
                off[static_cast<std::size_t>(a)] = 1;
                sum += dec.beta_axis[static_cast<std::size_t>(a)] * second_difference(u, node, off);
            }
            out.values[node] = sum;
            out.fallback_nodes.push_back(node);
        }
    }
    return out;
}

}  // namespace tlab
