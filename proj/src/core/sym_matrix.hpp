#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "core/util.hpp"

namespace tlab {

/// Symmetric d x d matrix with packed lower-triangular storage, so symmetry
/// holds by construction. Entries live on the second-derivative scale.
class SymMatrix {
public:
    explicit SymMatrix(int dim) : dim_(dim), packed_(packed_size(dim), 0.0) {
        if (dim < 1) throw invalid_input("SymMatrix: dimension must be >= 1");
    }

    static SymMatrix identity(int dim) {
        SymMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
        return m;
    }

    static SymMatrix diagonal(std::initializer_list<double> d) {
        return diagonal(std::vector<double>(d));
    }

    /// Rank-one matrix v v^T.
    static SymMatrix outer(const std::vector<double>& v);

    static SymMatrix from_dense(const Eigen::MatrixXd& a);

    int dim() const { return dim_; }

    double at(int i, int j) const { return packed_[pos(i, j)]; }
    void set(int i, int j, double v) { packed_[pos(i, j)] = v; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    double frobenius_norm() const;

    /// Eigenvalues sorted ascending. Throws invalid_input on non-finite entries.
    std::vector<double> eigenvalues() const;

    /// tr(A * M) for symmetric A, M of equal dimension.
    double trace_product(const SymMatrix& other) const;

    Eigen::MatrixXd to_dense() const;

    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-(const SymMatrix& o) const;
    SymMatrix operator*(double s) const;
    SymMatrix operator-() const { return *this * -1.0; }

private:
    static std::size_t packed_size(int dim) {
        return static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2;
    }

    std::size_t pos(int i, int j) const {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
            throw invalid_input("SymMatrix: index out of range");
        if (i < j) std::swap(i, j);
        // row-major packed lower triangle
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 +
               static_cast<std::size_t>(j);
    }

    int dim_;
    std::vector<double> packed_;
};

}  // namespace tlab
