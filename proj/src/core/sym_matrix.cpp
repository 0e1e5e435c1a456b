#include "core/sym_matrix.hpp"

#include <cmath>

namespace tlab {

SymMatrix SymMatrix::outer(const std::vector<double>& v) {
    SymMatrix m(static_cast<int>(v.size()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j <= i; ++j)
            m.set(i, j, v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)]);
    return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw invalid_input("SymMatrix::from_dense: matrix must be square");
    SymMatrix m(static_cast<int>(a.rows()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j <= i; ++j)
            m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return m;
}

double SymMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) sum += at(i, j) * at(i, j);
    return std::sqrt(sum);
}

std::vector<double> SymMatrix::eigenvalues() const {
    for (double v : packed_)
        if (!std::isfinite(v)) throw invalid_input("SymMatrix: non-finite entry");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw invalid_input("SymMatrix: eigenvalue computation failed");
    const auto& ev = solver.eigenvalues();  // ascending
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double SymMatrix::trace_product(const SymMatrix& other) const {
    if (other.dim_ != dim_) throw invalid_input("SymMatrix: dimension mismatch");
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) sum += at(i, j) * other.at(j, i);
    return sum;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
    Eigen::MatrixXd a(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) a(i, j) = at(i, j);
    return a;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (o.dim_ != dim_) throw invalid_input("SymMatrix: dimension mismatch");
    SymMatrix r(dim_);
    for (std::size_t k = 0; k < packed_.size(); ++k) r.packed_[k] = packed_[k] + o.packed_[k];
    return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
    if (o.dim_ != dim_) throw invalid_input("SymMatrix: dimension mismatch");
    SymMatrix r(dim_);
    for (std::size_t k = 0; k < packed_.size(); ++k) r.packed_[k] = packed_[k] - o.packed_[k];
    return r;
}

SymMatrix SymMatrix::operator*(double s) const {
    SymMatrix r(dim_);
    for (std::size_t k = 0; k < packed_.size(); ++k) r.packed_[k] = packed_[k] * s;
    return r;
}

}  // namespace tlab
