#include "core/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tlab {

Grid::Grid(int dim, const Point& lower, const Point& upper, int nodes_per_axis)
    : dim_(dim), lower_(lower), upper_(upper), n_(nodes_per_axis) {
    if (dim < 1 || dim > 3) throw invalid_input("Grid: dimension must be in {1,2,3}");
    if (n_ < 3) throw invalid_input("Grid: need at least 3 nodes per axis");
    h_ = (upper[0] - lower[0]) / static_cast<double>(n_ - 1);
    if (!(h_ > 0.0)) throw invalid_input("Grid: box must have positive extent");
    for (int a = 1; a < dim_; ++a) {
        const double ha = (upper[static_cast<std::size_t>(a)] - lower[static_cast<std::size_t>(a)]) /
                          static_cast<double>(n_ - 1);
        if (std::abs(ha - h_) > 1e-12 * std::abs(h_))
            throw invalid_input("Grid: box sides must give equal spacing on every axis");
    }
}

double Grid::diameter() const {
    double sum = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double side = upper_[static_cast<std::size_t>(a)] - lower_[static_cast<std::size_t>(a)];
        sum += side * side;
    }
    return std::sqrt(sum);
}

bool Grid::operator==(const Grid& o) const {
    if (dim_ != o.dim_ || n_ != o.n_) return false;
    for (int a = 0; a < dim_; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        if (std::abs(lower_[ia] - o.lower_[ia]) > 1e-12) return false;
        if (std::abs(upper_[ia] - o.upper_[ia]) > 1e-12) return false;
    }
    return true;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& f) {
    GridFunction gf(grid);
    const long count = grid.node_count();
    for (long i = 0; i < count; ++i) gf[i] = f(grid.coords(i));
    return gf;
}

void write_field_csv(const std::string& path, const GridFunction& gf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("write_field_csv: cannot open " + path);
    for (int a = 0; a < gf.grid.dim(); ++a) out << "x" << (a + 1) << ",";
    out << "u\n";
    const long count = gf.grid.node_count();
    for (long i = 0; i < count; ++i) {
        const Point x = gf.grid.coords(i);
        for (int a = 0; a < gf.grid.dim(); ++a)
            out << format_g17(x[static_cast<std::size_t>(a)]) << ",";
        out << format_g17(gf[i]) << "\n";
    }
}

GridFunction read_field_csv(const std::string& path, const Grid& expected) {
    std::ifstream in(path);
    if (!in) throw invalid_input("read_field_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw invalid_input("read_field_csv: empty file");

    GridFunction gf(expected);
    const long count = expected.node_count();
    const double coord_tol = 1e-9 * std::max(1.0, expected.diameter());
    const auto parse_cell = [](const std::string& cell) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || (end && *end != '\0' && *end != '\r'))
            throw invalid_input("read_field_csv: non-numeric cell \"" + cell + "\"");
        return v;
    };
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= count) throw invalid_input("read_field_csv: more rows than grid nodes");
        std::stringstream ss(line);
        std::string cell;
        const Point x = expected.coords(row);
        for (int a = 0; a < expected.dim(); ++a) {
            if (!std::getline(ss, cell, ','))
                throw invalid_input("read_field_csv: missing coordinate column");
            if (std::abs(parse_cell(cell) - x[static_cast<std::size_t>(a)]) > coord_tol)
                throw invalid_input("read_field_csv: node coordinates do not match the grid");
        }
        if (!std::getline(ss, cell, ','))
            throw invalid_input("read_field_csv: missing value column");
        const double u = parse_cell(cell);
        if (!std::isfinite(u)) throw invalid_input("read_field_csv: non-finite value");
        gf[row] = u;
        ++row;
    }
    if (row != count) throw invalid_input("read_field_csv: node count does not match the grid");
    return gf;
}

}  // namespace tlab
