#include "core/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tlab {

namespace {

constexpr double kSpectrumTol = 1e-9;

void require_spectrum_within(const SymMatrix& a, const EllipticityBounds& b,
                             const char* what) {
    const auto ev = a.eigenvalues();
    if (ev.front() < b.lambda - kSpectrumTol || ev.back() > b.Lambda + kSpectrumTol)
        throw invalid_input(std::string(what) + ": spectrum outside [lambda, Lambda]");
}

}  // namespace

void validate(const EllipticityBounds& b) {
    if (!(b.lambda > 0.0) || !(b.Lambda >= b.lambda) || !std::isfinite(b.Lambda))
        throw invalid_input("EllipticityBounds: need 0 < lambda <= Lambda");
}

BellmanFamily make_bellman_family(const EllipticityBounds& bounds,
                                  std::vector<SymMatrix> matrices) {
    validate(bounds);
    if (matrices.empty()) throw invalid_input("BellmanFamily: family must be non-empty");
    const int dim = matrices.front().dim();
    for (const auto& a : matrices) {
        if (a.dim() != dim) throw invalid_input("BellmanFamily: mixed dimensions");
        require_spectrum_within(a, bounds, "BellmanFamily");
    }
    return BellmanFamily{bounds, std::move(matrices)};
}

OperatorSpec OperatorSpec::make_pucci_plus(const EllipticityBounds& b) {
    validate(b);
    OperatorSpec op;
    op.kind_ = OperatorKind::pucci_plus;
    op.bounds_ = b;
    return op;
}

OperatorSpec OperatorSpec::make_pucci_minus(const EllipticityBounds& b) {
    validate(b);
    OperatorSpec op;
    op.kind_ = OperatorKind::pucci_minus;
    op.bounds_ = b;
    return op;
}

OperatorSpec OperatorSpec::make_bellman(BellmanFamily family) {
    validate(family.bounds);
    if (family.matrices.empty()) throw invalid_input("OperatorSpec: empty Bellman family");
    OperatorSpec op;
    op.kind_ = OperatorKind::bellman;
    op.bounds_ = family.bounds;
    op.members_ = std::move(family.matrices);
    return op;
}

OperatorSpec OperatorSpec::make_bellman_unchecked(BellmanFamily family) {
    OperatorSpec op;
    op.kind_ = OperatorKind::bellman;
    op.bounds_ = family.bounds;
    op.members_ = std::move(family.matrices);
    return op;
}

OperatorSpec OperatorSpec::make_linear(const SymMatrix& a, const EllipticityBounds& b) {
    validate(b);
    require_spectrum_within(a, b, "OperatorSpec::make_linear");
    OperatorSpec op;
    op.kind_ = OperatorKind::linear;
    op.bounds_ = b;
    op.members_ = {a};
    return op;
}

std::string OperatorSpec::label() const {
    switch (kind_) {
        case OperatorKind::pucci_plus: return "pucci_plus";
        case OperatorKind::pucci_minus: return "pucci_minus";
        case OperatorKind::bellman: return "bellman";
        case OperatorKind::linear: return "linear";
    }
    return "unknown";
}

double pucci_plus(const SymMatrix& m, const EllipticityBounds& b) {
    validate(b);
    double value = 0.0;
    for (double e : m.eigenvalues()) value += e > 0.0 ? b.Lambda * e : b.lambda * e;
    return value;
}

double pucci_minus(const SymMatrix& m, const EllipticityBounds& b) {
    validate(b);
    double value = 0.0;
    for (double e : m.eigenvalues()) value += e > 0.0 ? b.lambda * e : b.Lambda * e;
    return value;
}

double evaluate(const OperatorSpec& op, const SymMatrix& m) {
    switch (op.kind()) {
        case OperatorKind::pucci_plus: return pucci_plus(m, op.bounds());
        case OperatorKind::pucci_minus: return pucci_minus(m, op.bounds());
        case OperatorKind::linear:
        case OperatorKind::bellman: {
            if (op.members().front().dim() != m.dim())
                throw invalid_input("evaluate: dimension mismatch");
            double best = op.members().front().trace_product(m);
            for (std::size_t k = 1; k < op.members().size(); ++k)
                best = std::max(best, op.members()[k].trace_product(m));
            return best;
        }
    }
    throw invalid_input("evaluate: unknown operator kind");
}

double evaluate_min_variant(const OperatorSpec& op, const SymMatrix& m) {
    switch (op.kind()) {
        case OperatorKind::pucci_plus: return pucci_minus(m, op.bounds());
        case OperatorKind::pucci_minus: return pucci_plus(m, op.bounds());
        case OperatorKind::linear:
        case OperatorKind::bellman: {
            if (op.members().front().dim() != m.dim())
                throw invalid_input("evaluate_min_variant: dimension mismatch");
            double worst = op.members().front().trace_product(m);
            for (std::size_t k = 1; k < op.members().size(); ++k)
                worst = std::min(worst, op.members()[k].trace_product(m));
            return worst;
        }
    }
    throw invalid_input("evaluate_min_variant: unknown operator kind");
}

BellmanFamily pucci_bellman_family(const EllipticityBounds& b, int frames, int dim,
                                   bool* axis_fallback) {
    validate(b);
    if (frames < 1) throw invalid_input("pucci_bellman_family: frames must be >= 1");
    if (dim < 1) throw invalid_input("pucci_bellman_family: dimension must be >= 1");
    if (axis_fallback) *axis_fallback = (dim != 2);

    std::vector<SymMatrix> members;
    const int patterns = 1 << dim;
    if (dim == 2) {
        constexpr double half_pi = 1.5707963267948966;
        for (int k = 0; k < frames; ++k) {
            const double theta = static_cast<double>(k) * half_pi / frames;
            const double c = std::cos(theta), s = std::sin(theta);
            for (int p = 0; p < patterns; ++p) {
                const double s0 = (p & 1) ? b.Lambda : b.lambda;
                const double s1 = (p & 2) ? b.Lambda : b.lambda;
                // R^T diag(s0, s1) R with R the rotation by theta
                SymMatrix a(2);
                a.set(0, 0, s0 * c * c + s1 * s * s);
                a.set(1, 1, s0 * s * s + s1 * c * c);
                a.set(1, 0, (s0 - s1) * c * s);
                members.push_back(a);
            }
        }
    } else {
        // Axis-aligned frame only; the rotated enumeration is 2-D specific.
        for (int p = 0; p < patterns; ++p) {
            SymMatrix a(dim);
            for (int i = 0; i < dim; ++i)
                a.set(i, i, (p >> i) & 1 ? b.Lambda : b.lambda);
            members.push_back(a);
        }
    }
    return BellmanFamily{b, std::move(members)};
}

SymMatrix random_symmetric(Rng& rng, int dim, double scale) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) m.set(i, j, rng.uniform(-scale, scale));
    return m;
}

SymMatrix random_psd(Rng& rng, int dim, double scale) {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
    Eigen::MatrixXd a = scale * (g.transpose() * g) / dim;
    return SymMatrix::from_dense(a);
}

SymMatrix random_with_spectrum(Rng& rng, int dim, double lo, double hi) {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = rng.uniform(lo, hi);
    return SymMatrix::from_dense(q * d.asDiagonal() * q.transpose());
}

EllipticityCheckResult check_uniform_ellipticity(const OperatorSpec& op, int samples,
                                                 std::uint64_t seed) {
    if (samples < 1) throw invalid_input("check_uniform_ellipticity: samples must be >= 1");
    const int dim = op.members().empty() ? 2 : op.members().front().dim();
    Rng rng(seed);
    EllipticityCheckResult result;
    result.samples = samples;
    result.worst_lower_margin = std::numeric_limits<double>::infinity();
    result.worst_upper_margin = std::numeric_limits<double>::infinity();
    const double tol = 1e-10;
    result.pass = true;
    for (int s = 0; s < samples; ++s) {
        const SymMatrix m = random_symmetric(rng, dim, 2.0);
        const SymMatrix n = random_psd(rng, dim, 1.0);
        const double increment = evaluate(op, m + n) - evaluate(op, m);
        const double tr = n.trace();
        const double lower = increment - op.bounds().lambda * tr;
        const double upper = op.bounds().Lambda * tr - increment;
        result.worst_lower_margin = std::min(result.worst_lower_margin, lower);
        result.worst_upper_margin = std::min(result.worst_upper_margin, upper);
        if (lower < -tol || upper < -tol) result.pass = false;
    }
    return result;
}

HomogeneityCheckResult check_homogeneity(const OperatorSpec& op, int samples,
                                         std::uint64_t seed) {
    if (samples < 1) throw invalid_input("check_homogeneity: samples must be >= 1");
    const int dim = op.members().empty() ? 2 : op.members().front().dim();
    Rng rng(seed);
    HomogeneityCheckResult result;
    result.samples = samples;
    result.pass = true;
    result.negative_tau_min_variant = true;
    for (int s = 0; s < samples; ++s) {
        const SymMatrix m = random_symmetric(rng, dim, 2.0);
        const double value = evaluate(op, m);
        const double tau_pos = rng.uniform(0.0, 10.0);
        const double scaled = evaluate(op, m * tau_pos);
        const double err = std::abs(scaled - tau_pos * value);
        result.worst_error = std::max(result.worst_error, err);
        if (err > 1e-12 * (1.0 + std::abs(tau_pos * value))) result.pass = false;

        const double tau_neg = -rng.uniform(0.1, 10.0);
        const double scaled_neg = evaluate(op, m * tau_neg);
        const double expected = tau_neg * evaluate_min_variant(op, m);
        if (std::abs(scaled_neg - expected) > 1e-12 * (1.0 + std::abs(expected)))
            result.negative_tau_min_variant = false;
    }
    // F(0) = 0 normalization rides along.
    if (std::abs(evaluate(op, SymMatrix(dim))) > 1e-12) result.pass = false;
    return result;
}

GammaResult half_space_gamma(const OperatorSpec& op, int dim) {
    validate(op.bounds());
    if (dim < 1) throw invalid_input("half_space_gamma: dimension must be >= 1");
    const auto g = [&](double gamma) {
        SymMatrix m(dim);
        m.set(0, 0, gamma);
        return evaluate(op, m);
    };
    double lo = 1.0 / (2.0 * op.bounds().Lambda);
    double hi = 2.0 / op.bounds().lambda;
    double glo = g(lo) - 1.0;
    double ghi = g(hi) - 1.0;
    if (glo > 0.0 || ghi < 0.0)
        throw invalid_input("half_space_gamma: no sign change on bracket (operator not elliptic?)");

    GammaResult result;
    double mid = 0.5 * (lo + hi), gmid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        gmid = g(mid) - 1.0;
        ++result.iterations;
        if (std::abs(gmid) <= 1e-12) break;
        if (gmid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    result.gamma = mid;
    result.equation_value = gmid + 1.0;
    const double eps = 1e-9;
    result.at_lower_endpoint = std::abs(mid - 1.0 / op.bounds().Lambda) <= eps;
    result.at_upper_endpoint = std::abs(mid - 1.0 / op.bounds().lambda) <= eps;
    return result;
}

}  // namespace tlab
