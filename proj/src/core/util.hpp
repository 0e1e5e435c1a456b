#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace tlab {

/// Raised when an argument violates a documented precondition.
class invalid_input : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a stencil offset or sampling ball leaves the grid.
class out_of_domain : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

/// FNV-1a 64-bit hash, used for config fingerprints in run manifests.
std::uint64_t fnv1a64(const std::string& text);

/// Deterministic random source for sampling-based checks. The raw engine is
/// used directly (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    double normal() {
        // Box-Muller; consumes two draws per pair, caches the second.
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(0.0, 1.0);
        while (u1 <= 1e-300) u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = rad * std::sin(two_pi * u2);
        has_spare_ = true;
        return rad * std::cos(two_pi * u2);
    }

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tlab
