#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "frenet/linalg.hpp"

// Shared numerical integration: adaptive 1-D Gauss-Kronrod, region integrals
// driven by a membership test, and sphere integrals. All paths are
// deterministic; stochastic rules run from a fixed seed.

namespace frenet::quadrature {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic splitmix64 generator. Used instead of <random> distributions
// so results are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = kDefaultSeed) : state_(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box-Muller.
    double gaussian();

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Adaptive Gauss-Kronrod 7-15 with interval bisection until the local error
// estimate is at or below tol * width / (b - a). Throws QuadratureError when
// the subdivision depth exceeds 40.
QuadratureResult integrate_1d(const std::function<double(double)>& fn, double a, double b,
                              double tol = 1e-10);

// Axis-aligned box.
struct Box {
    Vec lo, hi;
    std::size_t dim() const { return lo.size(); }
};

// A region given by a membership test over a finite bounding box.
struct Region {
    std::size_t dim;
    std::function<bool(const Vec&)> contains;
    Box bbox;
};

enum class RegionMethod { Grid, MonteCarlo };

struct RegionOptions {
    RegionMethod method = RegionMethod::Grid;
    // Grid: resolution of the outer tensor grid (per axis). The extent along
    // the last axis is resolved per column by scanning for membership
    // transitions and bisecting each one; a second pass at twice the
    // resolution feeds a Richardson extrapolation.
    int grid_resolution = 256;
    // Monte Carlo: sample count and seed. The reported error is a 99%
    // confidence half-width (2.576 sigma / sqrt(N)).
    long samples = 200000;
    std::uint64_t seed = kDefaultSeed;
};

QuadratureResult integrate_region(const Region& region,
                                  const std::function<double(const Vec&)>& integrand,
                                  const RegionOptions& opts = {});

struct SphereOptions {
    int nodes = 256;        // trapezoid nodes on S^1, azimuth nodes on S^2
    int polar_nodes = 64;   // Gauss-Legendre nodes in the polar direction (S^2)
    long mc_samples = 400000;
    std::uint64_t seed = kDefaultSeed;
};

// Integral over the unit sphere S^{n-1} in R^n. Product rules for n-1 = 1, 2;
// seeded Monte Carlo (normalized Gaussians) otherwise.
QuadratureResult integrate_sphere(int n_minus_1,
                                  const std::function<double(const Vec&)>& integrand,
                                  const SphereOptions& opts = {});

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre recurrence. Deterministic; cached internally.
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

}  // namespace frenet::quadrature
