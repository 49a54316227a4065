#include "frenet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace frenet::quadrature {

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {

// Kronrod 15 / Gauss 7 abscissae and weights (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
    double value;
    double error;
};

GkEstimate gk15(const std::function<double(double)>& fn, double a, double b, long& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = fn(center);
    double resk = kWgk[7] * f0;
    double resg = kWg[3] * f0;
    for (int i = 0; i < 7; ++i) {
        double x = half * kXgk[i];
        double fsum = fn(center - x) + fn(center + x);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    evals += 15;
    return {resk * half, std::abs((resk - resg) * half)};
}

void adapt(const std::function<double(double)>& fn, double a, double b, double tol_per_width,
           int depth, KahanSum& value, KahanSum& error, long& evals) {
    if (depth > 40)
        throw QuadratureError("integrate_1d: subdivision depth exceeded at x = " +
                              std::to_string(0.5 * (a + b)));
    GkEstimate est = gk15(fn, a, b, evals);
    if (est.error <= tol_per_width * (b - a) || b - a < 1e-15 * std::abs(a) + 1e-305) {
        value.add(est.value);
        error.add(est.error);
        return;
    }
    double mid = 0.5 * (a + b);
    adapt(fn, a, mid, tol_per_width, depth + 1, value, error, evals);
    adapt(fn, mid, b, tol_per_width, depth + 1, value, error, evals);
}

}  // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& fn, double a, double b,
                              double tol) {
    if (!(a <= b)) throw std::invalid_argument("integrate_1d: requires a <= b");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_1d: requires tol > 0");
    QuadratureResult out;
    if (a == b) {
        out.evaluations = 1;
        return out;
    }
    KahanSum value, error;
    long evals = 0;
    adapt(fn, a, b, tol / (b - a), 0, value, error, evals);
    out.value = value.value();
    out.error_estimate = error.value();
    out.evaluations = evals;
    return out;
}

// ---------------------------------------------------------------------------
// Region integration
// ---------------------------------------------------------------------------

namespace {

// Membership transitions along one column (fixed outer point, last axis
// scanned). Returns the inside intervals with boundaries bisected to ~1e-13
// of the axis extent.
std::vector<std::pair<double, double>> column_intervals(const Region& region, const Vec& outer,
                                                        int scan, long& evals) {
    const std::size_t d = region.dim;
    const double lo = region.bbox.lo[d - 1];
    const double hi = region.bbox.hi[d - 1];
    Vec p(d);
    for (std::size_t k = 0; k + 1 < d; ++k) p[k] = outer[k];

    auto inside = [&](double z) {
        p[d - 1] = z;
        ++evals;
        return region.contains(p);
    };
    auto refine = [&](double a, double b, bool a_in) {
        for (int it = 0; it < 45; ++it) {
            double m = 0.5 * (a + b);
            if (inside(m) == a_in)
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };

    std::vector<std::pair<double, double>> intervals;
    double step = (hi - lo) / scan;
    bool prev = inside(lo);
    double open = prev ? lo : 0.0;
    double prev_z = lo;
    for (int i = 1; i <= scan; ++i) {
        double z = (i == scan) ? hi : lo + i * step;
        bool cur = inside(z);
        if (cur != prev) {
            double boundary = refine(prev_z, z, prev);
            if (prev)
                intervals.emplace_back(open, boundary);
            else
                open = boundary;
        }
        prev = cur;
        prev_z = z;
    }
    if (prev) intervals.emplace_back(open, hi);
    return intervals;
}

double grid_pass(const Region& region, const std::function<double(const Vec&)>& integrand,
                 int res, long& evals) {
    const std::size_t d = region.dim;
    const auto& gl = gauss_legendre(8);

    if (d == 1) {
        Vec dummy;
        auto intervals = column_intervals(region, dummy, res, evals);
        KahanSum sum;
        Vec p(1);
        for (auto [a, b] : intervals) {
            double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (auto [x, w] : gl) {
                p[0] = c + h * x;
                ++evals;
                sum.add(w * h * integrand(p));
            }
        }
        return sum.value();
    }

    // Midpoint tensor grid over the first d-1 axes; the last axis is resolved
    // exactly per column.
    std::vector<int> idx(d - 1, 0);
    Vec outer(d - 1);
    Vec p(d);
    double cell = 1.0;
    std::vector<double> step(d - 1);
    for (std::size_t k = 0; k + 1 < d; ++k) {
        step[k] = (region.bbox.hi[k] - region.bbox.lo[k]) / res;
        cell *= step[k];
    }
    KahanSum sum;
    bool done = false;
    while (!done) {
        for (std::size_t k = 0; k + 1 < d; ++k)
            outer[k] = region.bbox.lo[k] + (idx[k] + 0.5) * step[k];
        auto intervals = column_intervals(region, outer, res, evals);
        for (std::size_t k = 0; k + 1 < d; ++k) p[k] = outer[k];
        for (auto [a, b] : intervals) {
            double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (auto [x, w] : gl) {
                p[d - 1] = c + h * x;
                ++evals;
                sum.add(w * h * integrand(p) * cell);
            }
        }
        // Advance the multi-index.
        done = true;
        for (std::size_t k = 0; k + 1 < d; ++k) {
            if (++idx[k] < res) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
    }
    return sum.value();
}

}  // namespace

QuadratureResult integrate_region(const Region& region,
                                  const std::function<double(const Vec&)>& integrand,
                                  const RegionOptions& opts) {
    if (region.dim == 0 || region.bbox.lo.size() != region.dim ||
        region.bbox.hi.size() != region.dim)
        throw std::invalid_argument("integrate_region: bad region");
    for (std::size_t k = 0; k < region.dim; ++k) {
        if (!std::isfinite(region.bbox.lo[k]) || !std::isfinite(region.bbox.hi[k]) ||
            region.bbox.lo[k] >= region.bbox.hi[k])
            throw std::invalid_argument("integrate_region: bbox must be finite and nonempty");
    }

    QuadratureResult out;
    if (opts.method == RegionMethod::Grid) {
        long evals = 0;
        double coarse = grid_pass(region, integrand, opts.grid_resolution, evals);
        double fine = grid_pass(region, integrand, 2 * opts.grid_resolution, evals);
        // Midpoint rule on the outer grid has O(h^2) error.
        out.value = fine + (fine - coarse) / 3.0;
        out.error_estimate = std::abs(fine - coarse) / 3.0;
        out.evaluations = evals;
        return out;
    }

    Rng rng(opts.seed);
    double box_vol = 1.0;
    for (std::size_t k = 0; k < region.dim; ++k)
        box_vol *= region.bbox.hi[k] - region.bbox.lo[k];
    KahanSum sum, sumsq;
    long accepted = 0;
    Vec p(region.dim);
    for (long i = 0; i < opts.samples; ++i) {
        for (std::size_t k = 0; k < region.dim; ++k)
            p[k] = rng.uniform(region.bbox.lo[k], region.bbox.hi[k]);
        double v = 0.0;
        if (region.contains(p)) {
            v = integrand(p);
            ++accepted;
        }
        sum.add(v);
        sumsq.add(v * v);
    }
    if (accepted == 0) throw QuadratureError("integrate_region: no samples inside region");
    const double n = static_cast<double>(opts.samples);
    double mean = sum.value() / n;
    double var = std::max(0.0, sumsq.value() / n - mean * mean);
    out.value = box_vol * mean;
    // 99% confidence half-width, so the reported error brackets the true
    // error in (nearly) every seeded run.
    out.error_estimate = 2.576 * box_vol * std::sqrt(var / n);
    out.evaluations = opts.samples;
    return out;
}

// ---------------------------------------------------------------------------
// Sphere integration
// ---------------------------------------------------------------------------

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::pair<double, double>> nw(n);
    const double pi = 3.141592653589793238462643383279502884;
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nw[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    std::sort(nw.begin(), nw.end());
    return cache.emplace(n, std::move(nw)).first->second;
}

QuadratureResult integrate_sphere(int n_minus_1,
                                  const std::function<double(const Vec&)>& integrand,
                                  const SphereOptions& opts) {
    if (n_minus_1 < 1) throw std::invalid_argument("integrate_sphere: n-1 must be >= 1");
    const double pi = 3.141592653589793238462643383279502884;
    QuadratureResult out;

    if (n_minus_1 == 1) {
        // Periodic trapezoid: spectrally accurate on smooth integrands.
        KahanSum sum;
        Vec p(2);
        double h = 2.0 * pi / opts.nodes;
        for (int i = 0; i < opts.nodes; ++i) {
            double u = i * h;
            p[0] = std::cos(u);
            p[1] = std::sin(u);
            sum.add(integrand(p));
        }
        out.value = sum.value() * h;
        out.evaluations = opts.nodes;
        return out;
    }

    if (n_minus_1 == 2) {
        // dS = du dpsi with u = cos(polar angle): Gauss-Legendre in u,
        // trapezoid in azimuth.
        const auto& gl = gauss_legendre(opts.polar_nodes);
        KahanSum sum;
        Vec p(3);
        double h = 2.0 * pi / opts.nodes;
        for (auto [u, w] : gl) {
            double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            KahanSum ring;
            for (int i = 0; i < opts.nodes; ++i) {
                double psi = i * h;
                p[0] = u;
                p[1] = s * std::cos(psi);
                p[2] = s * std::sin(psi);
                ring.add(integrand(p));
            }
            sum.add(w * ring.value() * h);
        }
        out.value = sum.value();
        out.evaluations = static_cast<long>(opts.polar_nodes) * opts.nodes;
        return out;
    }

    // General dimension: Monte Carlo over normalized Gaussian directions.
    Rng rng(opts.seed);
    const int n = n_minus_1 + 1;
    KahanSum sum, sumsq;
    Vec p(n);
    for (long i = 0; i < opts.mc_samples; ++i) {
        double nrm2 = 0.0;
        for (int k = 0; k < n; ++k) {
            p[k] = rng.gaussian();
            nrm2 += p[k] * p[k];
        }
        double inv = 1.0 / std::sqrt(nrm2);
        for (int k = 0; k < n; ++k) p[k] *= inv;
        double v = integrand(p);
        sum.add(v);
        sumsq.add(v * v);
    }
    const double count = static_cast<double>(opts.mc_samples);
    double mean = sum.value() / count;
    double var = std::max(0.0, sumsq.value() / count - mean * mean);
    // Area of S^{n-1}.
    double area = 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
    out.value = area * mean;
    out.error_estimate = 2.576 * area * std::sqrt(var / count);
    out.evaluations = opts.mc_samples;
    return out;
}

}  // namespace frenet::quadrature
