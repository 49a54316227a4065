#include "frenet/tube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace frenet::tube {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

// ---------------------------------------------------------------------------
// CrossSection
// ---------------------------------------------------------------------------

CrossSection CrossSection::disk(int dim, double radius) {
    if (dim < 1) throw std::invalid_argument("disk: dimension must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("disk: radius must be positive");
    CrossSection s;
    s.dim_ = dim;
    s.shape_ = DiskData{radius};
    s.bbox_.lo.assign(dim, -radius);
    s.bbox_.hi.assign(dim, radius);
    s.volume_ = unit_ball_volume(dim) * std::pow(radius, dim);
    s.barycenter_.assign(dim, 0.0);
    return s;
}

CrossSection CrossSection::parabolic_blade() {
    CrossSection s;
    s.dim_ = 2;
    s.shape_ = BladeData{};
    s.bbox_.lo = {-1.0, -1.25};
    s.bbox_.hi = {1.0, 1.25};
    s.volume_ = 13.0 / 3.0;
    s.barycenter_ = {0.0, 0.0};
    return s;
}

CrossSection CrossSection::polygon(std::vector<std::array<double, 2>> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon: needs at least 3 vertices");
    // Counterclockwise orientation, for the boundary loop.
    double twice_area = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % vertices.size()];
        twice_area += a[0] * b[1] - b[0] * a[1];
    }
    if (twice_area < 0.0) std::reverse(vertices.begin(), vertices.end());

    CrossSection s;
    s.dim_ = 2;
    s.bbox_.lo = {vertices[0][0], vertices[0][1]};
    s.bbox_.hi = s.bbox_.lo;
    for (const auto& v : vertices) {
        s.bbox_.lo[0] = std::min(s.bbox_.lo[0], v[0]);
        s.bbox_.lo[1] = std::min(s.bbox_.lo[1], v[1]);
        s.bbox_.hi[0] = std::max(s.bbox_.hi[0], v[0]);
        s.bbox_.hi[1] = std::max(s.bbox_.hi[1], v[1]);
    }
    s.shape_ = PolygonData{std::move(vertices)};
    s.measure();
    return s;
}

CrossSection CrossSection::implicit(int dim, std::function<bool(const Vec&)> contains,
                                    quadrature::Box bbox) {
    if (dim < 1 || bbox.lo.size() != static_cast<std::size_t>(dim) ||
        bbox.hi.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("implicit section: bad bbox");
    CrossSection s;
    s.dim_ = dim;
    s.shape_ = ImplicitData{std::move(contains)};
    s.bbox_ = std::move(bbox);
    s.measure();
    return s;
}

bool CrossSection::contains(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("section contains: dimension mismatch");
    if (const auto* d = std::get_if<DiskData>(&shape_)) return norm(x) <= d->radius;
    if (std::get_if<BladeData>(&shape_)) {
        double cap = x[0] * x[0] / 4.0 + 1.0;
        return x[0] >= -1.0 && x[0] <= 1.0 && x[1] >= -cap && x[1] <= cap;
    }
    if (const auto* p = std::get_if<PolygonData>(&shape_)) {
        // Crossing number.
        bool inside = false;
        const auto& v = p->vertices;
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            bool straddles = (v[i][1] > x[1]) != (v[j][1] > x[1]);
            if (straddles) {
                double cross_x =
                    v[j][0] + (x[1] - v[j][1]) / (v[i][1] - v[j][1]) * (v[i][0] - v[j][0]);
                if (x[0] < cross_x) inside = !inside;
            }
        }
        return inside;
    }
    return std::get<ImplicitData>(shape_).contains(x);
}

void CrossSection::measure() {
    quadrature::Region region{static_cast<std::size_t>(dim_),
                              [this](const Vec& x) { return contains(x); }, bbox_};
    auto vol = quadrature::integrate_region(region, [](const Vec&) { return 1.0; });
    if (!(vol.value > 0.0)) throw std::invalid_argument("cross section has zero volume");
    volume_ = vol.value;
    barycenter_.assign(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
        auto moment = quadrature::integrate_region(
            region, [i](const Vec& x) { return x[static_cast<std::size_t>(i)]; });
        barycenter_[i] = moment.value / volume_;
    }
}

std::pair<double, double> CrossSection::x1_range() const {
    if (const auto* d = std::get_if<DiskData>(&shape_)) return {-d->radius, d->radius};
    if (std::get_if<BladeData>(&shape_)) return {-1.0, 1.0};
    if (const auto* p = std::get_if<PolygonData>(&shape_)) {
        double lo = p->vertices[0][0], hi = lo;
        for (const auto& v : p->vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        return {lo, hi};
    }
    return {bbox_.lo[0], bbox_.hi[0]};
}

bool CrossSection::has_boundary_loop() const {
    return dim_ == 2 && !std::holds_alternative<ImplicitData>(shape_);
}

std::vector<std::array<double, 2>> CrossSection::boundary_loop(int segments) const {
    if (!has_boundary_loop())
        throw std::invalid_argument("boundary_loop: only 2-D closed-form sections");
    std::vector<std::array<double, 2>> loop;
    loop.reserve(segments);
    if (const auto* d = std::get_if<DiskData>(&shape_)) {
        for (int k = 0; k < segments; ++k) {
            double u = 2.0 * kPi * k / segments;
            loop.push_back({d->radius * std::cos(u), d->radius * std::sin(u)});
        }
        return loop;
    }
    if (std::get_if<BladeData>(&shape_)) {
        int per_side = std::max(1, segments / 4);
        auto cap = [](double x) { return x * x / 4.0 + 1.0; };
        for (int k = 0; k < per_side; ++k) {  // right edge, upward
            double y = -1.25 + 2.5 * k / per_side;
            loop.push_back({1.0, y});
        }
        for (int k = 0; k < per_side; ++k) {  // top arc, right to left
            double x = 1.0 - 2.0 * k / per_side;
            loop.push_back({x, cap(x)});
        }
        for (int k = 0; k < per_side; ++k) {  // left edge, downward
            double y = 1.25 - 2.5 * k / per_side;
            loop.push_back({-1.0, y});
        }
        for (int k = 0; k < per_side; ++k) {  // bottom arc, left to right
            double x = -1.0 + 2.0 * k / per_side;
            loop.push_back({x, -cap(x)});
        }
        return loop;
    }
    const auto& v = std::get<PolygonData>(shape_).vertices;
    double perimeter = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        perimeter += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        int pts = std::max(1, static_cast<int>(std::lround(segments * len / perimeter)));
        for (int k = 0; k < pts; ++k) {
            double u = static_cast<double>(k) / pts;
            loop.push_back({a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])});
        }
    }
    return loop;
}

// ---------------------------------------------------------------------------
// ApparatusField
// ---------------------------------------------------------------------------

ApparatusField::ApparatusField(curve::CurveJet jet, double probe_t0, double probe_t1)
    : jet_(std::move(jet)) {
    const int n = jet_.dimension();
    if (jet_.max_order() < n) {
        extended_ = true;
        return;
    }
    for (int i = 0; i <= 4; ++i) {
        double t = probe_t0 + (probe_t1 - probe_t0) * i / 4.0;
        try {
            (void)apparatus::apparatus(jet_, t);
        } catch (const NonRegularError&) {
            extended_ = true;
            return;
        }
    }
}

apparatus::FrenetApparatus ApparatusField::at(double t) const {
    return extended_ ? apparatus::extended_apparatus(jet_, t) : apparatus::apparatus(jet_, t);
}

// ---------------------------------------------------------------------------
// TubeSpec
// ---------------------------------------------------------------------------

int TubeSpec::section_dim() const {
    if (const auto* s = std::get_if<CrossSection>(&section)) return s->dim();
    return std::get<RadiusFamily>(section).dim;
}

Vec TubeSpec::attach_point() const {
    if (!attach.empty()) return attach;
    return Vec(section_dim(), 0.0);
}

TubeSpec TubeSpec::around(curve::CurveJet jet, double t0, double t1, CrossSection section,
                          Vec attach) {
    if (jet.dimension() != section.dim() + 1)
        throw std::invalid_argument("tube: curve must live in R^{n+1} for an n-dim section");
    if (!attach.empty() && attach.size() != static_cast<std::size_t>(section.dim()))
        throw std::invalid_argument("tube: attachment point dimension mismatch");
    TubeSpec spec;
    spec.field = ApparatusField(std::move(jet), t0, t1);
    spec.t0 = t0;
    spec.t1 = t1;
    spec.section = std::move(section);
    spec.attach = std::move(attach);
    return spec;
}

TubeSpec TubeSpec::disk_family(curve::CurveJet jet, double t0, double t1, RadiusFamily family) {
    if (jet.dimension() != family.dim + 1)
        throw std::invalid_argument("tube: curve must live in R^{n+1} for an n-dim section");
    if (!family.radius) throw std::invalid_argument("tube: radius family needs a radius function");
    TubeSpec spec;
    spec.field = ApparatusField(std::move(jet), t0, t1);
    spec.t0 = t0;
    spec.t1 = t1;
    spec.section = std::move(family);
    return spec;
}

// ---------------------------------------------------------------------------
// Core maps
// ---------------------------------------------------------------------------

namespace {

struct TubeFrame {
    Vec f;
    double nu;
    double kappa1;
    std::vector<Vec> frame;
};

TubeFrame frame_at(const TubeSpec& spec, double t) {
    apparatus::FrenetApparatus ap = spec.field.at(t);
    TubeFrame out;
    out.f = spec.field.jet().eval(t)[0];
    out.nu = ap.nu;
    out.kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
    out.frame = std::move(ap.frame);
    return out;
}

Vec map_with_frame(const TubeFrame& fr, const Vec& x, const Vec& p) {
    Vec y = fr.f;
    for (std::size_t j = 0; j < x.size(); ++j) y = axpy(x[j] - p[j], fr.frame[j + 1], y);
    return y;
}

double family_radius_derivative(const RadiusFamily& fam, double t) {
    if (fam.radius_derivative) return fam.radius_derivative(t);
    double h = curve::finite_difference_step(1, t);
    return (fam.radius(t + h) - fam.radius(t - h)) / (2.0 * h);
}

// Largest |x1 - p1| over the section; exact per variant.
double section_extent(const CrossSection& s, double p1) {
    auto [lo, hi] = s.x1_range();
    return std::max(std::abs(lo - p1), std::abs(hi - p1));
}

// Throws when the fundamental regularity condition fails on the sampled grid.
void check_regularity(const TubeSpec& spec, int samples = 1024) {
    const Vec p = spec.attach_point();
    for (int i = 0; i <= samples; ++i) {
        double t = spec.t0 + (spec.t1 - spec.t0) * i / samples;
        apparatus::FrenetApparatus ap = spec.field.at(t);
        double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
        double extent;
        if (const auto* s = std::get_if<CrossSection>(&spec.section))
            extent = section_extent(*s, p[0]);
        else
            extent = std::get<RadiusFamily>(spec.section).radius(t);
        if (std::abs(extent * kappa1) >= 1.0) throw TubeRegularityError(t, extent, kappa1);
    }
}

}  // namespace

Vec tube_map(const TubeSpec& spec, const Vec& section_point, double t) {
    if (section_point.size() != static_cast<std::size_t>(spec.section_dim()))
        throw std::invalid_argument("tube_map: section point dimension mismatch");
    return map_with_frame(frame_at(spec, t), section_point, spec.attach_point());
}

double tube_jacobian(const TubeSpec& spec, const Vec& section_point, double t) {
    apparatus::FrenetApparatus ap = spec.field.at(t);
    double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
    double p1 = spec.attach_point()[0];
    return ap.nu * std::abs(1.0 - (section_point[0] - p1) * kappa1);
}

double regularity_radius(const ApparatusField& field, double t0, double t1, int grid) {
    auto kappa1 = [&](double t) {
        apparatus::FrenetApparatus ap = field.at(t);
        return ap.kappas.empty() ? 0.0 : std::abs(ap.kappas[0]);
    };
    double best_t = t0, best = -1.0;
    for (int i = 0; i <= grid; ++i) {
        double t = t0 + (t1 - t0) * i / grid;
        double k = kappa1(t);
        if (k > best) {
            best = k;
            best_t = t;
        }
    }
    // Golden-section refinement around the grid maximum.
    double h = (t1 - t0) / grid;
    double a = std::max(t0, best_t - h), b = std::min(t1, best_t + h);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = kappa1(x1), f2 = kappa1(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = kappa1(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = kappa1(x1);
        }
    }
    best = std::max(best, std::max(f1, f2));
    if (best <= 1e-12) return std::numeric_limits<double>::infinity();
    return 1.0 / best;
}

quadrature::QuadratureResult tube_volume(const TubeSpec& spec, double tol) {
    check_regularity(spec);
    const Vec p = spec.attach_point();

    if (const auto* s = std::get_if<CrossSection>(&spec.section)) {
        const double vol = s->volume();
        const double c1 = s->barycenter()[0];
        auto integrand = [&](double t) {
            apparatus::FrenetApparatus ap = spec.field.at(t);
            double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
            return ap.nu * vol * (1.0 - kappa1 * (c1 - p[0]));
        };
        return quadrature::integrate_1d(integrand, spec.t0, spec.t1, tol);
    }

    const auto& fam = std::get<RadiusFamily>(spec.section);
    const double ball = unit_ball_volume(fam.dim);
    auto integrand = [&](double t) {
        apparatus::FrenetApparatus ap = spec.field.at(t);
        return ap.nu * ball * std::pow(fam.radius(t), fam.dim);
    };
    return quadrature::integrate_1d(integrand, spec.t0, spec.t1, tol);
}

double pappus_volume(const CrossSection& section, const ApparatusField& field, double t0,
                     double t1, double tol) {
    return section.volume() * curve::arc_length(field.jet(), t0, t1, tol);
}

DiskTubeVolume disk_tube_volume(const RadiusFamily& family, const ApparatusField& field,
                                double t0, double t1, double tol) {
    const double ball = unit_ball_volume(family.dim);
    auto integrand = [&](double t) {
        apparatus::FrenetApparatus ap = field.at(t);
        return ap.nu * ball * std::pow(family.radius(t), family.dim);
    };
    auto q = quadrature::integrate_1d(integrand, t0, t1, tol);

    DiskTubeVolume out;
    out.value = q.value;
    out.error_estimate = q.error_estimate;
    double rho = regularity_radius(field, t0, t1);
    for (int i = 0; i <= 512; ++i) {
        double t = t0 + (t1 - t0) * i / 512;
        if (family.radius(t) >= rho * (1.0 - 1e-12)) {
            out.radius_warning = true;
            break;
        }
    }
    return out;
}

double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be >= 1");
    double vol = 2.0;  // vol(B^1)
    for (int k = 2; k <= n; ++k) {
        // int_{-1}^{1} (1 - x^2)^{(k-1)/2} dx = sqrt(pi) Gamma((k+1)/2) / Gamma(k/2 + 1)
        double slab = std::sqrt(kPi) * std::tgamma(0.5 * (k + 1)) / std::tgamma(0.5 * k + 1.0);
        vol *= slab;
    }
    return vol;
}

double sphere_volume(int n_minus_1, double R) {
    if (n_minus_1 < 1) throw std::invalid_argument("sphere_volume: dimension must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("sphere_volume: radius must be positive");
    int n = n_minus_1 + 1;
    return n * std::pow(R, n_minus_1) * unit_ball_volume(n);
}

quadrature::QuadratureResult sphere_tube_area(const ApparatusField& field, double t0, double t1,
                                              const RadiusFamily& family, double tol,
                                              const quadrature::SphereOptions& sphere_opts) {
    const int n = field.ambient() - 1;
    if (n < 2) throw std::invalid_argument("sphere_tube_area: needs ambient dimension >= 3");

    for (int i = 0; i <= 1024; ++i) {
        double t = t0 + (t1 - t0) * i / 1024;
        apparatus::FrenetApparatus ap = field.at(t);
        double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
        double R = family.radius(t);
        if (!(R > 0.0)) throw std::invalid_argument("sphere_tube_area: radius must stay positive");
        if (std::abs(R * kappa1) >= 1.0) throw TubeRegularityError(t, R, kappa1);
    }

    auto integrand = [&](double t) {
        apparatus::FrenetApparatus ap = field.at(t);
        double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
        double R = family.radius(t);
        double Rp = family_radius_derivative(family, t);
        double nu = ap.nu;
        auto lateral = [&](const Vec& phi) {
            double w = nu * (1.0 - phi[0] * R * kappa1);
            return std::sqrt(w * w + Rp * Rp);
        };
        auto inner = quadrature::integrate_sphere(n - 1, lateral);
        return std::pow(R, n - 1) * inner.value;
    };
    return quadrature::integrate_1d(integrand, t0, t1, tol);
}

double sphere_tube_pappus(const ApparatusField& field, double t0, double t1, double R,
                          double tol) {
    const int n = field.ambient() - 1;
    if (n < 2) throw std::invalid_argument("sphere_tube_pappus: needs ambient dimension >= 3");
    return sphere_volume(n - 1, R) * curve::arc_length(field.jet(), t0, t1, tol);
}

Vec sphere_tube_gauss_map(const apparatus::FrenetApparatus& ap, const Vec& phi, double R,
                          double R_prime) {
    const std::size_t n = phi.size();
    if (ap.frame.size() != n + 1)
        throw std::invalid_argument("gauss_map: phi must have the section dimension");
    double kappa1 = ap.kappas.empty() ? 0.0 : ap.kappas[0];
    double denom = phi[0] * R * kappa1 - 1.0;
    if (denom >= 0.0) throw TubeRegularityError(0.0, R, kappa1);

    Vec h0(ap.frame[0].size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) h0 = axpy(R * phi[j], ap.frame[j + 1], h0);
    double lambda = R * R_prime / (ap.nu * denom);
    Vec normal = normalized(axpy(lambda, ap.frame[0], h0));
    if (dot(normal, h0) < 0.0) normal = -1.0 * normal;
    return normal;
}

// ---------------------------------------------------------------------------
// Helix example diagnostics
// ---------------------------------------------------------------------------

HelixOverlap::HelixOverlap(double r_, double T_) : r(r_), T(T_) {
    if (!(r > 0.0 && r < 3.0)) throw std::invalid_argument("HelixOverlap: r must be in (0, 3)");
    if (r > 1.0) {
        double ti = max_angle(r);
        if (std::abs(T) > ti + 1e-12)
            throw std::invalid_argument("HelixOverlap: |T| exceeds T_I for this r");
    }
}

double HelixOverlap::max_angle(double r) {
    if (!(r > 1.0 && r < 3.0))
        throw std::invalid_argument("HelixOverlap::max_angle: r must be in (1, 3)");
    return std::acos((std::sqrt(2.0) * std::sqrt(r * r - 1.0) - 1.0) / r);
}

double HelixOverlap::g(double s) const { return s - r * std::sin(T) + r * std::sin(s + T); }

namespace {

// G*(x, y, t) for the helix example: f - x N + y B, written out.
Vec helix_gstar(double x, double y, double t) {
    const double s2 = std::sqrt(2.0);
    return {(x + 1.0) * std::cos(t) + y * std::sin(t) / s2,
            (x + 1.0) * std::sin(t) - y * std::cos(t) / s2, t + y / s2};
}

}  // namespace

CollisionWitness helix_collision_witness(double R) {
    if (!(R > 2.0))
        throw std::invalid_argument(
            "helix_collision_witness: the disk tube of radius <= 2 is genuine; need R > 2");
    const double r = R / 2.0;

    // Root of psi(s) = s - r sin s in (0, pi): psi < 0 near zero (r > 1),
    // psi(pi) = pi > 0.
    auto psi = [&](double s) { return s - r * std::sin(s); };
    double lo = kPi / 2.0;
    while (psi(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw std::runtime_error("helix_collision_witness: bracket not found");
    }
    double hi = kPi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (psi(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    const double s0 = 0.5 * (lo + hi);

    CollisionWitness w;
    w.s0 = s0;
    w.section_point_1 = {-1.0 - r, 0.0};
    w.t1 = s0;
    w.section_point_2 = {-1.0 - r * std::cos(s0), std::sqrt(2.0) * s0};
    w.t2 = 0.0;
    w.image = {-r * std::cos(s0), -r * std::sin(s0), s0};
    Vec img1 = helix_gstar(w.section_point_1[0], w.section_point_1[1], w.t1);
    Vec img2 = helix_gstar(w.section_point_2[0], w.section_point_2[1], w.t2);
    w.residual = norm(img1 - img2);

    double n1 = std::hypot(w.section_point_1[0], w.section_point_1[1]);
    double n2 = std::hypot(w.section_point_2[0], w.section_point_2[1]);
    if (!(n1 < R && n2 < R))
        throw std::runtime_error("helix_collision_witness: witness left the disk");
    return w;
}

// ---------------------------------------------------------------------------
// Injectivity scan
// ---------------------------------------------------------------------------

namespace {

struct SamplePoint {
    Vec x;      // section coordinates
    double t;
    Vec image;  // ambient
};

bool section_contains(const TubeSpec& spec, const Vec& x, double t, double slack = 0.0) {
    if (const auto* s = std::get_if<CrossSection>(&spec.section)) {
        if (slack == 0.0) return s->contains(x);
        if (const auto* d = s->as_disk()) return norm(x) <= d->radius + slack;
        return s->contains(x);
    }
    return norm(x) <= std::get<RadiusFamily>(spec.section).radius(t) + slack;
}

quadrature::Box section_box(const TubeSpec& spec, double t0, double t1) {
    if (const auto* s = std::get_if<CrossSection>(&spec.section)) return s->bbox();
    const auto& fam = std::get<RadiusFamily>(spec.section);
    double rmax = 0.0;
    for (int i = 0; i <= 256; ++i)
        rmax = std::max(rmax, fam.radius(t0 + (t1 - t0) * i / 256));
    quadrature::Box box;
    box.lo.assign(fam.dim, -rmax);
    box.hi.assign(fam.dim, rmax);
    return box;
}

// Gauss-Newton refinement of the squared image distance between two tube
// points. Returns the refined distance (or the coarse one if no progress).
double refine_pair(const TubeSpec& spec, SamplePoint& a, SamplePoint& b, double min_sep) {
    const int d = spec.section_dim();
    const int vars = 2 * d + 2;
    Vec z(vars);
    for (int k = 0; k < d; ++k) z[k] = a.x[k];
    z[d] = a.t;
    for (int k = 0; k < d; ++k) z[d + 1 + k] = b.x[k];
    z[2 * d + 1] = b.t;

    auto residual = [&](const Vec& zz) {
        Vec xa(zz.begin(), zz.begin() + d);
        Vec xb(zz.begin() + d + 1, zz.begin() + 2 * d + 1);
        return tube_map(spec, xa, zz[d]) - tube_map(spec, xb, zz[2 * d + 1]);
    };
    auto feasible = [&](const Vec& zz) {
        Vec xa(zz.begin(), zz.begin() + d);
        Vec xb(zz.begin() + d + 1, zz.begin() + 2 * d + 1);
        double ta = zz[d], tb = zz[2 * d + 1];
        if (std::abs(ta - tb) < 0.5 * min_sep) return false;
        if (ta < spec.t0 || ta > spec.t1 || tb < spec.t0 || tb > spec.t1) return false;
        return section_contains(spec, xa, ta, 1e-9) && section_contains(spec, xb, tb, 1e-9);
    };

    Vec r = residual(z);
    double best = norm(r);
    double mu = 1e-6;
    const int m = static_cast<int>(r.size());
    for (int it = 0; it < 80 && best > 1e-12; ++it) {
        // Forward-difference Jacobian.
        Mat jac(m, vars);
        const double h = 1e-7;
        for (int c = 0; c < vars; ++c) {
            Vec zp = z;
            zp[c] += h;
            Vec rp = residual(zp);
            for (int rr = 0; rr < m; ++rr) jac(rr, c) = (rp[rr] - r[rr]) / h;
        }
        Mat jtj = jac.transposed() * jac;
        Vec jtr = jac.transposed() * r;
        bool stepped = false;
        for (int attempt = 0; attempt < 10; ++attempt) {
            Mat damped = jtj;
            for (int k = 0; k < vars; ++k) damped(k, k) += mu;
            Vec delta;
            try {
                delta = lu_solve(damped, jtr);
            } catch (const std::invalid_argument&) {
                mu *= 10.0;
                continue;
            }
            Vec zn = z - delta;
            if (!feasible(zn)) {
                mu *= 10.0;
                continue;
            }
            Vec rn = residual(zn);
            double nn = norm(rn);
            if (nn < best) {
                z = zn;
                r = rn;
                best = nn;
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
                break;
            }
            mu *= 10.0;
        }
        if (!stepped) break;
    }

    for (int k = 0; k < d; ++k) a.x[k] = z[k];
    a.t = z[d];
    for (int k = 0; k < d; ++k) b.x[k] = z[d + 1 + k];
    b.t = z[2 * d + 1];
    a.image = tube_map(spec, a.x, a.t);
    b.image = tube_map(spec, b.x, b.t);
    return best;
}

}  // namespace

ScanReport injectivity_scan(const TubeSpec& spec, int grid_resolution, double t_separation) {
    if (grid_resolution < 4) throw std::invalid_argument("injectivity_scan: resolution too small");
    const int d = spec.section_dim();
    const int ambient = d + 1;
    const double t_sep =
        t_separation > 0.0 ? t_separation : 8.0 * (spec.t1 - spec.t0) / grid_resolution;

    quadrature::Box box = section_box(spec, spec.t0, spec.t1);

    // Sample the tube map: one apparatus evaluation per t slab.
    std::vector<SamplePoint> pts;
    pts.reserve(static_cast<std::size_t>(grid_resolution) * grid_resolution);
    const Vec p = spec.attach_point();
    for (int i = 0; i < grid_resolution; ++i) {
        double t = spec.t0 + (spec.t1 - spec.t0) * i / (grid_resolution - 1.0);
        TubeFrame fr = frame_at(spec, t);
        std::vector<int> idx(d, 0);
        bool done = false;
        Vec x(d);
        while (!done) {
            for (int k = 0; k < d; ++k)
                x[k] = box.lo[k] + (idx[k] + 0.5) * (box.hi[k] - box.lo[k]) / grid_resolution;
            if (section_contains(spec, x, t)) pts.push_back({x, t, map_with_frame(fr, x, p)});
            done = true;
            for (int k = 0; k < d; ++k) {
                if (++idx[k] < grid_resolution) {
                    done = false;
                    break;
                }
            }
        }
    }

    // Spatial hash over image space.
    Vec img_lo = pts[0].image, img_hi = pts[0].image;
    for (const auto& q : pts)
        for (int k = 0; k < ambient; ++k) {
            img_lo[k] = std::min(img_lo[k], q.image[k]);
            img_hi[k] = std::max(img_hi[k], q.image[k]);
        }
    double diam = 0.0;
    for (int k = 0; k < ambient; ++k) diam = std::max(diam, img_hi[k] - img_lo[k]);
    const double cell = std::max(1.5 * diam / grid_resolution, 1e-9);

    struct Bucket {
        double tmin = std::numeric_limits<double>::infinity();
        double tmax = -std::numeric_limits<double>::infinity();
        std::vector<int> members;
    };
    auto key_of = [&](const Vec& y) {
        std::uint64_t key = 1469598103934665603ull;
        for (int k = 0; k < ambient; ++k) {
            auto c = static_cast<std::int64_t>(std::floor((y[k] - img_lo[k]) / cell));
            key ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ull + (key << 6) + (key >> 2);
        }
        return key;
    };
    std::unordered_map<std::uint64_t, Bucket> hash;
    std::vector<std::uint64_t> keys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        keys[i] = key_of(pts[i].image);
        Bucket& bucket = hash[keys[i]];
        bucket.tmin = std::min(bucket.tmin, pts[i].t);
        bucket.tmax = std::max(bucket.tmax, pts[i].t);
        bucket.members.push_back(static_cast<int>(i));
    }

    // Candidate pairs: same or neighboring cell, parameter-distant, close in
    // space. Buckets whose parameter spread stays below t_sep are skipped.
    struct Candidate {
        int i, j;
        double dist;
    };
    std::vector<Candidate> candidates;
    const double coarse = cell * 1.5;
    std::vector<std::int64_t> cellidx(static_cast<std::size_t>(ambient));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int k = 0; k < ambient; ++k)
            cellidx[k] = static_cast<std::int64_t>(std::floor((pts[i].image[k] - img_lo[k]) / cell));
        // Walk the 3^ambient neighborhood.
        std::vector<int> off(ambient, -1);
        bool more = true;
        while (more) {
            Vec corner(ambient);
            for (int k = 0; k < ambient; ++k)
                corner[k] = img_lo[k] + (cellidx[k] + off[k] + 0.5) * cell;
            auto it = hash.find(key_of(corner));
            if (it != hash.end()) {
                const Bucket& bucket = it->second;
                if (bucket.tmax - pts[i].t > t_sep || pts[i].t - bucket.tmin > t_sep) {
                    for (int j : bucket.members) {
                        if (j <= static_cast<int>(i)) continue;
                        if (std::abs(pts[j].t - pts[i].t) <= t_sep) continue;
                        double dd = norm(pts[i].image - pts[j].image);
                        if (dd < coarse) candidates.push_back({static_cast<int>(i), j, dd});
                    }
                }
            }
            more = false;
            for (int k = 0; k < ambient; ++k) {
                if (++off[k] <= 1) {
                    more = true;
                    break;
                }
                off[k] = -1;
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
    if (candidates.size() > 200) candidates.resize(200);

    ScanReport report;
    double best_refined = std::numeric_limits<double>::infinity();
    for (const auto& cand : candidates) {
        SamplePoint a = pts[cand.i];
        SamplePoint b = pts[cand.j];
        double refined = refine_pair(spec, a, b, t_sep);
        CollisionPair pair{a.x, a.t, b.x, b.t, refined};
        if (refined < best_refined) {
            best_refined = refined;
            report.nearest_approach = pair;
        }
        if (refined <= 1e-6) {
            // Deduplicate collisions that converged to the same pair.
            bool duplicate = false;
            for (const auto& c : report.collisions)
                if (std::abs(c.t1 - pair.t1) < 0.25 * t_sep &&
                    std::abs(c.t2 - pair.t2) < 0.25 * t_sep)
                    duplicate = true;
            if (!duplicate && report.collisions.size() < 8) report.collisions.push_back(pair);
        }
    }
    report.clean = report.collisions.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Meshing
// ---------------------------------------------------------------------------

double TriangleMesh::area() const {
    double total = 0.0;
    for (const auto& tri : triangles) {
        const auto& a = vertices[tri[0]];
        const auto& b = vertices[tri[1]];
        const auto& c = vertices[tri[2]];
        double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        double cx = u[1] * v[2] - u[2] * v[1];
        double cy = u[2] * v[0] - u[0] * v[2];
        double cz = u[0] * v[1] - u[1] * v[0];
        total += 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
    }
    return total;
}

TriangleMesh tube_mesh(const TubeSpec& spec, int resolution) {
    if (spec.field.ambient() != 3)
        throw std::invalid_argument("tube_mesh: triangle meshes need ambient dimension 3");
    if (resolution < 3) throw std::invalid_argument("tube_mesh: resolution too small");

    // Boundary loop in section coordinates; scaled per ring for families.
    std::vector<std::array<double, 2>> loop;
    bool scaled_by_radius = false;
    if (const auto* s = std::get_if<CrossSection>(&spec.section)) {
        loop = s->boundary_loop(resolution);
    } else {
        for (int k = 0; k < resolution; ++k) {
            double u = 2.0 * kPi * k / resolution;
            loop.push_back({std::cos(u), std::sin(u)});
        }
        scaled_by_radius = true;
    }
    const int loop_n = static_cast<int>(loop.size());

    // Closed axis detection: endpoint positions and frames coincide.
    TubeFrame first = frame_at(spec, spec.t0);
    TubeFrame last = frame_at(spec, spec.t1);
    double scale = std::max(1.0, norm(first.f));
    bool closed = norm(first.f - last.f) <= 1e-9 * scale;
    if (closed)
        for (std::size_t j = 0; j < first.frame.size() && closed; ++j)
            closed = norm(first.frame[j] - last.frame[j]) <= 1e-9;

    const int rings = closed ? resolution : resolution + 1;
    const Vec p = spec.attach_point();

    TriangleMesh mesh;
    mesh.closed = closed;
    // Regularity is only a warning for mesh emission.
    try {
        check_regularity(spec, 256);
    } catch (const TubeRegularityError&) {
        mesh.regularity_warning = true;
    }

    mesh.vertices.reserve(static_cast<std::size_t>(rings) * loop_n);
    for (int i = 0; i < rings; ++i) {
        double t = spec.t0 + (spec.t1 - spec.t0) * i / resolution;
        TubeFrame fr = frame_at(spec, t);
        double r_scale = 1.0;
        if (scaled_by_radius) r_scale = std::get<RadiusFamily>(spec.section).radius(t);
        for (int k = 0; k < loop_n; ++k) {
            Vec x = {loop[k][0] * r_scale, loop[k][1] * r_scale};
            Vec y = map_with_frame(fr, x, p);
            mesh.vertices.push_back({y[0], y[1], y[2]});
        }
    }

    const int ring_count = closed ? resolution : resolution;
    auto vid = [&](int ring, int k) {
        int rr = closed ? ring % resolution : ring;
        return rr * loop_n + (k % loop_n);
    };
    for (int i = 0; i < ring_count; ++i) {
        for (int k = 0; k < loop_n; ++k) {
            int a = vid(i, k), b = vid(i + 1, k), c = vid(i + 1, k + 1), dd = vid(i, k + 1);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, dd});
        }
    }

    // Outward orientation, decided on the first quad against the axis point.
    {
        const auto& tri = mesh.triangles[0];
        const auto& a = mesh.vertices[tri[0]];
        const auto& b = mesh.vertices[tri[1]];
        const auto& c = mesh.vertices[tri[2]];
        double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        Vec nrm = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                   u[0] * v[1] - u[1] * v[0]};
        Vec outward = {a[0] - first.f[0], a[1] - first.f[1], a[2] - first.f[2]};
        if (dot(nrm, outward) < 0.0)
            for (auto& tt : mesh.triangles) std::swap(tt[1], tt[2]);
    }
    return mesh;
}

std::string to_obj(const TriangleMesh& mesh) {
    std::ostringstream os;
    char buf[96];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.15g %.15g %.15g\n", v[0], v[1], v[2]);
        os << buf;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
        os << buf;
    }
    return os.str();
}

std::string boundary_sample_csv(const TubeSpec& spec, int resolution) {
    const int d = spec.section_dim();
    const int ambient = d + 1;

    // Hyperspherical angles for S^{d-1}: u_1..u_{d-2} in [0, pi],
    // u_{d-1} in [0, 2 pi).
    std::ostringstream os;
    for (int k = 1; k < d; ++k) os << "u" << k << ",";
    os << "t";
    for (int k = 1; k <= ambient; ++k) os << ",y" << k;
    os << "\n";
    char buf[32];
    auto put_first = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        os << buf;
    };
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        os << ',' << buf;
    };

    std::vector<int> idx(std::max(d - 1, 1), 0);
    const Vec p = spec.attach_point();
    for (int i = 0; i <= resolution; ++i) {
        double t = spec.t0 + (spec.t1 - spec.t0) * i / resolution;
        TubeFrame fr = frame_at(spec, t);
        double radius;
        if (const auto* s = std::get_if<CrossSection>(&spec.section)) {
            const auto* dk = s->as_disk();
            if (!dk)
                throw std::invalid_argument("boundary_sample_csv: only disk sections supported");
            radius = dk->radius;
        } else {
            radius = std::get<RadiusFamily>(spec.section).radius(t);
        }

        std::fill(idx.begin(), idx.end(), 0);
        bool done = false;
        while (!done) {
            std::vector<double> u(d - 1);
            for (int k = 0; k < d - 1; ++k) {
                double span = (k == d - 2) ? 2.0 * kPi : kPi;
                u[k] = span * idx[k] / resolution;
            }
            // phi from the angles.
            Vec phi(d, 0.0);
            double sin_prod = 1.0;
            for (int k = 0; k < d - 1; ++k) {
                phi[k] = sin_prod * std::cos(u[k]);
                sin_prod *= std::sin(u[k]);
            }
            phi[d - 1] = sin_prod;

            Vec x = radius * phi;
            Vec y = map_with_frame(fr, x, p);
            for (int k = 0; k < d - 1; ++k) {
                if (k == 0)
                    put_first(u[k]);
                else
                    put(u[k]);
            }
            if (d - 1 == 0)
                put_first(t);
            else
                put(t);
            for (int k = 0; k < ambient; ++k) put(y[k]);
            os << "\n";

            done = true;
            for (int k = 0; k < d - 1; ++k) {
                if (++idx[k] < resolution) {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if (d - 1 == 0) done = true;
        }
    }
    return os.str();
}

}  // namespace frenet::tube
