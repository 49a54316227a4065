#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frenet/curve.hpp"
#include "frenet/errors.hpp"
#include "frenet/frenet.hpp"
#include "frenet/quadrature.hpp"

// Tubes around curves in R^{n+1}: the tube map G(X, t) = f(t) +
// sum_j (x_j - p_j) V_{j+1}(t), its Jacobian, tube volumes (generalized
// second Pappus theorem), sphere-tube areas and Gauss maps (first Pappus),
// and the maximal-tube diagnostics of the helix example.

namespace frenet::tube {

// ---------------------------------------------------------------------------
// Cross sections
// ---------------------------------------------------------------------------

// Compact region in R^n with a membership test. Disk and the parabolic blade
// carry closed-form volume/barycenter; polygonal and implicit sections are
// measured by the quadrature module.
class CrossSection {
public:
    static CrossSection disk(int dim, double radius);
    // {(x, y): -1 <= x <= 1, -(x^2/4 + 1) <= y <= x^2/4 + 1}
    static CrossSection parabolic_blade();
    static CrossSection polygon(std::vector<std::array<double, 2>> vertices);
    static CrossSection implicit(int dim, std::function<bool(const Vec&)> contains,
                                 quadrature::Box bbox);

    int dim() const { return dim_; }
    bool contains(const Vec& x) const;
    const quadrature::Box& bbox() const { return bbox_; }

    double volume() const { return volume_; }
    const Vec& barycenter() const { return barycenter_; }

    // Exact extent along the first section axis.
    std::pair<double, double> x1_range() const;

    // Counterclockwise boundary loop with `segments` samples (2-D only).
    bool has_boundary_loop() const;
    std::vector<std::array<double, 2>> boundary_loop(int segments) const;

    struct DiskData {
        double radius;
    };
    const DiskData* as_disk() const { return std::get_if<DiskData>(&shape_); }

private:
    struct BladeData {};
    struct PolygonData {
        std::vector<std::array<double, 2>> vertices;
    };
    struct ImplicitData {
        std::function<bool(const Vec&)> contains;
    };

    CrossSection() = default;
    void measure();  // fills volume_/barycenter_ (closed form or quadrature)

    int dim_ = 0;
    std::variant<DiskData, BladeData, PolygonData, ImplicitData> shape_;
    quadrature::Box bbox_;
    double volume_ = 0.0;
    Vec barycenter_;
};

// ---------------------------------------------------------------------------
// Apparatus along a curve
// ---------------------------------------------------------------------------

// Frenet data sampled along a curve, falling back to the extended apparatus
// (zero curvatures, constant frame completion) when the curve is not
// (n-1)-regular, as for planar axes like the torus circle.
class ApparatusField {
public:
    ApparatusField() = default;
    explicit ApparatusField(curve::CurveJet jet, double probe_t0 = 0.0, double probe_t1 = 1.0);

    const curve::CurveJet& jet() const { return jet_; }
    int ambient() const { return jet_.dimension(); }
    bool extended() const { return extended_; }

    apparatus::FrenetApparatus at(double t) const;

private:
    curve::CurveJet jet_;
    bool extended_ = false;
};

// ---------------------------------------------------------------------------
// Tube specification
// ---------------------------------------------------------------------------

// Disk family with t-varying radius, attached at the disk center.
struct RadiusFamily {
    int dim = 2;
    std::function<double(double)> radius;
    // Optional analytic derivative; central differences otherwise.
    std::function<double(double)> radius_derivative;
};

struct TubeSpec {
    ApparatusField field;  // curve in R^{n+1} with apparatus available
    double t0 = 0.0, t1 = 1.0;
    std::variant<CrossSection, RadiusFamily> section;
    Vec attach;  // P~; empty means the origin of section coordinates

    int section_dim() const;
    Vec attach_point() const;  // zero-filled default
    static TubeSpec around(curve::CurveJet jet, double t0, double t1, CrossSection section,
                           Vec attach = {});
    static TubeSpec disk_family(curve::CurveJet jet, double t0, double t1, RadiusFamily family);
};

// ---------------------------------------------------------------------------
// Tube operations
// ---------------------------------------------------------------------------

// G(X, t) = f(t) + sum_j (x_j - p_j) V_{j+1}(t).
Vec tube_map(const TubeSpec& spec, const Vec& section_point, double t);

// |det JG| = nu(t) |1 - (x_1 - p_1) kappa_1(t)|.
double tube_jacobian(const TubeSpec& spec, const Vec& section_point, double t);

// rho = 1 / sup kappa_1 over the interval (grid scan + golden-section
// refinement); +infinity when kappa_1 vanishes identically.
double regularity_radius(const ApparatusField& field, double t0, double t1,
                         int grid = 1024);

// Volume of the tube by the change-of-variables formula,
//   int nu (vol S_t - kappa_1 vol S_t Center(S_t, 1) + p_1 kappa_1 vol S_t) dt.
// Throws TubeRegularityError when some |x_1 - p_1| kappa_1 >= 1 on the
// sampled grid.
quadrature::QuadratureResult tube_volume(const TubeSpec& spec, double tol = 1e-9);

// Second Pappus theorem: vol(S) * l(f, I), for a constant section carried by
// its barycenter.
double pappus_volume(const CrossSection& section, const ApparatusField& field, double t0,
                     double t1, double tol = 1e-10);

struct DiskTubeVolume {
    double value = 0.0;
    double error_estimate = 0.0;
    bool radius_warning = false;  // some R(t) reaches the regularity radius
};

// Disk tube with variable radius: vol(B^n) int nu R^n dt.
DiskTubeVolume disk_tube_volume(const RadiusFamily& family, const ApparatusField& field,
                                double t0, double t1, double tol = 1e-9);

// vol(B^n), by the recursion vol(B^n) = vol(B^{n-1}) int_{-1}^{1}
// (1-x^2)^{(n-1)/2} dx with the inner integral in closed Beta form.
double unit_ball_volume(int n);

// vol(S^{n-1}(R)) = n R^{n-1} vol(B^n).
double sphere_volume(int n_minus_1, double R);

// Lateral area of the sphere tube of radius R(t):
//   int int R^{n-1} sqrt(nu^2 (1 - phi_1 R kappa_1)^2 + R'^2) dS^{n-1} dt.
quadrature::QuadratureResult sphere_tube_area(const ApparatusField& field, double t0, double t1,
                                              const RadiusFamily& family, double tol = 1e-8,
                                              const quadrature::SphereOptions& sphere_opts = {});

// First Pappus theorem for constant-radius sphere tubes:
// vol(S^{n-1}(R)) * l(f, I).
double sphere_tube_pappus(const ApparatusField& field, double t0, double t1, double R,
                          double tol = 1e-10);

// Outward unit normal of the lateral hypersurface at (U, t): the normalized
// H_0 + lambda V_1 with lambda = R R' / (nu (phi_1 R kappa_1 - 1)).
Vec sphere_tube_gauss_map(const apparatus::FrenetApparatus& ap, const Vec& phi, double R,
                          double R_prime);

// ---------------------------------------------------------------------------
// Maximal tube around the circular helix (example diagnostics)
// ---------------------------------------------------------------------------

// State of the helix overlap analysis: a point of the section at ellipse
// scale r and angle T, with cos T = (x_1 + 1)/r, sin T = y_1/(r sqrt 2) in
// the reflected (G*) section coordinates.
struct HelixOverlap {
    double r;  // in (0, 3)
    double T;

    HelixOverlap(double r_, double T_);
    static double max_angle(double r);  // T_I = arccos((sqrt2 sqrt(r^2-1) - 1)/r), r > 1
    // g(s) = s - r sin T + r sin(s + T)
    double g(double s) const;
};

// Analytic self-intersection witness for the disk tube of radius R > 2
// around (cos t, sin t, t). Section points are in the reflected (G*)
// coordinates; the two map images coincide.
struct CollisionWitness {
    std::array<double, 2> section_point_1;  // (-1 - r, 0), at parameter t1
    double t1;
    std::array<double, 2> section_point_2;  // (-1 - r cos s0, sqrt2 s0), at parameter t2
    double t2;
    Vec image;      // common image point
    double residual;  // |G*(P1) - G*(P2)| evaluated directly
    double s0;      // root of s - (R/2) sin s in (0, pi)
};

CollisionWitness helix_collision_witness(double R);

// ---------------------------------------------------------------------------
// Numeric injectivity scan and meshes
// ---------------------------------------------------------------------------

struct CollisionPair {
    Vec section_point_1;
    double t1;
    Vec section_point_2;
    double t2;
    double image_distance;
};

struct ScanReport {
    bool clean = true;
    std::vector<CollisionPair> collisions;       // refined image distance <= 1e-6
    std::optional<CollisionPair> nearest_approach;  // best refined candidate overall
};

// Samples the tube map on a grid, hashes images, and refines candidate pairs
// (distant in parameter, close in space) by Gauss-Newton on the squared
// image distance.
ScanReport injectivity_scan(const TubeSpec& spec, int grid_resolution = 64,
                            double t_separation = -1.0);

struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;  // 0-indexed
    bool closed = false;
    bool regularity_warning = false;  // tube regularity fails somewhere

    double area() const;
};

// Lateral surface mesh for tubes in R^3 (section boundary x t grid, quads
// split into triangles, outward orientation). Throws for ambient != 3 or
// sections without a boundary loop.
TriangleMesh tube_mesh(const TubeSpec& spec, int resolution);

// ASCII OBJ (v/f lines, 1-indexed).
std::string to_obj(const TriangleMesh& mesh);

// Lateral-surface sample grid for any ambient dimension: CSV rows
// u1..u_{n-1},t,y1..y_{n+1} over a hyperspherical parameter grid of the
// section boundary sphere (disk sections).
std::string boundary_sample_csv(const TubeSpec& spec, int resolution);

}  // namespace frenet::tube
