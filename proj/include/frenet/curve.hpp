#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frenet/linalg.hpp"
#include "frenet/quadrature.hpp"

// Curve representations that can emit derivative jets: closed-form model
// curves with exact analytic derivatives, a finite-difference fallback for
// black-box point functions, and spline-backed tabulated data.

namespace frenet::curve {

inline constexpr int kMaxJetOrder = 8;

struct CurveSpec;

struct Polynomial {
    // One ascending coefficient list per coordinate: coords[i][k] multiplies t^k.
    std::vector<std::vector<double>> coords;
};

// (radius cos t, radius sin t, pitch t)
struct Helix {
    double radius;
    double pitch;
};

struct Circle {
    double radius;
};

// (r_1 cos a_1 t, r_1 sin a_1 t, ..., r_m cos a_m t, r_m sin a_m t)
struct ConstantCurvatureEven {
    std::vector<double> a;
    std::vector<double> r;
};

// Same with a trailing drift coordinate b t.
struct ConstantCurvatureOdd {
    std::vector<double> a;
    std::vector<double> r;
    double b;
};

// Lower-dimensional curve padded with zero coordinates up to `ambient`.
struct Embedded {
    std::shared_ptr<const CurveSpec> inner;
    int ambient;
};

// Point samples (strictly increasing t) interpolated by natural cubic
// splines. Jets from this variant are approximate and capped at order 3.
struct Tabulated {
    std::vector<double> t;
    std::vector<Vec> points;
};

struct CurveSpec {
    std::variant<Polynomial, Helix, Circle, ConstantCurvatureEven, ConstantCurvatureOdd,
                 Embedded, Tabulated>
        value;

    int dimension() const;
};

// A curve presented as t -> (f(t), f'(t), ..., f^(k)(t)).
class CurveJet {
public:
    CurveJet() = default;
    CurveJet(int dimension, int max_order, std::function<std::vector<Vec>(double)> eval,
             bool approximate = false)
        : dimension_(dimension),
          max_order_(max_order),
          approximate_(approximate),
          eval_(std::move(eval)) {}

    int dimension() const { return dimension_; }
    int max_order() const { return max_order_; }
    // True when derivatives come from interpolation rather than closed forms.
    bool approximate() const { return approximate_; }

    // (f(t), f'(t), ..., f^(max_order)(t))
    std::vector<Vec> eval(double t) const { return eval_(t); }

private:
    int dimension_ = 0;
    int max_order_ = 0;
    bool approximate_ = false;
    std::function<std::vector<Vec>(double)> eval_;
};

// Analytic jets for every closed-form variant; spline jets for tabulated
// data. Throws std::invalid_argument on bad spec parameters.
CurveJet make_jet(const CurveSpec& spec, int max_order);

// Central-difference jet of a black-box point function. Stencil for the j-th
// derivative has width 2j+1; truncation is O(h^2).
std::vector<Vec> finite_difference_jet(const std::function<Vec(double)>& point_fn, double t,
                                       int order, double h);

// Truncation/round-off balanced default step for finite differences.
double finite_difference_step(int order, double t);

// nu(t) = |f'(t)|. Throws NonRegularError on a zero-speed point.
double speed(const std::vector<Vec>& jet_values, double t = 0.0);

// Arc length of the curve over [a, b] by adaptive quadrature.
double arc_length(const CurveJet& jet, double a, double b, double tol = 1e-10);

// True when f', ..., f^(k) are independent at t under the scale-invariant
// wedge-norm threshold.
bool regularity_check(const CurveJet& jet, double t, int k);

// --- External interface: JSON spec and tabulated CSV ---------------------

// {"variant": ..., "params": {...}}
CurveSpec curve_spec_from_json(const std::string& json_text);
std::string curve_spec_to_json(const CurveSpec& spec);

// Header `t,x1,...,xn`, one sample per row, strictly increasing t.
Tabulated read_tabulated_csv(const std::string& path);

}  // namespace frenet::curve
