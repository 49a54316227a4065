#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frenet/curve.hpp"
#include "frenet/linalg.hpp"

// Fundamental-theorem machinery: realize a curve from prescribed speed and
// curvatures by integrating the Frenet system V' = M(t) V, classify curves
// of constant curvatures in closed form, and detect congruence.

namespace frenet::reconstruct {

struct FrenetPrescription {
    int n = 0;
    std::function<double(double)> nu;                       // positive
    std::vector<std::function<double(double)>> kappas;     // n-1 entries
    Vec initial_point;                                      // dimension n
    std::vector<Vec> initial_frame;                         // n orthonormal rows, det +1
    double t0 = 0.0, t1 = 1.0;
    double step = 0.0;          // <= 0 picks the default (t1 - t0) / 4000
    bool reorthonormalize = true;

    // Canonical prescription: frame = identity, point = origin.
    static FrenetPrescription canonical(int n, std::function<double(double)> nu,
                                        std::vector<std::function<double(double)>> kappas,
                                        double t0, double t1, double step = 0.0);
};

struct ReconstructedCurve {
    std::vector<double> t;
    std::vector<Vec> points;
    std::vector<std::vector<Vec>> frames;   // frames[i][j] = V_{j+1}(t_i)
    double max_frame_drift = 0.0;           // max |V V^T - I| over the grid
};

// Classical RK4 on the frame system with Simpson accumulation of
// f' = nu V_1 on the same grid. Validates kappa_j > 0 (j <= n-2) on the grid.
ReconstructedCurve integrate_frenet(const FrenetPrescription& p);

// Exact solution for constant coefficients through the normal form of the
// Frenet matrix: V(t) = exp(t M) V(0), f by the closed-form integral of the
// exponential. Grid output matches integrate_frenet's sampling.
ReconstructedCurve integrate_frenet_constant(const FrenetPrescription& p, double nu,
                                             const std::vector<double>& kappas);

// Parameters of the closed-form constant-curvature model: a product of
// circles (radii r_j, angular speeds a_j), for odd n times a line with
// drift b.
struct ConstantCurvatureParams {
    std::vector<double> a;  // positive, strictly descending
    std::vector<double> r;  // positive
    std::optional<double> b;
};

// Closed-form classification of a constant-curvature prescription: angles
// from the normal form of the Frenet matrix, radii from the projections of
// the initial tangent onto its invariant planes, drift from the kernel
// component. Requires kappa_j > 0 for j <= n-2 and kappa_{n-1} != 0; even n
// additionally requires kappa_{n-1} > 0 (the model family's last curvature
// is positive).
ConstantCurvatureParams classify_constant(int n, double nu, const std::vector<double>& kappas);

// The model curve realizing the parameters.
curve::CurveSpec realize_constant(const ConstantCurvatureParams& params);

// Orientation-preserving isometry g = S f + X0 aligning two sampled curves
// through their frames at the first grid point, with the residual check
// max_t |S f(t) + X0 - g(t)|.
struct CongruenceResult {
    Mat rotation;
    Vec translation;
    double max_residual = 0.0;
    double worst_t = 0.0;
    bool congruent = false;
};

CongruenceResult congruence_transform(const std::vector<double>& t,
                                      const std::vector<Vec>& f_points,
                                      const std::vector<Vec>& g_points,
                                      const std::vector<Vec>& f_frame0,
                                      const std::vector<Vec>& g_frame0, double tol = 1e-8);

// Sampled-curve CSV: t,x1..xn[,V1_1..Vn_n].
std::string to_csv(const ReconstructedCurve& curve, bool with_frame);

}  // namespace frenet::reconstruct
