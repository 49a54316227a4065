#pragma once

#include <vector>

#include "frenet/curve.hpp"
#include "frenet/errors.hpp"
#include "frenet/linalg.hpp"

// Frenet apparatus of an (n-1)-regular curve with an arbitrary parameter:
// curvatures from ratios of wedge norms of the derivatives, the frame from
// stabilized Gram-Schmidt plus the generalized cross product.

namespace frenet::apparatus {

struct FrenetApparatus {
    double nu = 0.0;
    std::vector<double> kappas;  // kappa_1 ... kappa_{n-1}; only the last is signed
    std::vector<Vec> frame;      // V_1 ... V_n, orthonormal, det +1
};

// Curvatures at t by the wedge-norm ratio formulas:
//   kappa_1     = |f' ^ f''| / nu^3
//   kappa_m     = |L_{m-1}| |L_{m+1}| / (nu |L_m|^2),     2 <= m <= n-2
//   kappa_{n-1} = |L_{n-2}| ((f' x ... x f^(n-1)) . f^(n)) / (nu |L_{n-1}|^2)
// where |L_m| is the wedge norm of f', ..., f^(m). Throws NonRegularError
// naming the first failing order.
std::vector<double> curvatures(const curve::CurveJet& jet, double t);

// Same values through the recursive chain formulas; kept as an independent
// oracle for curvatures().
std::vector<double> curvatures_chain(const curve::CurveJet& jet, double t);

// Orthonormal frame V_1 ... V_n at t: Gram-Schmidt on f', ..., f^(n-1) with
// positive leading coefficients, V_n the normalized cross product.
std::vector<Vec> frame(const curve::CurveJet& jet, double t);

// Speed, curvatures and frame in one call.
FrenetApparatus apparatus(const curve::CurveJet& jet, double t);

// Classical n = 3 formulas (T, N, B, kappa, tau).
struct Frenet3 {
    Vec tangent, normal, binormal;
    double kappa = 0.0;
    double tau = 0.0;
};
Frenet3 classical_frenet3(const curve::CurveJet& jet, double t);

// kappa_1' at t from a jet with orders up to 3:
//   (nu^3 f''.f''' - nu' (2 |f'^f''|^2 + nu^3 nu'')) / (nu^4 |f'^f''|)
// with nu' = f'.f''/nu and nu'' = (|f''|^2 + f'.f''' - nu'^2)/nu.
double kappa1_derivative(const curve::CurveJet& jet, double t);

// Apparatus for curves whose trace lies in a lower-dimensional subspace
// (zero-padded or genuinely degenerate): the regular part contributes
// kappa_1 ... kappa_{m-1} and V_1 ... V_m; the frame is completed with a
// deterministic Gram-Schmidt sweep of the canonical basis, the remaining
// curvatures are zero, and det(frame) is fixed to +1.
FrenetApparatus extended_apparatus(const curve::CurveJet& jet, double t);

}  // namespace frenet::apparatus
