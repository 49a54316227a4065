#pragma once

#include <optional>
#include <vector>

#include "frenet/linalg.hpp"

// Exterior-algebra and skew-matrix primitives: Gram matrices, wedge norms,
// the generalized cross product, Frenet matrices, and the normal form of a
// skew-symmetric matrix together with its exponential. All operations are
// pure and target small dimensions (n <= 8).

namespace frenet::exterior {

// Scale-invariant independence threshold: a family counts as dependent when
// its wedge norm is below this multiple of the product of the vector norms.
inline constexpr double kIndependenceTol = 1e-9;

// Matrix of pairwise inner products (v_i . v_j). Symmetric positive
// semidefinite; positive definite exactly when the vectors are independent.
Mat gram_matrix(const std::vector<Vec>& vectors);

// sqrt(det(gram_matrix)). The volume of the parallelepiped spanned by the
// vectors; for p == n it equals |det| of the column matrix.
double wedge_norm(const std::vector<Vec>& vectors);

// True when wedge_norm exceeds kIndependenceTol times the product of norms.
bool independent(const std::vector<Vec>& vectors);

// Generalized cross product of n-1 vectors in R^n: the unique w~ with
// w~ . X = det(w_1, ..., w_{n-1}, X) for all X. Cofactor expansion along the
// appended column.
Vec cross_product(const std::vector<Vec>& vectors);

// Skew-symmetric matrix with superdiagonal (i, i+1) = nu * kappa_i driving
// the frame ODE V' = M V. Dimension is kappas.size() + 1.
Mat frenet_matrix(double nu, const std::vector<double>& kappas);

// Canonical form of a skew-symmetric matrix M: an orthogonal Q with
// det Q = +1 such that Q^T M Q is block diagonal with 2x2 rotation
// generators (angles sorted descending) followed by a zero block.
//
// A block with orientation +1 reads [[0, -a], [a, 0]]; the orientation flag
// flips to -1 only when fixing det Q on a kernel-free matrix.
struct SkewNormalForm {
    Mat q;
    std::vector<double> angles;        // positive, sorted descending
    std::vector<int> orientations;     // +1 or -1 per block
    int kernel_dim = 0;

    std::size_t dimension() const { return 2 * angles.size() + kernel_dim; }
    // The block matrix N with Q^T M Q = N.
    Mat reassemble() const;
};

SkewNormalForm skew_normal_form(const Mat& m, double skew_tol = 1e-9,
                                double pairing_tol = 1e-8);

// exp(t M) computed through the normal form: Q blockdiag(rot(a_j t), I) Q^T.
Mat skew_exponential(const SkewNormalForm& nf, double t);

// Integral of the exponential, \int_0^t exp(u M) du, in closed form.
Mat skew_exponential_integral(const SkewNormalForm& nf, double t);

// Derivative matrix of the model curve (cos a_1 t, sin a_1 t, ..., cos a_m t,
// sin a_m t[, t]) at t = 0: entry (i, j) is the j-th derivative of coordinate
// i. Radii and the drift rate are normalized to one; the drift row is present
// exactly when `drift` holds a value. Angles must be distinct and nonzero.
Mat d_matrix(const std::vector<double>& a, std::optional<double> drift = std::nullopt);

// Closed form for det d_matrix: (prod a_j^3) prod_{i<j} (a_i^2 - a_j^2)^2,
// with exponent 5 instead of 3 when the drift row is present.
double d_matrix_det_formula(const std::vector<double>& a,
                            std::optional<double> drift = std::nullopt);

}  // namespace frenet::exterior
