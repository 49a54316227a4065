#include "frenet/exterior.hpp"

#include <algorithm>
#include <cmath>

namespace frenet::exterior {

namespace {

void check_same_dimension(const std::vector<Vec>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("empty vector family");
    const std::size_t n = vectors[0].size();
    for (const Vec& v : vectors)
        if (v.size() != n) throw std::invalid_argument("vector dimension mismatch");
}

}  // namespace

Mat gram_matrix(const std::vector<Vec>& vectors) {
    check_same_dimension(vectors);
    const std::size_t p = vectors.size();
    const std::size_t n = vectors[0].size();
    if (p > n) throw std::invalid_argument("gram_matrix: more vectors than dimension");
    Mat g(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            double v = dot(vectors[i], vectors[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

double wedge_norm(const std::vector<Vec>& vectors) {
    double d = lu_determinant(gram_matrix(vectors));
    return d > 0.0 ? std::sqrt(d) : 0.0;
}

bool independent(const std::vector<Vec>& vectors) {
    double scale = 1.0;
    for (const Vec& v : vectors) scale *= norm(v);
    return wedge_norm(vectors) > kIndependenceTol * scale;
}

Vec cross_product(const std::vector<Vec>& vectors) {
    check_same_dimension(vectors);
    const std::size_t n = vectors[0].size();
    if (n < 2 || vectors.size() != n - 1)
        throw std::invalid_argument("cross_product: needs exactly n-1 vectors in R^n, n >= 2");

    // Component k is the cofactor of entry (k, n-1) in the matrix whose
    // columns are the inputs followed by the indeterminate column.
    Vec result(n);
    for (std::size_t k = 0; k < n; ++k) {
        Mat minor(n - 1, n - 1);
        std::size_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0; j + 1 < n; ++j) minor(r, j) = vectors[j][i];
            ++r;
        }
        double sign = ((k + n - 1) % 2 == 0) ? 1.0 : -1.0;
        result[k] = sign * lu_determinant(minor);
    }
    return result;
}

Mat frenet_matrix(double nu, const std::vector<double>& kappas) {
    if (nu <= 0.0) throw std::invalid_argument("frenet_matrix: nu must be positive");
    const std::size_t n = kappas.size() + 1;
    Mat m(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = nu * kappas[i];
        m(i + 1, i) = -nu * kappas[i];
    }
    return m;
}

Mat SkewNormalForm::reassemble() const {
    const std::size_t n = dimension();
    Mat nmat(n, n);
    for (std::size_t j = 0; j < angles.size(); ++j) {
        double a = orientations[j] * angles[j];
        nmat(2 * j, 2 * j + 1) = -a;
        nmat(2 * j + 1, 2 * j) = a;
    }
    return nmat;
}

SkewNormalForm skew_normal_form(const Mat& m, double skew_tol, double pairing_tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("skew_normal_form: not square");
    const std::size_t n = m.rows();
    const double scale = std::max(m.max_abs(), 1.0);
    if ((m + m.transposed()).max_abs() > skew_tol * scale)
        throw std::invalid_argument("skew_normal_form: matrix is not skew-symmetric");

    // M^2 is symmetric negative semidefinite; paired eigenvalues -a^2 mark
    // the invariant rotation planes, zeros mark the kernel.
    SymmetricEigen eig = jacobi_eigen(m * m);
    const double lam_scale = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    const double zero_tol = std::max(pairing_tol * lam_scale, 1e-300);

    SkewNormalForm nf;
    std::vector<Vec> block_columns;
    std::vector<Vec> kernel_columns;

    // Eigenvalues are sorted descending, so zeros come first and the most
    // negative (largest angle) last; walk from the back for descending angles.
    std::vector<bool> used(n, false);
    for (std::size_t idx = n; idx-- > 0;) {
        if (used[idx]) continue;
        double lam = eig.values[idx];
        if (lam >= -zero_tol) {
            kernel_columns.push_back(eig.vectors.column(idx));
            used[idx] = true;
            continue;
        }
        double a = std::sqrt(-lam);
        Vec v = eig.vectors.column(idx);
        // Within a repeated eigenvalue the Jacobi columns need not respect
        // the plane pairing; orthogonalize against blocks already taken.
        for (const Vec& b : block_columns) v = axpy(-dot(v, b), b, v);
        double vn = norm(v);
        if (vn < 1e-8) {
            // This eigenvector was consumed by an earlier block of the same
            // eigenvalue; skip it.
            used[idx] = true;
            continue;
        }
        v = (1.0 / vn) * v;
        Vec w = (1.0 / a) * (m * v);
        nf.angles.push_back(a);
        nf.orientations.push_back(+1);
        block_columns.push_back(v);
        block_columns.push_back(w);
        used[idx] = true;
        // Mark the partner eigenvector (same eigenvalue) as consumed.
        for (std::size_t k = idx; k-- > 0;) {
            if (used[k]) continue;
            if (std::abs(eig.values[k] - lam) <= pairing_tol * std::max(std::abs(lam), 1.0)) {
                used[k] = true;
                break;
            }
        }
    }

    // Angles were collected in descending order already (most negative
    // eigenvalue first); enforce it in case of near-ties.
    std::vector<std::size_t> order(nf.angles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return nf.angles[i] > nf.angles[j];
    });
    std::vector<double> sorted_angles;
    std::vector<Vec> sorted_columns;
    for (std::size_t i : order) {
        sorted_angles.push_back(nf.angles[i]);
        sorted_columns.push_back(block_columns[2 * i]);
        sorted_columns.push_back(block_columns[2 * i + 1]);
    }
    nf.angles = std::move(sorted_angles);
    nf.kernel_dim = static_cast<int>(kernel_columns.size());

    // Orthonormalize the kernel block (Jacobi already gives orthonormal
    // vectors; this guards repeated-zero roundoff).
    GramSchmidtResult k = gram_schmidt(kernel_columns);

    nf.q = Mat(n, n);
    for (std::size_t j = 0; j < sorted_columns.size(); ++j)
        nf.q.set_column(j, sorted_columns[j]);
    for (std::size_t j = 0; j < k.basis.size(); ++j)
        nf.q.set_column(sorted_columns.size() + j, k.basis[j]);

    if (lu_determinant(nf.q) < 0.0) {
        if (nf.kernel_dim > 0) {
            std::size_t last = n - 1;
            Vec c = nf.q.column(last);
            nf.q.set_column(last, -1.0 * c);
        } else {
            // No kernel column to flip: reverse the orientation of the last
            // (smallest-angle) block instead.
            std::size_t j = nf.angles.size() - 1;
            Vec c = nf.q.column(2 * j + 1);
            nf.q.set_column(2 * j + 1, -1.0 * c);
            nf.orientations[j] = -1;
        }
    }
    return nf;
}

Mat skew_exponential(const SkewNormalForm& nf, double t) {
    const std::size_t n = nf.dimension();
    Mat blocks = Mat::identity(n);
    for (std::size_t j = 0; j < nf.angles.size(); ++j) {
        double c = std::cos(nf.angles[j] * t);
        double s = nf.orientations[j] * std::sin(nf.angles[j] * t);
        blocks(2 * j, 2 * j) = c;
        blocks(2 * j, 2 * j + 1) = -s;
        blocks(2 * j + 1, 2 * j) = s;
        blocks(2 * j + 1, 2 * j + 1) = c;
    }
    return nf.q * blocks * nf.q.transposed();
}

Mat skew_exponential_integral(const SkewNormalForm& nf, double t) {
    const std::size_t n = nf.dimension();
    Mat blocks(n, n);
    for (std::size_t j = 0; j < nf.angles.size(); ++j) {
        double a = nf.angles[j];
        double s = std::sin(a * t) / a;
        double c = nf.orientations[j] * (1.0 - std::cos(a * t)) / a;
        blocks(2 * j, 2 * j) = s;
        blocks(2 * j, 2 * j + 1) = -c;
        blocks(2 * j + 1, 2 * j) = c;
        blocks(2 * j + 1, 2 * j + 1) = s;
    }
    for (std::size_t j = 2 * nf.angles.size(); j < n; ++j) blocks(j, j) = t;
    return nf.q * blocks * nf.q.transposed();
}

namespace {

void check_angles(const std::vector<double>& a) {
    if (a.empty()) throw std::invalid_argument("d_matrix: empty angle list");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) throw std::invalid_argument("d_matrix: zero angle");
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a[i] == a[j]) throw std::invalid_argument("d_matrix: repeated angle");
    }
}

}  // namespace

Mat d_matrix(const std::vector<double>& a, std::optional<double> drift) {
    check_angles(a);
    const std::size_t m = a.size();
    const std::size_t n = 2 * m + (drift ? 1 : 0);
    // d^j/dt^j cos(at) at 0 cycles (0, -a^2, 0, a^4, ...) starting at j=1;
    // sin(at) cycles (a, 0, -a^3, 0, ...).
    static const int cos_cycle[4] = {0, -1, 0, 1};   // j % 4 == 1, 2, 3, 0
    static const int sin_cycle[4] = {1, 0, -1, 0};
    Mat d(n, n);
    for (std::size_t k = 0; k < m; ++k) {
        double p = 1.0;
        for (std::size_t j = 1; j <= n; ++j) {
            p *= a[k];
            d(2 * k, j - 1) = cos_cycle[j % 4] * p;
            d(2 * k + 1, j - 1) = sin_cycle[j % 4] * p;
        }
    }
    if (drift) d(n - 1, 0) = 1.0;  // unit-rate drift row (see header)
    return d;
}

double d_matrix_det_formula(const std::vector<double>& a, std::optional<double> drift) {
    check_angles(a);
    const int exponent = drift ? 5 : 3;
    double det = 1.0;
    for (double aj : a) det *= std::pow(aj, exponent);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            double diff = a[i] * a[i] - a[j] * a[j];
            det *= diff * diff;
        }
    return det;
}

}  // namespace frenet::exterior
