#include "frenet/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace frenet {

double lu_determinant(Mat a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_determinant: not square");
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

Vec lu_solve(Mat a, Vec b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw std::invalid_argument("lu_solve: shape mismatch");
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw std::invalid_argument("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

SymmetricEigen jacobi_eigen(const Mat& symmetric, double tol) {
    if (symmetric.rows() != symmetric.cols())
        throw std::invalid_argument("jacobi_eigen: not square");
    const std::size_t n = symmetric.rows();
    Mat a = symmetric;
    Mat v = Mat::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100 && off_norm() > tol * scale; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= tol * scale * 1e-2) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return out.values[i] > out.values[j]; });

    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        sorted.vectors.set_column(j, v.column(order[j]));
    }
    return sorted;
}

GramSchmidtResult gram_schmidt(const std::vector<Vec>& vectors, double drop_tol) {
    GramSchmidtResult out;
    out.kept.assign(vectors.size(), false);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        Vec w = vectors[k];
        const double original = norm(w);
        // Two passes of projection removal keep the basis orthonormal even
        // when the input is badly conditioned.
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& b : out.basis) w = axpy(-dot(w, b), b, w);
        double rem = norm(w);
        if (original == 0.0 || rem <= drop_tol * original) continue;
        w = (1.0 / rem) * w;
        // Positive leading coefficient: the new direction keeps a positive
        // component along the vector it came from.
        if (dot(w, vectors[k]) < 0.0) w = -1.0 * w;
        out.basis.push_back(std::move(w));
        out.kept[k] = true;
    }
    return out;
}

}  // namespace frenet
