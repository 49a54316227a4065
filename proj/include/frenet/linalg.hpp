#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

// Small dense linear algebra for dimensions up to ~8. Everything is
// double precision, row-major, and deterministic; no attempt is made to
// scale past tiny matrices.

namespace frenet {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vec+: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vec-: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator*(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline Vec& operator+=(Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vec+=: dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec axpy(double c, const Vec& x, const Vec& y) {
    Vec r(y);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += c * x[i];
    return r;
}

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return (1.0 / n) * a;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Mat(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("Mat: ragged initializer");
            for (double v : row) data_.push_back(v);
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    // Matrix whose columns are the given vectors.
    static Mat from_columns(const std::vector<Vec>& cols) {
        if (cols.empty()) throw std::invalid_argument("from_columns: empty");
        Mat m(cols[0].size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m.rows_)
                throw std::invalid_argument("from_columns: dimension mismatch");
            for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    static Mat from_rows(const std::vector<Vec>& rows) {
        if (rows.empty()) throw std::invalid_argument("from_rows: empty");
        Mat m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                throw std::invalid_argument("from_rows: dimension mismatch");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vec column(std::size_t j) const {
        Vec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    Vec row(std::size_t i) const {
        Vec r(cols_);
        for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    void set_column(std::size_t j, const Vec& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }
    void set_row(std::size_t i, const Vec& r) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = r[j];
    }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat operator*(const Mat& b) const {
        if (cols_ != b.rows_) throw std::invalid_argument("mat*: shape mismatch");
        Mat r(rows_, b.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                double aik = (*this)(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    Vec operator*(const Vec& v) const {
        if (cols_ != v.size()) throw std::invalid_argument("mat*vec: shape mismatch");
        Vec r(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Mat operator+(const Mat& b) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + b.data_[i];
        return r;
    }
    Mat operator-(const Mat& b) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - b.data_[i];
        return r;
    }
    Mat operator*(double c) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = c * data_[i];
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

// Determinant by LU with partial pivoting. Intended for n <= 8.
double lu_determinant(Mat a);

// Solve a x = b by Gaussian elimination with partial pivoting.
Vec lu_solve(Mat a, Vec b);

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
// sorted descending with matching eigenvector columns in `vectors`.
struct SymmetricEigen {
    std::vector<double> values;
    Mat vectors;
};
SymmetricEigen jacobi_eigen(const Mat& symmetric, double tol = 1e-14);

// Modified Gram-Schmidt with one reorthogonalization pass. Vectors whose
// remainder falls below `drop_tol` times their original norm are skipped
// (reported by a false flag). Diagonal coefficients are kept positive.
struct GramSchmidtResult {
    std::vector<Vec> basis;
    std::vector<bool> kept;
};
GramSchmidtResult gram_schmidt(const std::vector<Vec>& vectors, double drop_tol = 1e-12);

// Compensated (Kahan) accumulator.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

}  // namespace frenet
