#include "frenet/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "frenet/exterior.hpp"

namespace frenet::reconstruct {

namespace {

Mat frame_matrix(const std::vector<Vec>& frame) { return Mat::from_rows(frame); }

double orthonormality_defect(const Mat& rows) {
    return (rows * rows.transposed() - Mat::identity(rows.rows())).max_abs();
}

void validate_prescription(const FrenetPrescription& p) {
    if (p.n < 2) throw std::invalid_argument("prescription: n must be >= 2");
    if (static_cast<int>(p.kappas.size()) != p.n - 1)
        throw std::invalid_argument("prescription: needs n-1 curvature functions");
    if (!p.nu) throw std::invalid_argument("prescription: missing nu");
    if (static_cast<int>(p.initial_point.size()) != p.n)
        throw std::invalid_argument("prescription: initial point dimension mismatch");
    if (static_cast<int>(p.initial_frame.size()) != p.n)
        throw std::invalid_argument("prescription: initial frame must have n vectors");
    Mat rows = frame_matrix(p.initial_frame);
    if (orthonormality_defect(rows) > 1e-9)
        throw std::invalid_argument("prescription: initial frame is not orthonormal");
    if (lu_determinant(rows) < 0.0)
        throw std::invalid_argument("prescription: initial frame must be positively oriented");
    if (!(p.t1 >= p.t0)) throw std::invalid_argument("prescription: t1 must be >= t0");
}

// Frenet matrix at t, assembled from the prescription.
Mat system_matrix(const FrenetPrescription& p, double t) {
    std::vector<double> k(p.kappas.size());
    for (std::size_t j = 0; j < k.size(); ++j) k[j] = p.kappas[j](t);
    double nu = p.nu(t);
    if (!(nu > 0.0)) throw std::invalid_argument("prescription: nu(t) must stay positive");
    return exterior::frenet_matrix(nu, k);
}

Mat rk4_step(const FrenetPrescription& p, const Mat& r, double t, double h) {
    Mat k1 = system_matrix(p, t) * r;
    Mat k2 = system_matrix(p, t + 0.5 * h) * (r + k1 * (0.5 * h));
    Mat k3 = system_matrix(p, t + 0.5 * h) * (r + k2 * (0.5 * h));
    Mat k4 = system_matrix(p, t + h) * (r + k3 * h);
    return r + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

// Modified Gram-Schmidt on the rows, keeping the direction of row 0.
void reorthonormalize_rows(Mat& r) {
    const std::size_t n = r.rows();
    std::vector<Vec> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = r.row(i);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) rows[i] = axpy(-dot(rows[i], rows[j]), rows[j], rows[i]);
        rows[i] = normalized(rows[i]);
    }
    for (std::size_t i = 0; i < n; ++i) r.set_row(i, rows[i]);
}

}  // namespace

FrenetPrescription FrenetPrescription::canonical(int n, std::function<double(double)> nu,
                                                 std::vector<std::function<double(double)>> kappas,
                                                 double t0, double t1, double step) {
    FrenetPrescription p;
    p.n = n;
    p.nu = std::move(nu);
    p.kappas = std::move(kappas);
    p.initial_point.assign(n, 0.0);
    p.initial_frame.resize(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) p.initial_frame[i][i] = 1.0;
    p.t0 = t0;
    p.t1 = t1;
    p.step = step;
    return p;
}

ReconstructedCurve integrate_frenet(const FrenetPrescription& p) {
    validate_prescription(p);
    double h = p.step > 0.0 ? p.step : (p.t1 - p.t0) / 4000.0;
    if (!(h > 0.0)) throw std::invalid_argument("integrate_frenet: step must be positive");
    const long steps = std::max(1L, std::lround((p.t1 - p.t0) / h));
    h = (p.t1 - p.t0) / static_cast<double>(steps);

    // Positivity of kappa_1..kappa_{n-2} on the output grid.
    for (long i = 0; i <= steps; ++i) {
        double t = p.t0 + i * h;
        for (int j = 0; j + 1 < p.n - 1; ++j)
            if (!(p.kappas[j](t) > 0.0))
                throw std::invalid_argument(
                    "integrate_frenet: kappa_" + std::to_string(j + 1) +
                    " must stay positive (violated at t = " + std::to_string(t) + ")");
    }

    ReconstructedCurve out;
    out.t.reserve(steps + 1);
    out.points.reserve(steps + 1);
    out.frames.reserve(steps + 1);

    Mat r = frame_matrix(p.initial_frame);
    Vec f = p.initial_point;
    auto record = [&](double t, const Mat& rows, const Vec& point) {
        out.t.push_back(t);
        out.points.push_back(point);
        std::vector<Vec> frame(p.n);
        for (int i = 0; i < p.n; ++i) frame[i] = rows.row(i);
        out.frames.push_back(std::move(frame));
        out.max_frame_drift = std::max(out.max_frame_drift, orthonormality_defect(rows));
    };
    record(p.t0, r, f);

    for (long i = 0; i < steps; ++i) {
        double t = p.t0 + i * h;
        // Midpoint frame for the Simpson accumulation of f' = nu V_1.
        Mat r_mid = rk4_step(p, r, t, 0.5 * h);
        Mat r_next = rk4_step(p, r, t, h);
        if (p.reorthonormalize) {
            reorthonormalize_rows(r_mid);
            reorthonormalize_rows(r_next);
        }
        Vec v0 = p.nu(t) * r.row(0);
        Vec v1 = p.nu(t + 0.5 * h) * r_mid.row(0);
        Vec v2 = p.nu(t + h) * r_next.row(0);
        for (int c = 0; c < p.n; ++c) f[c] += h / 6.0 * (v0[c] + 4.0 * v1[c] + v2[c]);
        r = r_next;
        record(t + h, r, f);
    }
    return out;
}

ReconstructedCurve integrate_frenet_constant(const FrenetPrescription& p, double nu,
                                             const std::vector<double>& kappas) {
    validate_prescription(p);
    if (static_cast<int>(kappas.size()) != p.n - 1)
        throw std::invalid_argument("integrate_frenet_constant: curvature count mismatch");
    for (int j = 0; j + 1 < p.n - 1; ++j)
        if (!(kappas[j] > 0.0))
            throw std::invalid_argument("integrate_frenet_constant: kappa_" + std::to_string(j + 1) +
                                        " must be positive");
    double h = p.step > 0.0 ? p.step : (p.t1 - p.t0) / 4000.0;
    const long steps = std::max(1L, std::lround((p.t1 - p.t0) / h));
    h = (p.t1 - p.t0) / static_cast<double>(steps);

    exterior::SkewNormalForm nf =
        exterior::skew_normal_form(exterior::frenet_matrix(nu, kappas));
    Mat r0 = frame_matrix(p.initial_frame);

    ReconstructedCurve out;
    for (long i = 0; i <= steps; ++i) {
        double t = p.t0 + i * h;
        double u = t - p.t0;
        Mat rows = exterior::skew_exponential(nf, u) * r0;
        Mat integral = exterior::skew_exponential_integral(nf, u);
        Vec f = p.initial_point;
        for (int j = 0; j < p.n; ++j) f = axpy(nu * integral(0, j), p.initial_frame[j], f);
        out.t.push_back(t);
        out.points.push_back(f);
        std::vector<Vec> frame(p.n);
        for (int k = 0; k < p.n; ++k) frame[k] = rows.row(k);
        out.frames.push_back(std::move(frame));
        out.max_frame_drift = std::max(out.max_frame_drift, orthonormality_defect(rows));
    }
    return out;
}

ConstantCurvatureParams classify_constant(int n, double nu, const std::vector<double>& kappas) {
    if (n < 2) throw std::invalid_argument("classify_constant: n must be >= 2");
    if (static_cast<int>(kappas.size()) != n - 1)
        throw std::invalid_argument("classify_constant: needs n-1 curvatures");
    if (!(nu > 0.0)) throw std::invalid_argument("classify_constant: nu must be positive");
    for (int j = 0; j + 1 < n - 1; ++j)
        if (!(kappas[j] > 0.0))
            throw std::invalid_argument("classify_constant: kappa_" + std::to_string(j + 1) +
                                        " must be positive");
    if (kappas[n - 2] == 0.0)
        throw std::invalid_argument(
            "classify_constant: kappa_{n-1} = 0 is outside the classification theorems");
    if (n % 2 == 0 && kappas[n - 2] < 0.0)
        throw std::invalid_argument(
            "classify_constant: even-dimensional model curves have positive last curvature; "
            "a negative value names a mirror image outside the family");

    exterior::SkewNormalForm nf =
        exterior::skew_normal_form(exterior::frenet_matrix(nu, kappas));

    if (n % 2 == 0 && nf.kernel_dim != 0)
        throw std::invalid_argument("classify_constant: unexpected kernel for even n");
    if (n % 2 == 1 && nf.kernel_dim != 1)
        throw std::invalid_argument("classify_constant: expected a one-dimensional kernel");
    for (std::size_t j = 0; j + 1 < nf.angles.size(); ++j)
        if (std::abs(nf.angles[j] - nf.angles[j + 1]) <= 1e-8 * nf.angles[j])
            throw std::invalid_argument(
                "classify_constant: repeated rotation angles; equal angles collapse the trace "
                "into a lower-dimensional subspace and the curve is not (n-1)-regular");

    // Radii from the projection of the initial tangent e_1 onto each
    // invariant plane; the drift is its kernel component.
    ConstantCurvatureParams params;
    params.a = nf.angles;
    params.r.resize(nf.angles.size());
    for (std::size_t j = 0; j < nf.angles.size(); ++j) {
        double proj = std::hypot(nf.q(0, 2 * j), nf.q(0, 2 * j + 1));
        if (proj <= 1e-12)
            throw std::invalid_argument(
                "classify_constant: tangent has no component in an invariant plane");
        params.r[j] = nu * proj / nf.angles[j];
    }
    if (n % 2 == 1) {
        double kernel_component = std::abs(nf.q(0, static_cast<std::size_t>(n) - 1));
        if (kernel_component <= 1e-12)
            throw std::invalid_argument(
                "classify_constant: tangent has no kernel component; the last curvature would "
                "be undefined");
        params.b = (kappas[n - 2] > 0.0 ? 1.0 : -1.0) * nu * kernel_component;
    }
    return params;
}

curve::CurveSpec realize_constant(const ConstantCurvatureParams& params) {
    if (params.a.empty() || params.a.size() != params.r.size())
        throw std::invalid_argument("realize_constant: a and r must be nonempty, same length");
    if (params.b)
        return {curve::ConstantCurvatureOdd{params.a, params.r, *params.b}};
    return {curve::ConstantCurvatureEven{params.a, params.r}};
}

CongruenceResult congruence_transform(const std::vector<double>& t,
                                      const std::vector<Vec>& f_points,
                                      const std::vector<Vec>& g_points,
                                      const std::vector<Vec>& f_frame0,
                                      const std::vector<Vec>& g_frame0, double tol) {
    if (t.size() != f_points.size() || t.size() != g_points.size() || t.empty())
        throw std::invalid_argument("congruence_transform: sample sets must share the grid");

    Mat f_cols = Mat::from_columns(f_frame0);
    Mat g_cols = Mat::from_columns(g_frame0);
    CongruenceResult out;
    out.rotation = g_cols * f_cols.transposed();
    Vec sf0 = out.rotation * f_points.front();
    out.translation = g_points.front() - sf0;

    for (std::size_t i = 0; i < t.size(); ++i) {
        Vec mapped = out.rotation * f_points[i] + out.translation;
        double res = norm(mapped - g_points[i]);
        if (res > out.max_residual) {
            out.max_residual = res;
            out.worst_t = t[i];
        }
    }
    out.congruent = out.max_residual <= tol;
    return out;
}

std::string to_csv(const ReconstructedCurve& curve, bool with_frame) {
    std::ostringstream os;
    const int n = curve.points.empty() ? 0 : static_cast<int>(curve.points[0].size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    if (with_frame)
        for (int j = 1; j <= n; ++j)
            for (int i = 1; i <= n; ++i) os << ",V" << j << "_" << i;
    os << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        os << ',' << buf;
    };
    for (std::size_t row = 0; row < curve.t.size(); ++row) {
        std::snprintf(buf, sizeof buf, "%.15g", curve.t[row]);
        os << buf;
        for (int i = 0; i < n; ++i) put(curve.points[row][i]);
        if (with_frame)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) put(curve.frames[row][j][i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace frenet::reconstruct
