#include "frenet/frenet.hpp"

#include <algorithm>
#include <cmath>

#include "frenet/exterior.hpp"

namespace frenet::apparatus {

namespace {

// f', ..., f^(k) from a jet evaluation.
std::vector<Vec> derivatives(const std::vector<Vec>& jet_values, int k) {
    return {jet_values.begin() + 1, jet_values.begin() + 1 + k};
}

// Wedge norms |L_m| of f', ..., f^(m) for m = 0..k, with |L_0| = 1. Orders
// whose family drops below the scale-invariant independence threshold are
// reported through `regular`.
struct WedgeLadder {
    std::vector<double> norms;
    std::vector<bool> regular;
};

WedgeLadder wedge_ladder(const std::vector<Vec>& jet_values, int k) {
    WedgeLadder ladder;
    ladder.norms.assign(k + 1, 1.0);
    ladder.regular.assign(k + 1, true);
    double scale = 1.0;
    for (int m = 1; m <= k; ++m) {
        std::vector<Vec> fam = derivatives(jet_values, m);
        scale *= norm(fam.back());
        ladder.norms[m] = exterior::wedge_norm(fam);
        ladder.regular[m] = ladder.norms[m] > exterior::kIndependenceTol * scale;
    }
    return ladder;
}

void require_regular(const WedgeLadder& ladder, int upto, double t) {
    for (int m = 1; m <= upto; ++m)
        if (!ladder.regular[m]) throw NonRegularError(m, t);
}

}  // namespace

std::vector<double> curvatures(const curve::CurveJet& jet, double t) {
    const int n = jet.dimension();
    if (n < 2) throw std::invalid_argument("curvatures: dimension must be >= 2");
    if (jet.max_order() < n) throw std::invalid_argument("curvatures: jet must supply orders 1..n");
    std::vector<Vec> values = jet.eval(t);

    WedgeLadder ladder = wedge_ladder(values, n - 1);
    require_regular(ladder, n - 1, t);
    const double nu = ladder.norms[1];

    std::vector<double> kappa(n - 1);
    if (n >= 3) kappa[0] = ladder.norms[2] / (nu * nu * nu);
    for (int m = 2; m <= n - 2; ++m)
        kappa[m - 1] = ladder.norms[m - 1] * ladder.norms[m + 1] / (nu * ladder.norms[m] * ladder.norms[m]);

    Vec cross = exterior::cross_product(derivatives(values, n - 1));
    double numerator = dot(cross, values[n]);
    kappa[n - 2] = ladder.norms[n - 2] * numerator / (nu * ladder.norms[n - 1] * ladder.norms[n - 1]);
    return kappa;
}

std::vector<double> curvatures_chain(const curve::CurveJet& jet, double t) {
    const int n = jet.dimension();
    if (n < 2) throw std::invalid_argument("curvatures_chain: dimension must be >= 2");
    if (jet.max_order() < n)
        throw std::invalid_argument("curvatures_chain: jet must supply orders 1..n");
    std::vector<Vec> values = jet.eval(t);

    WedgeLadder ladder = wedge_ladder(values, n - 1);
    require_regular(ladder, n - 1, t);
    const double nu = ladder.norms[1];

    std::vector<double> kappa(n - 1);
    double kprod = 1.0;     // kappa_1 ... kappa_{m-1}
    double nu_pow = nu * nu;  // nu^{m+1}, updated at the top of each step
    if (n >= 3) kappa[0] = ladder.norms[2] / (nu * nu * nu);
    for (int m = 2; m <= n - 2; ++m) {
        nu_pow *= nu;
        kprod *= kappa[m - 2];
        kappa[m - 1] = ladder.norms[m + 1] / (nu_pow * kprod * ladder.norms[m]);
    }
    if (n >= 3) {
        nu_pow *= nu;  // nu^n
        kprod *= kappa[n - 3];
    }
    Vec cross = exterior::cross_product(derivatives(values, n - 1));
    kappa[n - 2] = dot(cross, values[n]) / (nu_pow * kprod * ladder.norms[n - 1]);
    return kappa;
}

std::vector<Vec> frame(const curve::CurveJet& jet, double t) {
    const int n = jet.dimension();
    if (n < 2) throw std::invalid_argument("frame: dimension must be >= 2");
    if (jet.max_order() < n - 1)
        throw std::invalid_argument("frame: jet must supply orders 1..n-1");
    std::vector<Vec> values = jet.eval(t);
    std::vector<Vec> derivs = derivatives(values, n - 1);

    WedgeLadder ladder = wedge_ladder(values, n - 1);
    require_regular(ladder, n - 1, t);

    GramSchmidtResult gs = gram_schmidt(derivs);
    std::vector<Vec> result = gs.basis;
    Vec last = exterior::cross_product(result);
    result.push_back(normalized(last));
    return result;
}

FrenetApparatus apparatus(const curve::CurveJet& jet, double t) {
    FrenetApparatus out;
    std::vector<Vec> values = jet.eval(t);
    out.nu = curve::speed(values, t);
    out.kappas = curvatures(jet, t);
    out.frame = frame(jet, t);
    return out;
}

Frenet3 classical_frenet3(const curve::CurveJet& jet, double t) {
    if (jet.dimension() != 3) throw std::invalid_argument("classical_frenet3: needs n = 3");
    if (jet.max_order() < 3) throw std::invalid_argument("classical_frenet3: needs orders 1..3");
    std::vector<Vec> values = jet.eval(t);
    const Vec& f1 = values[1];
    const Vec& f2 = values[2];
    const Vec& f3 = values[3];

    double nu = curve::speed(values, t);
    Vec f1xf2 = exterior::cross_product({f1, f2});
    double w2 = norm(f1xf2);
    if (!(w2 > exterior::kIndependenceTol * nu * norm(f2))) throw NonRegularError(2, t);

    Frenet3 out;
    out.tangent = (1.0 / nu) * f1;
    out.binormal = (1.0 / w2) * f1xf2;
    out.normal = exterior::cross_product({out.binormal, out.tangent});
    out.kappa = w2 / (nu * nu * nu);
    out.tau = dot(f1xf2, f3) / (w2 * w2);
    return out;
}

double kappa1_derivative(const curve::CurveJet& jet, double t) {
    if (jet.max_order() < 3)
        throw std::invalid_argument("kappa1_derivative: needs orders 1..3");
    std::vector<Vec> values = jet.eval(t);
    const Vec& f1 = values[1];
    const Vec& f2 = values[2];
    const Vec& f3 = values[3];

    double nu = curve::speed(values, t);
    double w2 = exterior::wedge_norm({f1, f2});
    if (!(w2 > exterior::kIndependenceTol * nu * norm(f2))) throw NonRegularError(2, t);

    // Speed derivatives from the jet.
    double nu1 = dot(f1, f2) / nu;
    double nu2 = (dot(f2, f2) + dot(f1, f3) - nu1 * nu1) / nu;
    double nu3 = nu * nu * nu;
    return (nu3 * dot(f2, f3) - nu1 * (2.0 * w2 * w2 + nu3 * nu2)) / (nu3 * nu * w2);
}

FrenetApparatus extended_apparatus(const curve::CurveJet& jet, double t) {
    const int n = jet.dimension();
    if (n < 2) throw std::invalid_argument("extended_apparatus: dimension must be >= 2");
    std::vector<Vec> values = jet.eval(t);

    // Effective regularity order: the longest initial run of independent
    // derivatives the jet can certify.
    const int max_m = std::min(n - 1, jet.max_order());
    WedgeLadder ladder = wedge_ladder(values, max_m);
    int m = 0;
    while (m < max_m && ladder.regular[m + 1]) ++m;
    if (m == 0) throw NonRegularError(1, t);

    FrenetApparatus out;
    out.nu = ladder.norms[1];
    out.kappas.assign(n - 1, 0.0);
    if (m >= 2) out.kappas[0] = ladder.norms[2] / std::pow(out.nu, 3);
    for (int j = 2; j <= m - 1; ++j)
        out.kappas[j - 1] =
            ladder.norms[j - 1] * ladder.norms[j + 1] / (out.nu * ladder.norms[j] * ladder.norms[j]);

    GramSchmidtResult gs = gram_schmidt(derivatives(values, m));
    out.frame = gs.basis;

    // Complete with the canonical basis, deterministically.
    for (int i = 0; i < n && static_cast<int>(out.frame.size()) < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& b : out.frame) e = axpy(-dot(e, b), b, e);
        double rem = norm(e);
        if (rem > 1e-8) out.frame.push_back((1.0 / rem) * e);
    }
    if (static_cast<int>(out.frame.size()) != n)
        throw std::runtime_error("extended_apparatus: frame completion failed");

    // Positive orientation, fixed by flipping the last completion vector.
    if (lu_determinant(Mat::from_columns(out.frame)) < 0.0)
        out.frame.back() = -1.0 * out.frame.back();
    return out;
}

}  // namespace frenet::apparatus
