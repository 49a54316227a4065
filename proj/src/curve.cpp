#include "frenet/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "frenet/errors.hpp"
#include "frenet/exterior.hpp"
#include "json.hpp"

namespace frenet::curve {

namespace {

void validate_angles_radii(const std::vector<double>& a, const std::vector<double>& r) {
    if (a.empty() || a.size() != r.size())
        throw std::invalid_argument("constant-curvature spec: a and r must be nonempty, same length");
    for (double aj : a)
        if (!(aj > 0.0)) throw std::invalid_argument("constant-curvature spec: angles must be positive");
    for (double rj : r)
        if (!(rj > 0.0)) throw std::invalid_argument("constant-curvature spec: radii must be positive");
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a[i] == a[j]) throw std::invalid_argument("constant-curvature spec: angles must be distinct");
}

// One closed-form coordinate: amp * cos/sin(freq t) or linear t-coefficient.
struct TrigCoord {
    double amp;
    double freq;
    bool is_sin;
};

std::vector<Vec> eval_trig_jet(const std::vector<TrigCoord>& trig, std::optional<double> linear,
                               int max_order, double t) {
    const std::size_t n = trig.size() + (linear ? 1 : 0);
    std::vector<Vec> jet(max_order + 1, Vec(n, 0.0));
    for (std::size_t i = 0; i < trig.size(); ++i) {
        const auto& c = trig[i];
        double cv = std::cos(c.freq * t), sv = std::sin(c.freq * t);
        // Derivative cycle of cos: (cos, -sin, -cos, sin); sin starts shifted.
        double cyc_c[4] = {cv, -sv, -cv, sv};
        double cyc_s[4] = {sv, cv, -sv, -cv};
        double p = c.amp;
        for (int j = 0; j <= max_order; ++j) {
            jet[j][i] = c.is_sin ? cyc_s[j % 4] * p : cyc_c[j % 4] * p;
            p *= c.freq;
        }
    }
    if (linear) {
        jet[0][n - 1] = *linear * t;
        if (max_order >= 1) jet[1][n - 1] = *linear;
    }
    return jet;
}

CurveJet make_trig_jet(std::vector<TrigCoord> trig, std::optional<double> linear, int max_order) {
    const int n = static_cast<int>(trig.size() + (linear ? 1 : 0));
    return CurveJet(n, max_order, [trig = std::move(trig), linear, max_order](double t) {
        return eval_trig_jet(trig, linear, max_order, t);
    });
}

double eval_poly(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    return d;
}

// Natural cubic spline through (t_i, y_i).
struct Spline {
    std::vector<double> t, y, m;  // m: second derivatives at knots

    void build() {
        const std::size_t n = t.size();
        m.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm on the interior unknowns.
        for (std::size_t i = 2; i + 1 < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        for (std::size_t i = n - 1; i-- > 1;) {
            double upper = (i + 2 < n) ? c[i] * m[i + 1] : 0.0;
            m[i] = (d[i] - upper) / b[i];
        }
    }

    // Value and derivatives 1..3 on the segment containing x (boundary
    // segments extrapolate).
    void eval(double x, double out[4]) const {
        std::size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
        i = std::min(std::max<std::size_t>(i, 1), t.size() - 1) - 1;
        double h = t[i + 1] - t[i];
        double A = (t[i + 1] - x) / h, B = (x - t[i]) / h;
        out[0] = A * y[i] + B * y[i + 1] +
                 ((A * A * A - A) * m[i] + (B * B * B - B) * m[i + 1]) * h * h / 6.0;
        out[1] = (y[i + 1] - y[i]) / h - (3.0 * A * A - 1.0) * h * m[i] / 6.0 +
                 (3.0 * B * B - 1.0) * h * m[i + 1] / 6.0;
        out[2] = A * m[i] + B * m[i + 1];
        out[3] = (m[i + 1] - m[i]) / h;
    }
};

}  // namespace

int CurveSpec::dimension() const {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Polynomial>)
                return static_cast<int>(v.coords.size());
            else if constexpr (std::is_same_v<T, Helix>)
                return 3;
            else if constexpr (std::is_same_v<T, Circle>)
                return 2;
            else if constexpr (std::is_same_v<T, ConstantCurvatureEven>)
                return static_cast<int>(2 * v.a.size());
            else if constexpr (std::is_same_v<T, ConstantCurvatureOdd>)
                return static_cast<int>(2 * v.a.size() + 1);
            else if constexpr (std::is_same_v<T, Embedded>)
                return v.ambient;
            else
                return v.points.empty() ? 0 : static_cast<int>(v.points[0].size());
        },
        value);
}

CurveJet make_jet(const CurveSpec& spec, int max_order) {
    if (max_order < 1 || max_order > kMaxJetOrder)
        throw std::invalid_argument("make_jet: max_order must be in [1, 8]");

    if (const auto* p = std::get_if<Polynomial>(&spec.value)) {
        if (p->coords.empty()) throw std::invalid_argument("polynomial spec: no coordinates");
        // Derivative coefficient table: table[j][i] is the j-th derivative of
        // coordinate i.
        std::vector<std::vector<std::vector<double>>> table(max_order + 1);
        table[0] = p->coords;
        for (auto& c : table[0])
            if (c.empty()) c = {0.0};
        for (int j = 1; j <= max_order; ++j) {
            table[j].reserve(p->coords.size());
            for (const auto& c : table[j - 1]) table[j].push_back(poly_derivative(c));
        }
        const int n = static_cast<int>(p->coords.size());
        return CurveJet(n, max_order, [table = std::move(table), n, max_order](double t) {
            std::vector<Vec> jet(max_order + 1, Vec(n));
            for (int j = 0; j <= max_order; ++j)
                for (int i = 0; i < n; ++i) jet[j][i] = eval_poly(table[j][i], t);
            return jet;
        });
    }
    if (const auto* h = std::get_if<Helix>(&spec.value)) {
        if (!(h->radius > 0.0)) throw std::invalid_argument("helix spec: radius must be positive");
        return make_trig_jet({{h->radius, 1.0, false}, {h->radius, 1.0, true}}, h->pitch,
                             max_order);
    }
    if (const auto* c = std::get_if<Circle>(&spec.value)) {
        if (!(c->radius > 0.0)) throw std::invalid_argument("circle spec: radius must be positive");
        return make_trig_jet({{c->radius, 1.0, false}, {c->radius, 1.0, true}}, std::nullopt,
                             max_order);
    }
    if (const auto* e = std::get_if<ConstantCurvatureEven>(&spec.value)) {
        validate_angles_radii(e->a, e->r);
        std::vector<TrigCoord> trig;
        for (std::size_t j = 0; j < e->a.size(); ++j) {
            trig.push_back({e->r[j], e->a[j], false});
            trig.push_back({e->r[j], e->a[j], true});
        }
        return make_trig_jet(std::move(trig), std::nullopt, max_order);
    }
    if (const auto* o = std::get_if<ConstantCurvatureOdd>(&spec.value)) {
        validate_angles_radii(o->a, o->r);
        if (o->b == 0.0) throw std::invalid_argument("constant-curvature odd spec: b must be nonzero");
        std::vector<TrigCoord> trig;
        for (std::size_t j = 0; j < o->a.size(); ++j) {
            trig.push_back({o->r[j], o->a[j], false});
            trig.push_back({o->r[j], o->a[j], true});
        }
        return make_trig_jet(std::move(trig), o->b, max_order);
    }
    if (const auto* e = std::get_if<Embedded>(&spec.value)) {
        if (!e->inner) throw std::invalid_argument("embedded spec: missing inner curve");
        CurveJet inner = make_jet(*e->inner, max_order);
        if (e->ambient < inner.dimension())
            throw std::invalid_argument("embedded spec: ambient dimension too small");
        const int n = e->ambient;
        const int m = inner.dimension();
        return CurveJet(
            n, max_order,
            [inner, n, m, max_order](double t) {
                std::vector<Vec> base = inner.eval(t);
                std::vector<Vec> jet(max_order + 1, Vec(n, 0.0));
                for (int j = 0; j <= max_order; ++j)
                    for (int i = 0; i < m; ++i) jet[j][i] = base[j][i];
                return jet;
            },
            inner.approximate());
    }

    const auto& tab = std::get<Tabulated>(spec.value);
    if (tab.t.size() < 4 || tab.t.size() != tab.points.size())
        throw std::invalid_argument("tabulated spec: need at least 4 samples of matching length");
    for (std::size_t i = 1; i < tab.t.size(); ++i)
        if (!(tab.t[i] > tab.t[i - 1]))
            throw std::invalid_argument("tabulated spec: t must be strictly increasing");
    if (max_order > 3)
        throw std::invalid_argument("tabulated spec: spline jets support max_order <= 3");
    const int n = static_cast<int>(tab.points[0].size());
    std::vector<Spline> splines(n);
    for (int i = 0; i < n; ++i) {
        splines[i].t = tab.t;
        splines[i].y.resize(tab.t.size());
        for (std::size_t k = 0; k < tab.t.size(); ++k) {
            if (static_cast<int>(tab.points[k].size()) != n)
                throw std::invalid_argument("tabulated spec: ragged sample rows");
            splines[i].y[k] = tab.points[k][i];
        }
        splines[i].build();
    }
    return CurveJet(
        n, max_order,
        [splines = std::move(splines), n, max_order](double t) {
            std::vector<Vec> jet(max_order + 1, Vec(n));
            double d[4];
            for (int i = 0; i < n; ++i) {
                splines[i].eval(t, d);
                for (int j = 0; j <= max_order; ++j) jet[j][i] = d[j];
            }
            return jet;
        },
        /*approximate=*/true);
}

std::vector<Vec> finite_difference_jet(const std::function<Vec(double)>& point_fn, double t,
                                       int order, double h) {
    if (order < 1 || order > 5)
        throw std::invalid_argument("finite_difference_jet: order must be in [1, 5]");
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_jet: h must be positive");

    // Cache of sampled points, shared across derivative orders.
    std::vector<Vec> samples(2 * order + 1);
    for (int i = -order; i <= order; ++i) samples[i + order] = point_fn(t + i * h);
    const std::size_t n = samples[order].size();

    std::vector<Vec> jet(order + 1, Vec(n, 0.0));
    jet[0] = samples[order];
    double factorial = 1.0;
    for (int j = 1; j <= order; ++j) {
        factorial *= j;
        // Width 2j+1 stencil: exactness on monomials up to degree 2j.
        const int w = 2 * j + 1;
        Mat a(w, w);
        Vec rhs(w, 0.0);
        for (int m = 0; m < w; ++m)
            for (int i = -j; i <= j; ++i) a(m, i + j) = std::pow(static_cast<double>(i), m);
        rhs[j] = factorial / std::pow(h, j);
        Vec coeff = lu_solve(a, rhs);
        for (int i = -j; i <= j; ++i) {
            const Vec& s = samples[i + order];
            for (std::size_t k = 0; k < n; ++k) jet[j][k] += coeff[i + j] * s[k];
        }
    }
    return jet;
}

double finite_difference_step(int order, double t) {
    // Truncation/round-off balance; not claimed optimal.
    constexpr double eps = 2.220446049250313e-16;
    return std::pow(eps, 1.0 / (order + 2)) * (std::abs(t) + 1.0);
}

double speed(const std::vector<Vec>& jet_values, double t) {
    if (jet_values.size() < 2) throw std::invalid_argument("speed: jet lacks f'");
    double nu = norm(jet_values[1]);
    if (!(nu > 0.0)) throw NonRegularError(1, t);
    return nu;
}

double arc_length(const CurveJet& jet, double a, double b, double tol) {
    if (a == b) return 0.0;
    auto nu = [&](double t) { return norm(jet.eval(t)[1]); };
    return quadrature::integrate_1d(nu, a, b, tol).value;
}

bool regularity_check(const CurveJet& jet, double t, int k) {
    if (k < 1 || k > jet.max_order())
        throw std::invalid_argument("regularity_check: order outside jet range");
    std::vector<Vec> values = jet.eval(t);
    std::vector<Vec> derivs(values.begin() + 1, values.begin() + 1 + k);
    return exterior::independent(derivs);
}

// ---------------------------------------------------------------------------
// JSON + CSV interfaces
// ---------------------------------------------------------------------------

using nlohmann::json;

namespace {

json spec_to_json_impl(const CurveSpec& spec) {
    json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                j["variant"] = "polynomial";
                j["params"]["coefficients"] = v.coords;
            } else if constexpr (std::is_same_v<T, Helix>) {
                j["variant"] = "helix";
                j["params"]["radius"] = v.radius;
                j["params"]["pitch"] = v.pitch;
            } else if constexpr (std::is_same_v<T, Circle>) {
                j["variant"] = "circle";
                j["params"]["radius"] = v.radius;
            } else if constexpr (std::is_same_v<T, ConstantCurvatureEven>) {
                j["variant"] = "constant_curvature_even";
                j["params"]["a"] = v.a;
                j["params"]["r"] = v.r;
            } else if constexpr (std::is_same_v<T, ConstantCurvatureOdd>) {
                j["variant"] = "constant_curvature_odd";
                j["params"]["a"] = v.a;
                j["params"]["r"] = v.r;
                j["params"]["b"] = v.b;
            } else if constexpr (std::is_same_v<T, Embedded>) {
                j["variant"] = "embedded";
                j["params"]["ambient"] = v.ambient;
                j["params"]["inner"] = spec_to_json_impl(*v.inner);
            } else {
                j["variant"] = "tabulated";
                j["params"]["t"] = v.t;
                j["params"]["points"] = v.points;
            }
        },
        spec.value);
    return j;
}

CurveSpec spec_from_json_impl(const json& j) {
    if (!j.contains("variant") || !j.contains("params"))
        throw std::invalid_argument("curve spec JSON: needs \"variant\" and \"params\"");
    const std::string variant = j.at("variant").get<std::string>();
    const json& p = j.at("params");
    if (variant == "polynomial")
        return {Polynomial{p.at("coefficients").get<std::vector<std::vector<double>>>()}};
    if (variant == "helix")
        return {Helix{p.at("radius").get<double>(), p.at("pitch").get<double>()}};
    if (variant == "circle") return {Circle{p.at("radius").get<double>()}};
    if (variant == "constant_curvature_even")
        return {ConstantCurvatureEven{p.at("a").get<std::vector<double>>(),
                                      p.at("r").get<std::vector<double>>()}};
    if (variant == "constant_curvature_odd")
        return {ConstantCurvatureOdd{p.at("a").get<std::vector<double>>(),
                                     p.at("r").get<std::vector<double>>(),
                                     p.at("b").get<double>()}};
    if (variant == "embedded") {
        auto inner = std::make_shared<CurveSpec>(spec_from_json_impl(p.at("inner")));
        return {Embedded{inner, p.at("ambient").get<int>()}};
    }
    if (variant == "tabulated") {
        if (p.contains("path")) return {read_tabulated_csv(p.at("path").get<std::string>())};
        return {Tabulated{p.at("t").get<std::vector<double>>(),
                          p.at("points").get<std::vector<Vec>>()}};
    }
    throw std::invalid_argument("curve spec JSON: unknown variant \"" + variant + "\"");
}

}  // namespace

CurveSpec curve_spec_from_json(const std::string& json_text) {
    return spec_from_json_impl(json::parse(json_text));
}

std::string curve_spec_to_json(const CurveSpec& spec) { return spec_to_json_impl(spec).dump(); }

Tabulated read_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("tabulated CSV: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("tabulated CSV: empty file");
    // Header: t,x1,...,xn
    std::stringstream hs(line);
    std::string field;
    std::vector<std::string> header;
    while (std::getline(hs, field, ',')) header.push_back(field);
    if (header.empty() || header[0] != "t")
        throw std::invalid_argument("tabulated CSV: header must start with `t`");
    const std::size_t n = header.size() - 1;
    if (n == 0) throw std::invalid_argument("tabulated CSV: no coordinate columns");

    Tabulated tab;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        if (row.size() != n + 1)
            throw std::invalid_argument("tabulated CSV: row width does not match header");
        if (!tab.t.empty() && !(row[0] > tab.t.back()))
            throw std::invalid_argument("tabulated CSV: t must be strictly increasing");
        tab.t.push_back(row[0]);
        tab.points.emplace_back(row.begin() + 1, row.end());
    }
    return tab;
}

}  // namespace frenet::curve
