// Command-line front door: parse curve/section specs, run curvature,
// reconstruction and tube computations, emit CSV/JSON/OBJ.
//
// Exit codes: 0 success, 1 config error, 2 regularity failure, 3 tube
// regularity violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "expr.hpp"
#include "frenet/curve.hpp"
#include "frenet/errors.hpp"
#include "frenet/frenet.hpp"
#include "frenet/reconstruct.hpp"
#include "frenet/tube.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace frenet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRegularity = 2;
constexpr int kExitTubeRegularity = 3;

// All numeric output carries 15 significant digits.
double round15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

json round15(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(round15(x));
    return arr;
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(item);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << text;
}

Vec parse_vector(const std::string& text) {
    Vec v;
    for (const auto& part : split(text, ',')) v.push_back(expr::parse_number(part));
    return v;
}

std::pair<double, double> parse_interval(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 2) throw std::invalid_argument("interval must look like a:b");
    return {expr::parse_number(parts[0]), expr::parse_number(parts[1])};
}

// Compact curve syntax: poly:(e1,e2,...), helix:r,c, circle:R,
// cc_even:a1,a2;r1,r2, cc_odd:a;r;b, embedded:AMBIENT:inner,
// tabulated:file.csv. JSON inline ({...}) or @file for everything else.
curve::CurveSpec parse_curve(const std::string& text) {
    if (!text.empty() && text[0] == '{') return curve::curve_spec_from_json(text);
    if (!text.empty() && text[0] == '@') return curve::curve_spec_from_json(read_file(text.substr(1)));

    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("curve spec: expected kind:params or JSON, got \"" + text + "\"");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);

    if (kind == "poly") {
        std::string body = rest;
        if (body.size() >= 2 && body.front() == '(' && body.back() == ')')
            body = body.substr(1, body.size() - 2);
        curve::Polynomial p;
        // Split on top-level commas only (coordinates may contain parens).
        int depth = 0;
        std::string cur;
        auto flush = [&]() {
            if (cur.empty()) throw std::invalid_argument("curve spec: empty coordinate");
            p.coords.push_back(expr::to_polynomial(expr::parse(cur)));
            cur.clear();
        };
        for (char c : body) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                flush();
            } else {
                cur.push_back(c);
            }
        }
        flush();
        return {p};
    }
    if (kind == "helix") {
        Vec v = parse_vector(rest);
        if (v.size() != 2) throw std::invalid_argument("helix:r,c needs two parameters");
        return {curve::Helix{v[0], v[1]}};
    }
    if (kind == "circle") return {curve::Circle{expr::parse_number(rest)}};
    if (kind == "cc_even" || kind == "cc_odd") {
        auto groups = split(rest, ';');
        if (kind == "cc_even" && groups.size() == 2)
            return {curve::ConstantCurvatureEven{parse_vector(groups[0]), parse_vector(groups[1])}};
        if (kind == "cc_odd" && groups.size() == 3)
            return {curve::ConstantCurvatureOdd{parse_vector(groups[0]), parse_vector(groups[1]),
                                                expr::parse_number(groups[2])}};
        throw std::invalid_argument("constant-curvature spec: cc_even:a;r or cc_odd:a;r;b");
    }
    if (kind == "embedded") {
        auto second = rest.find(':');
        if (second == std::string::npos)
            throw std::invalid_argument("embedded spec: embedded:AMBIENT:inner");
        int ambient = std::stoi(rest.substr(0, second));
        auto inner = std::make_shared<curve::CurveSpec>(parse_curve(rest.substr(second + 1)));
        return {curve::Embedded{inner, ambient}};
    }
    if (kind == "tabulated") return {curve::read_tabulated_csv(rest)};
    throw std::invalid_argument("curve spec: unknown kind \"" + kind + "\"");
}

// Jet order: full dimension when the variant supports it (spline jets cap
// at 3).
curve::CurveJet jet_for(const curve::CurveSpec& spec) {
    int order = spec.dimension();
    const curve::CurveSpec* probe = &spec;
    while (const auto* e = std::get_if<curve::Embedded>(&probe->value)) probe = e->inner.get();
    if (std::holds_alternative<curve::Tabulated>(probe->value)) order = std::min(order, 3);
    return curve::make_jet(spec, order);
}

struct SectionSpec {
    std::optional<tube::CrossSection> constant;
    std::optional<tube::RadiusFamily> family;
};

SectionSpec parse_section(const std::string& text, int section_dim) {
    SectionSpec out;
    std::string body = text;
    if (!body.empty() && body[0] == '@') body = read_file(body.substr(1));
    if (!body.empty() && body[0] == '{') {
        json j = json::parse(body);
        const std::string variant = j.at("variant").get<std::string>();
        const json& p = j.at("params");
        if (variant == "disk") {
            out.constant = tube::CrossSection::disk(section_dim, p.at("radius").get<double>());
        } else if (variant == "parabolic_region") {
            out.constant = tube::CrossSection::parabolic_blade();
        } else if (variant == "polygonal") {
            out.constant = tube::CrossSection::polygon(
                p.at("vertices").get<std::vector<std::array<double, 2>>>());
        } else {
            throw std::invalid_argument("section JSON: unknown variant \"" + variant + "\"");
        }
        return out;
    }

    auto colon = body.find(':');
    const std::string kind = colon == std::string::npos ? body : body.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : body.substr(colon + 1);
    if (kind == "disk") {
        auto node = expr::parse(rest);
        if (expr::depends_on_t(node)) {
            tube::RadiusFamily fam;
            fam.dim = section_dim;
            fam.radius = [node](double t) { return expr::eval(node, t); };
            out.family = std::move(fam);
        } else {
            out.constant = tube::CrossSection::disk(section_dim, expr::eval(node, 0.0));
        }
        return out;
    }
    if (kind == "parabolic") {
        out.constant = tube::CrossSection::parabolic_blade();
        return out;
    }
    if (kind == "polygon") {
        std::vector<std::array<double, 2>> vertices;
        for (const auto& pair : split(rest, ';')) {
            Vec v = parse_vector(pair);
            if (v.size() != 2) throw std::invalid_argument("polygon: vertices are x,y pairs");
            vertices.push_back({v[0], v[1]});
        }
        out.constant = tube::CrossSection::polygon(std::move(vertices));
        return out;
    }
    throw std::invalid_argument("section spec: unknown kind \"" + kind + "\"");
}

// --config file.json supplies defaults; explicit flags win.
std::vector<std::string> merge_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    json j = json::parse(read_file(config_path));
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string flag = "--" + it.key();
        bool present = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
        if (present) continue;
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) args.push_back(flag);
        } else if (it.value().is_string()) {
            args.push_back(flag);
            args.push_back(it.value().get<std::string>());
        } else {
            args.push_back(flag);
            args.push_back(it.value().dump());
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// curvatures
// ---------------------------------------------------------------------------

int run_curvatures(const std::string& curve_text, std::optional<std::string> at,
                   std::optional<std::string> interval, int samples, bool with_frame,
                   const std::string& format, const std::string& out_path) {
    curve::CurveSpec spec = parse_curve(curve_text);
    curve::CurveJet jet = jet_for(spec);
    const int n = jet.dimension();

    std::vector<double> ts;
    if (at) {
        ts.push_back(expr::parse_number(*at));
    } else {
        auto [a, b] = parse_interval(interval.value_or("0:1"));
        int m = std::max(samples, 1);
        for (int i = 0; i < m; ++i) ts.push_back(m == 1 ? a : a + (b - a) * i / (m - 1));
    }

    int failures = 0;
    std::ostringstream csv;
    json rows = json::array();
    if (format == "csv") {
        csv << "t,regular,nu";
        for (int j = 1; j < n; ++j) csv << ",kappa" << j;
        if (with_frame)
            for (int j = 1; j <= n; ++j)
                for (int i = 1; i <= n; ++i) csv << ",V" << j << "_" << i;
        csv << "\n";
    }
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        csv << ',' << buf;
    };
    for (double t : ts) {
        try {
            apparatus::FrenetApparatus ap = apparatus::apparatus(jet, t);
            if (format == "csv") {
                std::snprintf(buf, sizeof buf, "%.15g", t);
                csv << buf << ",1";
                put(ap.nu);
                for (double k : ap.kappas) put(k);
                if (with_frame)
                    for (const Vec& v : ap.frame)
                        for (double c : v) put(c);
                csv << "\n";
            } else {
                json row;
                row["t"] = round15(t);
                row["regular"] = true;
                row["nu"] = round15(ap.nu);
                row["kappas"] = round15(ap.kappas);
                if (with_frame) {
                    json frame = json::array();
                    for (const Vec& v : ap.frame) frame.push_back(round15(v));
                    row["frame"] = frame;
                }
                rows.push_back(row);
            }
        } catch (const NonRegularError& e) {
            ++failures;
            if (format == "csv") {
                std::snprintf(buf, sizeof buf, "%.15g", t);
                csv << buf << ",0\n";
            } else {
                json row;
                row["t"] = round15(t);
                row["regular"] = false;
                row["failing_order"] = e.order;
                rows.push_back(row);
            }
        }
    }

    if (format == "csv") {
        write_output(csv.str(), out_path);
    } else {
        json report;
        report["schema"] = 1;
        report["rows"] = rows;
        write_output(report.dump(2) + "\n", out_path);
    }
    return failures == static_cast<int>(ts.size()) ? kExitRegularity : kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

int run_reconstruct(bool classify, const std::string& nu_text, const std::string& kappas_text,
                    std::optional<std::string> interval, double step,
                    const std::string& point_text, const std::string& frame_text,
                    bool no_reorthonormalize, bool frame_cols, const std::string& out_path) {
    auto kappa_parts = split(kappas_text, ',');
    const int n = static_cast<int>(kappa_parts.size()) + 1;

    if (classify) {
        double nu = expr::parse_number(nu_text);
        std::vector<double> kappas;
        for (const auto& part : kappa_parts) kappas.push_back(expr::parse_number(part));
        reconstruct::ConstantCurvatureParams params = reconstruct::classify_constant(n, nu, kappas);
        json report;
        report["schema"] = 1;
        report["a"] = round15(params.a);
        report["r"] = round15(params.r);
        if (params.b) report["b"] = round15(*params.b);
        write_output(report.dump(2) + "\n", out_path);
        return kExitOk;
    }

    reconstruct::FrenetPrescription p;
    p.n = n;
    p.nu = expr::parse_function(nu_text);
    for (const auto& part : kappa_parts) p.kappas.push_back(expr::parse_function(part));
    auto [a, b] = parse_interval(interval.value_or("0:1"));
    p.t0 = a;
    p.t1 = b;
    p.step = step;
    p.reorthonormalize = !no_reorthonormalize;

    if (point_text.empty()) {
        p.initial_point.assign(n, 0.0);
    } else {
        p.initial_point = parse_vector(point_text);
    }
    if (frame_text.empty()) {
        p.initial_frame.assign(n, Vec(n, 0.0));
        for (int i = 0; i < n; ++i) p.initial_frame[i][i] = 1.0;
    } else {
        for (const auto& row : split(frame_text, ';')) p.initial_frame.push_back(parse_vector(row));
    }

    reconstruct::ReconstructedCurve out = reconstruct::integrate_frenet(p);
    write_output(reconstruct::to_csv(out, frame_cols), out_path);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// tube
// ---------------------------------------------------------------------------

int run_tube(const std::string& curve_text, const std::string& section_text,
             const std::string& attach_text, const std::string& interval_text,
             const std::string& op, int resolution, double tol, const std::string& format,
             const std::string& out_path, std::uint64_t seed) {
    curve::CurveSpec spec = parse_curve(curve_text);
    curve::CurveJet jet = jet_for(spec);
    const int ambient = jet.dimension();
    const int section_dim = ambient - 1;
    auto [t0, t1] = parse_interval(interval_text);

    json report;
    report["schema"] = 1;
    report["op"] = op;

    if (op == "pappus-area") {
        // Constant-radius sphere tube; section must be disk:R.
        SectionSpec sec = parse_section(section_text, section_dim);
        if (!sec.constant || !sec.constant->as_disk())
            throw std::invalid_argument("pappus-area needs a constant disk section");
        tube::ApparatusField field(jet, t0, t1);
        double value =
            tube::sphere_tube_pappus(field, t0, t1, sec.constant->as_disk()->radius, tol);
        report["value"] = round15(value);
        write_output(report.dump(2) + "\n", out_path);
        return kExitOk;
    }
    if (op == "area") {
        SectionSpec sec = parse_section(section_text, section_dim);
        tube::RadiusFamily fam;
        if (sec.family) {
            fam = *sec.family;
        } else if (sec.constant && sec.constant->as_disk()) {
            double R = sec.constant->as_disk()->radius;
            fam.dim = section_dim;
            fam.radius = [R](double) { return R; };
            fam.radius_derivative = [](double) { return 0.0; };
        } else {
            throw std::invalid_argument("area needs a disk section (constant or t-varying)");
        }
        tube::ApparatusField field(jet, t0, t1);
        quadrature::SphereOptions sphere_opts;
        sphere_opts.seed = seed;
        auto q = tube::sphere_tube_area(field, t0, t1, fam, tol, sphere_opts);
        report["value"] = round15(q.value);
        report["error_estimate"] = round15(q.error_estimate);
        report["evaluations"] = q.evaluations;
        write_output(report.dump(2) + "\n", out_path);
        return kExitOk;
    }

    // Remaining ops build a TubeSpec.
    SectionSpec sec = parse_section(section_text, section_dim);
    Vec attach;
    if (!attach_text.empty()) attach = parse_vector(attach_text);
    tube::TubeSpec tube_spec =
        sec.family ? tube::TubeSpec::disk_family(jet, t0, t1, *sec.family)
                   : tube::TubeSpec::around(jet, t0, t1, *sec.constant, attach);

    if (op == "volume") {
        auto q = tube::tube_volume(tube_spec, tol);
        report["value"] = round15(q.value);
        report["error_estimate"] = round15(q.error_estimate);
        report["evaluations"] = q.evaluations;
    } else if (op == "pappus") {
        if (!sec.constant) throw std::invalid_argument("pappus needs a constant section");
        report["value"] = round15(tube::pappus_volume(*sec.constant, tube_spec.field, t0, t1, tol));
    } else if (op == "disk-volume") {
        tube::RadiusFamily fam;
        if (sec.family) {
            fam = *sec.family;
        } else if (sec.constant && sec.constant->as_disk()) {
            double R = sec.constant->as_disk()->radius;
            fam.dim = section_dim;
            fam.radius = [R](double) { return R; };
        } else {
            throw std::invalid_argument("disk-volume needs a disk section");
        }
        auto q = tube::disk_tube_volume(fam, tube_spec.field, t0, t1, tol);
        report["value"] = round15(q.value);
        report["error_estimate"] = round15(q.error_estimate);
        report["radius_warning"] = q.radius_warning;
    } else if (op == "scan") {
        tube::ScanReport scan = tube::injectivity_scan(tube_spec, resolution);
        report["clean"] = scan.clean;
        json collisions = json::array();
        for (const auto& c : scan.collisions) {
            json item;
            item["section_point_1"] = round15(c.section_point_1);
            item["t1"] = round15(c.t1);
            item["section_point_2"] = round15(c.section_point_2);
            item["t2"] = round15(c.t2);
            item["image_distance"] = round15(c.image_distance);
            collisions.push_back(item);
        }
        report["collisions"] = collisions;
        if (scan.nearest_approach) {
            report["nearest_approach_distance"] = round15(scan.nearest_approach->image_distance);
        }
    } else if (op == "mesh") {
        if (ambient == 3) {
            tube::TriangleMesh mesh = tube::tube_mesh(tube_spec, resolution);
            std::string obj = tube::to_obj(mesh);
            if (format == "obj") {
                write_output(obj, out_path);
                return kExitOk;
            }
            std::string mesh_path = out_path.empty() ? "tube.obj" : out_path + ".obj";
            write_output(obj, mesh_path);
            report["mesh_path"] = mesh_path;
            report["vertices"] = static_cast<long>(mesh.vertices.size());
            report["triangles"] = static_cast<long>(mesh.triangles.size());
            report["closed"] = mesh.closed;
            report["regularity_warning"] = mesh.regularity_warning;
            report["area"] = round15(mesh.area());
        } else {
            std::string csv = tube::boundary_sample_csv(tube_spec, resolution);
            write_output(csv, out_path);
            return kExitOk;
        }
    } else {
        throw std::invalid_argument("unknown tube op \"" + op + "\"");
    }
    write_output(report.dump(2) + "\n", out_path.empty() || op == "mesh" ? "" : out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    try {
        args = merge_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    CLI::App app{"Frenet apparatus, curve reconstruction and tubes around curves"};
    app.require_subcommand(1);

    // curvatures
    auto* cmd_curv = app.add_subcommand("curvatures", "Speed, curvatures and frame along a curve");
    std::string curve_text, at_text, interval_text, format = "csv", out_path;
    int samples = 100;
    bool with_frame = false;
    std::string config_dummy;
    cmd_curv->add_option("--curve", curve_text, "curve spec")->required();
    cmd_curv->add_option("--at", at_text, "single parameter value");
    cmd_curv->add_option("--interval", interval_text, "a:b sampling interval");
    cmd_curv->add_option("--samples", samples, "sample count for --interval");
    cmd_curv->add_flag("--frame", with_frame, "emit frame columns");
    cmd_curv->add_option("--format", format, "csv|json");
    cmd_curv->add_option("--out", out_path, "output path (default stdout)");
    cmd_curv->add_option("--config", config_dummy, "JSON config file (flags win)");

    // reconstruct
    auto* cmd_rec = app.add_subcommand("reconstruct", "Integrate a Frenet prescription");
    std::string nu_text = "1", kappas_text, point_text, frame_text, rec_interval, rec_out;
    double step = 0.0;
    bool classify = false, no_reorth = false, frame_cols = false;
    cmd_rec->add_option("--nu", nu_text, "speed nu(t)")->required();
    cmd_rec->add_option("--kappas", kappas_text, "comma-separated curvature functions")->required();
    cmd_rec->add_option("--interval", rec_interval, "a:b integration interval");
    cmd_rec->add_option("--step", step, "RK4 step (default (b-a)/4000)");
    cmd_rec->add_option("--point", point_text, "initial point x1,..,xn");
    cmd_rec->add_option("--frame", frame_text, "initial frame rows v11,v12,..;v21,..");
    cmd_rec->add_flag("--classify", classify, "closed-form constant-curvature classification");
    cmd_rec->add_flag("--no-reorthonormalize", no_reorth, "disable per-step reorthonormalization");
    cmd_rec->add_flag("--frame-cols", frame_cols, "include frame columns in the CSV");
    cmd_rec->add_option("--out", rec_out, "output path (default stdout)");
    cmd_rec->add_option("--config", config_dummy, "JSON config file (flags win)");

    // tube
    auto* cmd_tube = app.add_subcommand("tube", "Tube volumes, areas, meshes and scans");
    std::string tube_curve, tube_section, tube_attach, tube_interval = "0:1";
    std::string tube_op = "volume", tube_format = "json", tube_out;
    int resolution = 64;
    double tol = 1e-9;
    std::uint64_t seed = quadrature::kDefaultSeed;
    cmd_tube->add_option("--curve", tube_curve, "axis curve spec")->required();
    cmd_tube->add_option("--section", tube_section, "cross-section spec")->required();
    cmd_tube->add_option("--attach", tube_attach, "attachment point p1,..,pn");
    cmd_tube->add_option("--interval", tube_interval, "a:b parameter interval")->required();
    cmd_tube->add_option("--op", tube_op,
                         "volume|pappus|disk-volume|area|pappus-area|mesh|scan");
    cmd_tube->add_option("--resolution", resolution, "grid/mesh resolution");
    cmd_tube->add_option("--tol", tol, "quadrature tolerance");
    cmd_tube->add_option("--format", tube_format, "json|obj|csv");
    cmd_tube->add_option("--out", tube_out, "output path (default stdout)");
    cmd_tube->add_option("--seed", seed, "seed for Monte Carlo quadrature paths");
    cmd_tube->add_option("--config", config_dummy, "JSON config file (flags win)");

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_curv->parsed()) {
            std::optional<std::string> at =
                at_text.empty() ? std::nullopt : std::optional<std::string>(at_text);
            std::optional<std::string> iv =
                interval_text.empty() ? std::nullopt : std::optional<std::string>(interval_text);
            if (!at && !iv) throw std::invalid_argument("curvatures: need --at or --interval");
            return run_curvatures(curve_text, at, iv, samples, with_frame, format, out_path);
        }
        if (cmd_rec->parsed()) {
            std::optional<std::string> iv =
                rec_interval.empty() ? std::nullopt : std::optional<std::string>(rec_interval);
            return run_reconstruct(classify, nu_text, kappas_text, iv, step, point_text,
                                   frame_text, no_reorth, frame_cols, rec_out);
        }
        if (cmd_tube->parsed()) {
            return run_tube(tube_curve, tube_section, tube_attach, tube_interval, tube_op,
                            resolution, tol, tube_format, tube_out, seed);
        }
    } catch (const TubeRegularityError& e) {
        std::cerr << "tube regularity violation: " << e.what() << "\n";
        return kExitTubeRegularity;
    } catch (const NonRegularError& e) {
        std::cerr << "regularity failure: " << e.what() << "\n";
        return kExitRegularity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
