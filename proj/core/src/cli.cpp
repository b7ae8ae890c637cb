#include "bt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bt/bloch_torrey.hpp"
#include "bt/errors.hpp"
#include "bt/field.hpp"
#include "bt/io.hpp"
#include "bt/jordan.hpp"
#include "bt/two_level.hpp"

namespace bt::cli {

namespace {

std::vector<double> parse_list(const std::string& value) {
    std::string s = value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += io::fmt17(v[i]);
    }
    return out;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

void write_echo(const RunConfig& cfg) {
    io::write_file(cfg.out_dir + "/config_echo.txt", cfg.canonical_text());
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

std::string branch_point_json(const BranchPoint& bp) {
    std::string line = "{";
    line += "\"g_re\":" + io::fmt17(bp.g0.real());
    line += ",\"g_im\":" + io::fmt17(bp.g0.imag());
    line += ",\"resolution\":" + io::fmt17(bp.resolution);
    line += ",\"sheets\":[" + std::to_string(bp.sheet_pair.first) + "," +
            std::to_string(bp.sheet_pair.second) + "]";
    line += ",\"max_integral\":" + io::fmt17(bp.max_integral);
    line += std::string(",\"monodromy\":") + (bp.monodromy_confirmed ? "true" : "false");
    line += "}";
    return line;
}

std::string unresolved_json(const UnresolvedRegion& u) {
    std::string line = "{\"status\":\"unresolved\"";
    line += ",\"g_re\":" + io::fmt17(u.center.real());
    line += ",\"g_im\":" + io::fmt17(u.center.imag());
    line += ",\"diameter\":" + io::fmt17(u.diameter);
    line += ",\"max_integral\":" + io::fmt17(u.max_integral);
    line += ",\"reason\":\"" + io::json_escape(u.reason) + "\"";
    line += "}";
    return line;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig cfg;
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw ParseError("expected key=value", lineno);
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto as_double = [&]() { return std::stod(value); };
    auto as_int = [&]() { return std::stoi(value); };
    if (key == "command") command = value;
    else if (key == "geometry") geometry = value;
    else if (key == "length") length = as_double();
    else if (key == "import_path") import_path = value;
    else if (key == "truncation") truncation = (value == "auto") ? 0 : as_int();
    else if (key == "n_sheets") n_sheets = as_int();
    else if (key == "out_dir") out_dir = value;
    else if (key == "threads") threads = as_int();
    else if (key == "g_min") g_min = as_double();
    else if (key == "g_max") g_max = as_double();
    else if (key == "g_count") g_count = as_int();
    else if (key == "grid_scale") grid_scale = value;
    else if (key == "modes_at") modes_at = parse_list(value);
    else if (key == "mode_points") mode_points = as_int();
    else if (key == "region_re_min") region_re_min = as_double();
    else if (key == "region_re_max") region_re_max = as_double();
    else if (key == "region_im_min") region_im_min = as_double();
    else if (key == "region_im_max") region_im_max = as_double();
    else if (key == "epsilon") epsilon = as_double();
    else if (key == "samples_per_contour") samples_per_contour = as_int();
    else if (key == "max_depth") max_depth = as_int();
    else if (key == "contour_shape") contour_shape = value;
    else if (key == "g0_re") g0_re = as_double();
    else if (key == "g0_im") g0_im = as_double();
    else if (key == "resolution") resolution = as_double();
    else if (key == "target_eps") target_eps = as_double();
    else if (key == "sheet_a") sheet_a = as_int();
    else if (key == "sheet_b") sheet_b = as_int();
    else if (key == "offsets") offsets = parse_list(value);
    else if (key == "time_max") time_max = as_double();
    else if (key == "time_count") time_count = as_int();
    else if (key == "toy_model") toy_model = value;
    else if (key == "toy_re_min") toy_re_min = as_double();
    else if (key == "toy_re_max") toy_re_max = as_double();
    else if (key == "toy_im_min") toy_im_min = as_double();
    else if (key == "toy_im_max") toy_im_max = as_double();
    else if (key == "toy_count") toy_count = as_int();
    else throw Error("unknown config key: " + key);
}

std::string RunConfig::canonical_text() const {
    std::string t;
    t += "command=" + command + "\n";
    t += "contour_shape=" + contour_shape + "\n";
    t += "epsilon=" + io::fmt17(epsilon) + "\n";
    t += "g0_im=" + io::fmt17(g0_im) + "\n";
    t += "g0_re=" + io::fmt17(g0_re) + "\n";
    t += "g_count=" + std::to_string(g_count) + "\n";
    t += "g_max=" + io::fmt17(g_max) + "\n";
    t += "g_min=" + io::fmt17(g_min) + "\n";
    t += "geometry=" + geometry + "\n";
    t += "grid_scale=" + grid_scale + "\n";
    t += "import_path=" + import_path + "\n";
    t += "length=" + io::fmt17(length) + "\n";
    t += "max_depth=" + std::to_string(max_depth) + "\n";
    t += "mode_points=" + std::to_string(mode_points) + "\n";
    t += "modes_at=" + join_list(modes_at) + "\n";
    t += "n_sheets=" + std::to_string(n_sheets) + "\n";
    t += "offsets=" + join_list(offsets) + "\n";
    t += "out_dir=" + out_dir + "\n";
    t += "region_im_max=" + io::fmt17(region_im_max) + "\n";
    t += "region_im_min=" + io::fmt17(region_im_min) + "\n";
    t += "region_re_max=" + io::fmt17(region_re_max) + "\n";
    t += "region_re_min=" + io::fmt17(region_re_min) + "\n";
    t += "resolution=" + io::fmt17(resolution) + "\n";
    t += "samples_per_contour=" + std::to_string(samples_per_contour) + "\n";
    t += "sheet_a=" + std::to_string(sheet_a) + "\n";
    t += "sheet_b=" + std::to_string(sheet_b) + "\n";
    t += "target_eps=" + io::fmt17(target_eps) + "\n";
    t += "threads=" + std::to_string(threads) + "\n";
    t += "time_count=" + std::to_string(time_count) + "\n";
    t += "time_max=" + io::fmt17(time_max) + "\n";
    t += "toy_count=" + std::to_string(toy_count) + "\n";
    t += "toy_im_max=" + io::fmt17(toy_im_max) + "\n";
    t += "toy_im_min=" + io::fmt17(toy_im_min) + "\n";
    t += "toy_model=" + toy_model + "\n";
    t += "toy_re_max=" + io::fmt17(toy_re_max) + "\n";
    t += "toy_re_min=" + io::fmt17(toy_re_min) + "\n";
    t += "truncation=" + (truncation == 0 ? std::string("auto") : std::to_string(truncation)) + "\n";
    return t;
}

double critical_gradient(const PhysicalParams& params) {
    if (!(params.diffusivity > 0.0) || !(params.gyromagnetic > 0.0) || !(params.length > 0.0) ||
        !(params.eta > 0.0))
        throw ValidationError("critical_gradient: all parameters must be positive");
    return params.eta * params.diffusivity /
           (params.gyromagnetic * params.length * params.length * params.length);
}

ScanConfig scan_config(const RunConfig& cfg) {
    ScanConfig sc;
    sc.region_lo = Complex(cfg.region_re_min, cfg.region_im_min);
    sc.region_hi = Complex(cfg.region_re_max, cfg.region_im_max);
    sc.contour_shape = (cfg.contour_shape == "circle") ? ContourShape::Circle : ContourShape::Square;
    sc.epsilon = cfg.epsilon;
    sc.n_sheets = cfg.n_sheets;
    sc.samples_per_contour = cfg.samples_per_contour;
    sc.max_depth = cfg.max_depth;
    sc.threads = cfg.threads;
    return sc;
}

OperatorMatrices build_matrices(const RunConfig& cfg, double max_abs_g) {
    auto build = [&](int n) {
        if (cfg.geometry == "interval") return build_interval(cfg.length, n);
        if (cfg.geometry == "disk") return build_disk(cfg.length, n);
        if (cfg.geometry == "imported") return load_imported(cfg.import_path);
        throw ValidationError("unknown geometry: " + cfg.geometry);
    };
    if (cfg.geometry == "imported" || cfg.truncation > 0) return build(std::max(2, cfg.truncation));

    int n = (cfg.geometry == "disk") ? 60 : 30;
    const Complex g_test(max_abs_g, 0.0);
    for (int attempt = 0; attempt < 4; ++attempt) {
        OperatorMatrices m = build(n);
        OperatorMatrices m2 = build(2 * n);
        if (trusted_sheet_count(m, m2, g_test, 1e-6) >= cfg.n_sheets) return m;
        n *= 2;
    }
    throw Error("auto truncation: required truncation exceeds " + std::to_string(n) +
                "; pass truncation explicitly");
}

int cmd_spectrum(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const double max_abs_g = std::max(std::abs(cfg.g_min), std::abs(cfg.g_max));
    OperatorMatrices mats = build_matrices(cfg, max_abs_g);

    if (cfg.truncation > 0 && cfg.geometry != "imported") {
        // Explicit truncation still has to cover the requested sheets.
        OperatorMatrices m2 = (cfg.geometry == "disk") ? build_disk(cfg.length, 2 * cfg.truncation)
                                                       : build_interval(cfg.length, 2 * cfg.truncation);
        const int trusted = trusted_sheet_count(mats, m2, Complex(max_abs_g, 0.0), 1e-6);
        if (trusted < cfg.n_sheets)
            throw Error("only " + std::to_string(trusted) + " sheets trusted at |g|=" +
                        std::to_string(max_abs_g) + "; increase truncation beyond " +
                        std::to_string(cfg.truncation));
    }

    io::CsvBuilder csv("g_re,g_im,sheet,lambda_re,lambda_im,residual");
    for (int k = 0; k < cfg.g_count; ++k) {
        const double t = cfg.g_count == 1 ? 0.0 : static_cast<double>(k) / (cfg.g_count - 1);
        double g;
        if (cfg.grid_scale == "cbrt") {
            const double c0 = std::cbrt(cfg.g_min), c1 = std::cbrt(cfg.g_max);
            const double c = c0 + t * (c1 - c0);
            g = c * c * c;
        } else {
            g = cfg.g_min + t * (cfg.g_max - cfg.g_min);
        }
        const SpectralSolve solve = eigensolve(mats, Complex(g, 0.0));
        for (int s = 0; s < cfg.n_sheets && s < mats.size; ++s)
            csv.row({io::fmt17(g), io::fmt17(0.0), std::to_string(s + 1),
                     io::fmt17(solve.eigenvalues[s].real()), io::fmt17(solve.eigenvalues[s].imag()),
                     io::fmt17(solve.residuals[s])});
    }
    io::write_file(out_path(cfg, "spectrum.csv"), csv.text());

    for (std::size_t mi = 0; mi < cfg.modes_at.size(); ++mi) {
        const double g = cfg.modes_at[mi];
        const SpectralSolve solve = eigensolve(mats, Complex(g, 0.0));
        io::CsvBuilder mcsv("x,y,sheet,re,im");
        std::vector<Point> pts;
        const double half = 0.5 * cfg.length;
        for (int p = 0; p < cfg.mode_points; ++p) {
            const double x = -half + cfg.length * p / (cfg.mode_points - 1);
            pts.push_back({x, 0.0});
        }
        for (int s = 1; s <= cfg.n_sheets && s <= mats.size; ++s) {
            const auto vals = evaluate_mode(mats, solve, s, pts);
            for (std::size_t p = 0; p < pts.size(); ++p)
                mcsv.row({io::fmt17(pts[p].x), io::fmt17(pts[p].y), std::to_string(s),
                          io::fmt17(vals[p].real()), io::fmt17(vals[p].imag())});
        }
        io::write_file(out_path(cfg, "modes_" + std::to_string(mi) + ".csv"), mcsv.text());
    }
    return 0;
}

int cmd_scan(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const double max_abs_g = std::max({std::abs(cfg.region_re_min), std::abs(cfg.region_re_max),
                                       std::abs(cfg.region_im_min), std::abs(cfg.region_im_max)});
    const OperatorMatrices mats = build_matrices(cfg, max_abs_g);
    const ScanResult result = scan(mats, scan_config(cfg));

    std::string lines;
    for (const auto& bp : result.points) lines += branch_point_json(bp) + "\n";
    for (const auto& u : result.unresolved) lines += unresolved_json(u) + "\n";
    io::write_file(out_path(cfg, "branch_points.jsonl"), lines);

    std::string summary = "{";
    summary += "\"contours\":" + std::to_string(result.contours_evaluated);
    summary += ",\"points\":" + std::to_string(result.points.size());
    summary += ",\"unresolved\":" + std::to_string(result.unresolved.size());
    summary += "}\n";
    io::write_file(out_path(cfg, "scan_summary.json"), summary);
    return 0;
}

namespace {

BranchPoint bp_from_config(const RunConfig& cfg) {
    BranchPoint bp;
    bp.g0 = Complex(cfg.g0_re, cfg.g0_im);
    bp.resolution = cfg.resolution > 0.0 ? cfg.resolution : 0.5;
    bp.sheet_pair = {cfg.sheet_a, cfg.sheet_b};
    bp.monodromy_confirmed = true;
    return bp;
}

}  // namespace

int cmd_refine(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const OperatorMatrices mats = build_matrices(cfg, std::abs(Complex(cfg.g0_re, cfg.g0_im)));
    const BranchPoint refined = refine(mats, bp_from_config(cfg), cfg.target_eps, scan_config(cfg));
    io::write_file(out_path(cfg, "refined.jsonl"), branch_point_json(refined) + "\n");
    return 0;
}

int cmd_jordan(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const OperatorMatrices mats = build_matrices(cfg, std::abs(Complex(cfg.g0_re, cfg.g0_im)));
    MatrixFamilyField field(mats);

    BranchPoint bp = bp_from_config(cfg);
    const double rel_eps = cfg.target_eps * std::max(std::abs(bp.g0), 1.0);
    if (bp.resolution > rel_eps) bp = refine(field, bp, rel_eps, scan_config(cfg));
    const JordanData jd = extract_jordan(mats, bp);

    std::string j = "{";
    j += "\"g0_re\":" + io::fmt17(jd.g0.real());
    j += ",\"g0_im\":" + io::fmt17(jd.g0.imag());
    j += ",\"lambda0_re\":" + io::fmt17(jd.lambda0.real());
    j += ",\"lambda0_im\":" + io::fmt17(jd.lambda0.imag());
    j += ",\"eta0_re\":" + io::fmt17(jd.eta0.real());
    j += ",\"eta0_im\":" + io::fmt17(jd.eta0.imag());
    j += ",\"C_re\":" + io::fmt17(jd.C.real());
    j += ",\"C_im\":" + io::fmt17(jd.C.imag());
    j += ",\"self_bilinear\":" + io::fmt17(std::abs(bilinear_form(jd.v0, jd.v0)));
    j += ",\"jordan_residual\":" + io::fmt17(jd.jordan_residual);
    j += ",\"resolution\":" + io::fmt17(bp.resolution);
    j += ",\"gauge\":{";
    j += "\"v0\":\"" + io::json_escape(jd.gauge.v0_gauge) + "\"";
    j += ",\"y0\":\"" + io::json_escape(jd.gauge.y0_gauge) + "\"";
    j += ",\"branch\":\"" + io::json_escape(jd.gauge.branch) + "\"";
    j += ",\"eta0_probe_offsets\":[";
    for (std::size_t i = 0; i < jd.gauge.eta0_probe_offsets.size(); ++i) {
        if (i) j += ",";
        j += io::fmt17(jd.gauge.eta0_probe_offsets[i]);
    }
    j += "]}";
    j += ",\"v0\":[";
    for (int i = 0; i < jd.v0.size(); ++i) {
        if (i) j += ",";
        j += "[" + io::fmt17(jd.v0[i].real()) + "," + io::fmt17(jd.v0[i].imag()) + "]";
    }
    j += "],\"y0\":[";
    for (int i = 0; i < jd.y0.size(); ++i) {
        if (i) j += ",";
        j += "[" + io::fmt17(jd.y0[i].real()) + "," + io::fmt17(jd.y0[i].imag()) + "]";
    }
    j += "]}\n";
    io::write_file(out_path(cfg, "jordan.json"), j);

    if (!cfg.offsets.empty()) {
        io::CsvBuilder csv("delta,quantity,value");
        for (const auto& row : collapse_diagnostics(mats, bp, cfg.offsets))
            csv.row({io::fmt17(row.delta), row.quantity, io::fmt17(row.value)});
        io::write_file(out_path(cfg, "collapse.csv"), csv.text());
    }
    return 0;
}

int cmd_modes(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const Complex g(cfg.g0_re, cfg.g0_im);
    const OperatorMatrices mats = build_matrices(cfg, std::abs(g));
    const SpectralSolve solve = eigensolve(mats, g);

    std::vector<Point> pts;
    const double half = 0.5 * cfg.length;
    if (cfg.geometry == "disk") {
        // Diameter section along x.
        for (int p = 0; p < cfg.mode_points; ++p)
            pts.push_back({-half + cfg.length * p / (cfg.mode_points - 1), 0.0});
    } else {
        for (int p = 0; p < cfg.mode_points; ++p)
            pts.push_back({-half + cfg.length * p / (cfg.mode_points - 1), 0.0});
    }
    io::CsvBuilder csv("x,y,sheet,re,im");
    for (int s = 1; s <= cfg.n_sheets && s <= mats.size; ++s) {
        const auto vals = evaluate_mode(mats, solve, s, pts);
        for (std::size_t p = 0; p < pts.size(); ++p)
            csv.row({io::fmt17(pts[p].x), io::fmt17(pts[p].y), std::to_string(s),
                     io::fmt17(vals[p].real()), io::fmt17(vals[p].imag())});
    }
    io::write_file(out_path(cfg, "modes.csv"), csv.text());
    return 0;
}

int cmd_evolve(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const Complex g(cfg.g0_re, cfg.g0_im);
    const OperatorMatrices mats = build_matrices(cfg, std::abs(g));

    // Uniform initial magnetization: only the constant mode carries weight.
    Magnetization m0;
    m0.coefficients = Eigen::VectorXcd::Zero(mats.size);
    const double measure = (cfg.geometry == "disk")
                               ? M_PI * 0.25 * cfg.length * cfg.length
                               : cfg.length;
    m0.coefficients[0] = std::sqrt(measure);

    io::CsvBuilder csv("t,coeff,re,im");
    io::CsvBuilder sig("t,signal_re,signal_im");
    for (int k = 0; k < cfg.time_count; ++k) {
        const double t = cfg.time_count == 1
                             ? cfg.time_max
                             : cfg.time_max * k / (cfg.time_count - 1);
        const Magnetization mt = evolve(mats, g, m0, t);
        for (int i = 0; i < mats.size; ++i)
            csv.row({io::fmt17(t), std::to_string(i + 1), io::fmt17(mt.coefficients[i].real()),
                     io::fmt17(mt.coefficients[i].imag())});
        // Volume-averaged signal; only the constant mode integrates to
        // something nonzero.
        const Complex signal = mt.coefficients[0] * std::sqrt(measure) / measure;
        sig.row({io::fmt17(t), io::fmt17(signal.real()), io::fmt17(signal.imag())});
    }
    io::write_file(out_path(cfg, "evolve.csv"), csv.text());
    io::write_file(out_path(cfg, "evolve_signal.csv"), sig.text());
    return 0;
}

int cmd_toy(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    write_echo(cfg);
    const SheetModel model = (cfg.toy_model == "quartic") ? SheetModel::Quartic : SheetModel::Sqrt;
    io::CsvBuilder csv("g_re,g_im,sheet,val_re,val_im");
    for (int i = 0; i < cfg.toy_count; ++i) {
        const double re = cfg.toy_re_min +
                          (cfg.toy_re_max - cfg.toy_re_min) * i / std::max(1, cfg.toy_count - 1);
        for (int j = 0; j < cfg.toy_count; ++j) {
            const double im = cfg.toy_im_min +
                              (cfg.toy_im_max - cfg.toy_im_min) * j / std::max(1, cfg.toy_count - 1);
            const auto vals = sheets(model, Complex(re, im));
            for (std::size_t s = 0; s < vals.size(); ++s)
                csv.row({io::fmt17(re), io::fmt17(im), std::to_string(s + 1),
                         io::fmt17(vals[s].real()), io::fmt17(vals[s].imag())});
        }
    }
    io::write_file(out_path(cfg, "toy_sheets.csv"), csv.text());
    return 0;
}

int cmd_gc(const PhysicalParams& params, std::ostream& out) {
    const double gc = critical_gradient(params);
    out << "G_c = " << io::fmt17(gc) << " T/m\n";
    out << "G_c = " << io::fmt17(gc * 1e3) << " mT/m\n";
    return 0;
}

}  // namespace bt::cli
