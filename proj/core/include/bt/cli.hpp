#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bt/matrices.hpp"
#include "bt/scanner.hpp"

namespace bt::cli {

// Flat configuration shared by all subcommands.  Every run echoes the
// canonical form of its configuration next to its outputs, so identical
// configs are byte-identical across runs.
struct RunConfig {
    std::string command = "";
    std::string geometry = "interval";  // interval | disk | imported
    double length = 1.0;
    std::string import_path = "";
    int truncation = 0;  // 0 = auto (doubled until the requested sheets are trusted)
    int n_sheets = 6;
    std::string out_dir = "out";
    int threads = 1;

    // spectrum sweep
    double g_min = 0.0;
    double g_max = 100.0;
    int g_count = 51;
    std::string grid_scale = "linear";  // linear | cbrt (equally spaced in g^(1/3))
    std::vector<double> modes_at;       // g values for mode snapshots
    int mode_points = 101;

    // scan region
    double region_re_min = 0.0;
    double region_re_max = 40.0;
    double region_im_min = -5.0;
    double region_im_max = 5.0;
    double epsilon = 0.5;
    int samples_per_contour = 64;
    int max_depth = 26;
    std::string contour_shape = "square";  // square | circle

    // refine / jordan / modes / evolve anchor point
    double g0_re = 0.0;
    double g0_im = 0.0;
    double resolution = 0.0;
    double target_eps = 1e-4;
    int sheet_a = 1;
    int sheet_b = 2;
    std::vector<double> offsets;  // diagnostics offsets |g - g0|

    // evolve
    double time_max = 1.0;
    int time_count = 11;

    // toy sheet surfaces
    std::string toy_model = "sqrt";  // sqrt | quartic
    double toy_re_min = -2.0;
    double toy_re_max = 2.0;
    double toy_im_min = -2.0;
    double toy_im_max = 2.0;
    int toy_count = 41;

    static RunConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string canonical_text() const;
};

struct PhysicalParams {
    double diffusivity = 0.0;   // D, m^2/s
    double gyromagnetic = 0.0;  // gamma, 1/(T s)
    double length = 0.0;        // L, m
    double eta = 0.0;           // dimensionless branch constant
};

// G_c = eta D / (gamma L^3), in T/m.
double critical_gradient(const PhysicalParams& params);

ScanConfig scan_config(const RunConfig& cfg);
OperatorMatrices build_matrices(const RunConfig& cfg, double max_abs_g);

int cmd_spectrum(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_refine(const RunConfig& cfg);
int cmd_jordan(const RunConfig& cfg);
int cmd_modes(const RunConfig& cfg);
int cmd_evolve(const RunConfig& cfg);
int cmd_toy(const RunConfig& cfg);
int cmd_gc(const PhysicalParams& params, std::ostream& out);

}  // namespace bt::cli
