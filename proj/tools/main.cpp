#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "bt/cli.hpp"
#include "bt/errors.hpp"

namespace {

void add_geometry_flags(CLI::App* app, bt::cli::RunConfig& cfg) {
    app->add_option("--geometry", cfg.geometry, "interval | disk | imported");
    app->add_option("--length", cfg.length, "interval length / disk diameter");
    app->add_option("--import-path", cfg.import_path, "matrix exchange file (imported)");
    app->add_option("--n-sheets", cfg.n_sheets, "sheets to report");
}

}  // namespace

int main(int argc, char** argv) {
    bt::cli::RunConfig cfg;
    std::string truncation_arg;

    // The config file seeds every field; command-line flags override.
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") cfg = bt::cli::RunConfig::from_file(argv[i + 1]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"Spectral toolkit for the truncated diffusion-gradient operator: "
                 "sweeps, branch-point scans, Jordan analysis"};
    app.require_subcommand(1);

    std::string config_file;
    app.add_option("--config", config_file, "key=value config file");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--threads", cfg.threads, "worker threads for contour batches");
    app.add_option("--truncation", truncation_arg, "matrix truncation or 'auto'");

    auto* spectrum = app.add_subcommand("spectrum", "sweep real g and dump per-sheet eigenvalues");
    add_geometry_flags(spectrum, cfg);
    spectrum->add_option("--g-min", cfg.g_min);
    spectrum->add_option("--g-max", cfg.g_max);
    spectrum->add_option("--g-count", cfg.g_count);
    spectrum->add_option("--grid-scale", cfg.grid_scale, "linear | cbrt");
    spectrum->add_option("--modes-at", cfg.modes_at, "g values for mode snapshots");
    spectrum->add_option("--mode-points", cfg.mode_points);

    auto* scan = app.add_subcommand("scan", "locate branch points in a rectangle of complex g");
    add_geometry_flags(scan, cfg);
    scan->add_option("--re-min", cfg.region_re_min);
    scan->add_option("--re-max", cfg.region_re_max);
    scan->add_option("--im-min", cfg.region_im_min);
    scan->add_option("--im-max", cfg.region_im_max);
    scan->add_option("--epsilon", cfg.epsilon, "target resolution");
    scan->add_option("--samples", cfg.samples_per_contour);
    scan->add_option("--max-depth", cfg.max_depth);
    scan->add_option("--contour-shape", cfg.contour_shape, "square | circle");

    auto* refine = app.add_subcommand("refine", "sharpen one located branch point");
    add_geometry_flags(refine, cfg);
    refine->add_option("--g0-re", cfg.g0_re);
    refine->add_option("--g0-im", cfg.g0_im);
    refine->add_option("--resolution", cfg.resolution, "current resolution");
    refine->add_option("--target-eps", cfg.target_eps);

    auto* jordan = app.add_subcommand("jordan", "extract the Jordan pair at a branch point");
    add_geometry_flags(jordan, cfg);
    jordan->add_option("--g0-re", cfg.g0_re);
    jordan->add_option("--g0-im", cfg.g0_im);
    jordan->add_option("--resolution", cfg.resolution);
    jordan->add_option("--target-eps", cfg.target_eps, "relative refinement target");
    jordan->add_option("--offsets", cfg.offsets, "collapse diagnostics offsets");

    auto* modes = app.add_subcommand("modes", "evaluate eigenmodes on a spatial grid");
    add_geometry_flags(modes, cfg);
    modes->add_option("--g-re", cfg.g0_re);
    modes->add_option("--g-im", cfg.g0_im);
    modes->add_option("--mode-points", cfg.mode_points);

    auto* evolve = app.add_subcommand("evolve", "transport a uniform magnetization in time");
    add_geometry_flags(evolve, cfg);
    evolve->add_option("--g-re", cfg.g0_re);
    evolve->add_option("--g-im", cfg.g0_im);
    evolve->add_option("--t-max", cfg.time_max);
    evolve->add_option("--t-count", cfg.time_count);

    auto* gc = app.add_subcommand("gc", "critical gradient eta D / (gamma L^3)");
    bt::cli::PhysicalParams params;
    gc->add_option("--D", params.diffusivity, "diffusion coefficient, m^2/s")->required();
    gc->add_option("--gamma", params.gyromagnetic, "gyromagnetic ratio, 1/(T s)")->required();
    gc->add_option("--L", params.length, "size, m")->required();
    gc->add_option("--eta", params.eta, "dimensionless branch constant")->required();

    auto* toy = app.add_subcommand("toy", "dump the model sheet surfaces on a grid");
    toy->add_option("--model", cfg.toy_model, "sqrt | quartic");
    toy->add_option("--re-min", cfg.toy_re_min);
    toy->add_option("--re-max", cfg.toy_re_max);
    toy->add_option("--im-min", cfg.toy_im_min);
    toy->add_option("--im-max", cfg.toy_im_max);
    toy->add_option("--count", cfg.toy_count);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!truncation_arg.empty()) cfg.set("truncation", truncation_arg);
        CLI::App* sub = app.get_subcommands().front();
        cfg.command = sub->get_name();
        if (sub == spectrum) return bt::cli::cmd_spectrum(cfg);
        if (sub == scan) return bt::cli::cmd_scan(cfg);
        if (sub == refine) return bt::cli::cmd_refine(cfg);
        if (sub == jordan) return bt::cli::cmd_jordan(cfg);
        if (sub == modes) return bt::cli::cmd_modes(cfg);
        if (sub == evolve) return bt::cli::cmd_evolve(cfg);
        if (sub == gc) return bt::cli::cmd_gc(params, std::cout);
        if (sub == toy) return bt::cli::cmd_toy(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
