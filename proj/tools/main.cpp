#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "odseg/commands.hpp"
#include "odseg/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"odseg: optic disk localization and segmentation for retinal fundus images"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--threads may follow the subcommand

    std::string config_path;
    int threads = -1;
    app.add_option("--config", config_path, "pipeline config file (key = value lines)");
    app.add_option("--threads", threads, "worker threads for batch commands (0: auto)");

    std::string image_path, out_dir = ".", manifest_path, report_path = "report.csv";
    bool as_json = false;

    auto* locate = app.add_subcommand("locate", "print the optic disk center of one image");
    locate->add_option("image", image_path, "input image (PNG/PPM/TIFF)")->required();
    locate->add_flag("--json", as_json, "emit JSON instead of text");

    auto* segment = app.add_subcommand("segment", "segment the optic disk of one image");
    segment->add_option("image", image_path, "input image (PNG/PPM/TIFF)")->required();
    segment->add_option("-o,--out", out_dir, "output directory for mask/overlay/sidecar");

    auto* eval = app.add_subcommand("eval", "evaluate a manifest against ground-truth masks");
    eval->add_option("manifest", manifest_path, "CSV manifest with header image,gt,fov")
        ->required();
    eval->add_option("-o,--out", report_path,
                     "per-image CSV report path (JSON summary written alongside)");

    int phantom_count = 1, phantom_w = 565, phantom_h = 584;
    std::uint64_t phantom_seed = 0;
    auto* phantom =
        app.add_subcommand("phantom", "generate synthetic fundus phantoms with ground truth");
    phantom->add_option("-n,--count", phantom_count, "number of phantoms");
    phantom->add_option("--seed", phantom_seed, "base seed (deterministic output)");
    phantom->add_option("-o,--out", out_dir, "output directory");
    phantom->add_option("--width", phantom_w, "canvas width");
    phantom->add_option("--height", phantom_h, "canvas height");

    auto* config_cmd =
        app.add_subcommand("config", "print the annotated configuration reference");

    CLI11_PARSE(app, argc, argv);

    odseg::PipelineConfig cfg;
    try {
        if (!config_path.empty()) cfg = odseg::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    if (threads >= 0) cfg.threads = threads;

    if (config_cmd->parsed()) {
        std::cout << odseg::config_reference();
        return 0;
    }
    if (locate->parsed())
        return odseg::cmd_locate(image_path, cfg, as_json, std::cout, std::cerr);
    if (segment->parsed())
        return odseg::cmd_segment(image_path, cfg, out_dir, std::cout, std::cerr);
    if (eval->parsed())
        return odseg::cmd_eval(manifest_path, cfg, report_path, std::cout, std::cerr);
    if (phantom->parsed())
        return odseg::cmd_phantom(phantom_count, phantom_seed, out_dir, phantom_w, phantom_h,
                                  std::cout, std::cerr);
    return 1;
}
