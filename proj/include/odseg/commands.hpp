#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "odseg/config.hpp"
#include "odseg/metrics.hpp"
#include "odseg/segmenter.hpp"

namespace odseg {

struct PipelineRun {
    LocatorOutcome located;
    SegmentationResult segmentation;
    double elapsed_s = 0.0;  // wall time of localization + segmentation
};

/// Locate then segment; nullopt when the locator finds no candidate at all.
std::optional<PipelineRun> run_pipeline(const GrayImage& gray, const PipelineConfig& cfg);

struct ManifestRow {
    std::string image;
    std::string gt;   // optional
    std::string fov;  // optional
};

/// CSV manifest with header `image,gt,fov`; relative paths resolve against the
/// manifest's directory.
std::vector<ManifestRow> load_manifest(const std::string& path);

struct EvalOutcome {
    BatchReport report;
    std::vector<std::string> errors;  // row-level failures, e.g. missing ground truth
};

/// Evaluate all rows (ground truth required per row) in parallel; failures
/// turn into error entries, the run continues.
EvalOutcome evaluate_manifest(const std::vector<ManifestRow>& rows, const PipelineConfig& cfg);

/// Fixed-layout CSV: header image_id,tp,fp,tn,fn,sensitivity,specificity,
/// overlap,located,elapsed_s with 6-decimal reals and located as 1/0.
std::string report_csv(const BatchReport& report);

/// JSON summary: both mean variants (all / located-only), success rate, errors.
std::string report_json(const BatchReport& report, const std::vector<std::string>& errors);

int cmd_locate(const std::string& image_path, const PipelineConfig& cfg, bool as_json,
               std::ostream& out, std::ostream& err);
int cmd_segment(const std::string& image_path, const PipelineConfig& cfg,
                const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_eval(const std::string& manifest_path, const PipelineConfig& cfg,
             const std::string& report_path, std::ostream& out, std::ostream& err);
int cmd_phantom(int count, std::uint64_t seed, const std::string& out_dir, int width, int height,
                std::ostream& out, std::ostream& err);

}  // namespace odseg
