#pragma once

#include <string>

#include "odseg/imgproc.hpp"
#include "odseg/locator.hpp"
#include "odseg/segmenter.hpp"
#include "odseg/vessels.hpp"

namespace odseg {

/// Every tunable of the pipeline, round-trippable through a key=value file.
/// Unknown keys are rejected by name.
struct PipelineConfig {
    ChannelMode channel_mode = ChannelMode::Luma;
    LocatorConfig locator;
    VesselConfig vessels;
    SegmenterConfig segmenter;
    int threads = 0;  // 0: hardware concurrency
};

/// Parse `key = value` lines ('#' comments, blank lines allowed) on top of the
/// defaults. Throws std::invalid_argument naming any unknown key or bad value.
PipelineConfig parse_config_text(const std::string& text);

/// Load a config file (see parse_config_text).
PipelineConfig load_config(const std::string& path);

/// Serialize a config as a parseable key=value document.
std::string config_to_text(const PipelineConfig& cfg);

/// The generated reference: every key with its documentation and default.
std::string config_reference();

}  // namespace odseg
