#include "odseg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace odseg {

namespace {

struct KeyInfo {
    const char* name;
    const char* doc;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v +
                                    "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string format_double(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

#define NUM_KEY(key, doc, field)                                                        \
    KeyInfo {                                                                           \
        key, doc, [](const PipelineConfig& c) { return format_double(c.field); },       \
            [](PipelineConfig& c, const std::string& v) {                               \
                c.field = parse_double(key, v);                                         \
            }                                                                           \
    }
#define INT_KEY(key, doc, field)                                                        \
    KeyInfo {                                                                           \
        key, doc, [](const PipelineConfig& c) { return std::to_string(c.field); },      \
            [](PipelineConfig& c, const std::string& v) {                               \
                c.field = static_cast<decltype(c.field)>(parse_int(key, v));            \
            }                                                                           \
    }
#define BOOL_KEY(key, doc, field)                                                       \
    KeyInfo {                                                                           \
        key, doc, [](const PipelineConfig& c) { return c.field ? "true" : "false"; },   \
            [](PipelineConfig& c, const std::string& v) { c.field = parse_bool(key, v); } \
    }

const std::vector<KeyInfo>& key_table() {
    static const std::vector<KeyInfo> table = {
        KeyInfo{"channel_mode",
                "grayscale source: luma (Rec.601 0.299/0.587/0.114), red, green, or raw "
                "(single-channel input only)",
                [](const PipelineConfig& c) {
                    switch (c.channel_mode) {
                        case ChannelMode::Red: return std::string("red");
                        case ChannelMode::Green: return std::string("green");
                        case ChannelMode::Raw: return std::string("raw");
                        default: return std::string("luma");
                    }
                },
                [](PipelineConfig& c, const std::string& v) {
                    if (v == "luma") c.channel_mode = ChannelMode::Luma;
                    else if (v == "red") c.channel_mode = ChannelMode::Red;
                    else if (v == "green") c.channel_mode = ChannelMode::Green;
                    else if (v == "raw") c.channel_mode = ChannelMode::Raw;
                    else
                        throw std::invalid_argument(
                            "config key 'channel_mode': expected luma/red/green/raw, got '" + v +
                            "'");
                }},
        NUM_KEY("initial_fraction", "top intensity share selected on the first pass",
                locator.initial_fraction),
        NUM_KEY("fraction_step", "fraction increase per localization iteration",
                locator.fraction_step),
        NUM_KEY("max_fraction", "fraction cap; past it the best-so-far candidate is used",
                locator.max_fraction),
        NUM_KEY("circularity_min", "minimum candidate circularity (4*pi*area/perimeter^2)",
                locator.circularity_min),
        INT_KEY("min_region_area", "minimum candidate area in pixels", locator.min_region_area),
        NUM_KEY("vessel_width_min", "minimum windowed average vessel width for a valid disk",
                locator.vessel_width_min),
        INT_KEY("fov_floor", "minimum intensity threshold for the field-of-view mask",
                locator.fov_floor),
        NUM_KEY("fov_range_fraction",
                "FOV threshold is max(fov_floor, min + this * (max - min))",
                locator.fov_range_fraction),
        NUM_KEY("fov_min_coverage",
                "below this FOV coverage share the whole frame is used",
                locator.fov_min_coverage),
        INT_KEY("vessel_window", "side of the square vessel-analysis windows",
                vessels.window_size),
        INT_KEY("vessel_stride", "step between overlapping vessel windows", vessels.stride),
        INT_KEY("radon_angle_bins", "orientation bins over [0, 180) for the Radon transform",
                vessels.radon_angle_bins),
        NUM_KEY("radon_confidence_min",
                "minimum max/median projection-variance ratio for a dominant direction",
                vessels.radon_confidence_min),
        NUM_KEY("edge_threshold_factor",
                "edge validation threshold as a multiple of the median |gradient profile|",
                vessels.edge_threshold_factor),
        NUM_KEY("edge_threshold_floor", "absolute floor of the edge validation threshold",
                vessels.edge_threshold_floor),
        INT_KEY("max_pair_distance", "max profile samples between paired vessel edges",
                vessels.max_pair_distance),
        NUM_KEY("diameter_ratio_max",
                "rect height = width * this (vertical disk diameter exceeds horizontal)",
                segmenter.diameter_ratio_max),
        NUM_KEY("boundary_grad_factor",
                "boundary gradient threshold as a multiple of the scan-line median |gx|",
                segmenter.boundary_grad_factor),
        NUM_KEY("boundary_grad_floor", "absolute floor of the boundary gradient threshold",
                segmenter.boundary_grad_floor),
        INT_KEY("boundary_halfwidth",
                "initial half-span of the boundary scan, scaled by image width",
                segmenter.boundary_halfwidth),
        NUM_KEY("enlarge_factor", "scan window growth factor when boundary points are missing",
                segmenter.enlarge_factor),
        INT_KEY("enlarge_retries", "maximum scan window enlargements", segmenter.enlarge_retries),
        NUM_KEY("disk_diameter_min", "plausible disk diameter lower bound at reference scale",
                segmenter.disk_diameter_min),
        NUM_KEY("disk_diameter_max", "plausible disk diameter upper bound at reference scale",
                segmenter.disk_diameter_max),
        NUM_KEY("reference_width",
                "image width at which pixel-unit defaults are calibrated (DRIVE: 565)",
                segmenter.reference_width),
        NUM_KEY("split_band_fraction",
                "middle share of rect columns eligible for the temporal/nasal split",
                segmenter.split_band_fraction),
        NUM_KEY("vertical_tolerance_deg",
                "vessel direction tolerance around vertical for split scoring",
                segmenter.vertical_tolerance_deg),
        BOOL_KEY("dual_threshold",
                 "apply Otsu per split side (false: one Otsu over the whole rect)",
                 segmenter.dual_threshold),
        KeyInfo{"analysis_window",
                "side of the vessel-width window centered on each candidate",
                [](const PipelineConfig& c) { return std::to_string(c.locator.analysis_window); },
                [](PipelineConfig& c, const std::string& v) {
                    const int w = static_cast<int>(parse_int("analysis_window", v));
                    c.locator.analysis_window = w;
                    c.segmenter.analysis_window = w;
                }},
        INT_KEY("threads", "worker threads for batch evaluation (0: hardware concurrency)",
                threads),
    };
    return table;
}

#undef NUM_KEY
#undef INT_KEY
#undef BOOL_KEY

}  // namespace

PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& k : key_table()) {
            if (key == k.name) {
                k.set(cfg, value);
                known = true;
                break;
            }
        }
        if (!known) throw std::invalid_argument("unknown config key: " + key);
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream os;
    for (const auto& k : key_table()) os << k.name << " = " << k.get(cfg) << "\n";
    return os.str();
}

std::string config_reference() {
    const PipelineConfig defaults;
    std::ostringstream os;
    os << "# odseg pipeline configuration\n"
       << "# key = value lines; '#' starts a comment; unknown keys are rejected\n\n";
    for (const auto& k : key_table())
        os << "# " << k.doc << "\n" << k.name << " = " << k.get(defaults) << "\n\n";
    return os.str();
}

}  // namespace odseg
