#pragma once

#include <string>
#include <vector>

#include "odseg/image.hpp"

namespace odseg {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;
    bool operator==(const ConfusionCounts&) const = default;
};

struct Eq1Metrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double overlap = 0.0;  // Jaccard: tp / (tp + fp + fn)
};

struct EvalRecord {
    std::string image_id;
    ConfusionCounts counts;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double overlap = 0.0;
    bool located = false;
    double elapsed_s = 0.0;
};

struct MeanStats {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double overlap = 0.0;
    double elapsed_s = 0.0;
    int count = 0;
};

struct BatchReport {
    std::vector<EvalRecord> records;  // sorted by image_id
    MeanStats over_all;
    MeanStats over_located;  // zeros with count 0 when nothing was located
    double success_rate = 0.0;  // percent
};

/// Per-pixel confusion counts, restricted to `fov` when given.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt,
                          const BinaryMask* fov = nullptr);

/// Sensitivity, specificity and overlap with documented conventions for empty
/// denominators: sensitivity/specificity are 1.0 when their class is absent;
/// overlap is 1.0 only when both masks are empty.
Eq1Metrics eq1_metrics(const ConfusionCounts& counts);

/// True iff the (rounded) predicted center lies on a ground-truth disk pixel.
bool localization_success(PointF pred_center, const BinaryMask& gt);

/// Means over all records and over located-only records, plus the localization
/// success rate. Records are folded in image_id order. Throws on empty input.
BatchReport aggregate(std::vector<EvalRecord> records);

}  // namespace odseg
