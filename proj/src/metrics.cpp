#include "odseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odseg {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* fov) {
    if (!pred.same_shape(gt) || (fov && !fov->same_shape(gt)))
        throw std::invalid_argument("confusion: dimension mismatch");
    ConfusionCounts c;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (fov && !fov->data[i]) continue;
        const bool p = pred.data[i] != 0, g = gt.data[i] != 0;
        if (p && g)
            ++c.tp;
        else if (p && !g)
            ++c.fp;
        else if (!p && g)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

Eq1Metrics eq1_metrics(const ConfusionCounts& c) {
    Eq1Metrics m;
    m.sensitivity = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 1.0;
    m.specificity = (c.tn + c.fp) > 0 ? static_cast<double>(c.tn) / (c.tn + c.fp) : 1.0;
    const long long uni = c.tp + c.fp + c.fn;
    m.overlap = uni > 0 ? static_cast<double>(c.tp) / uni : 1.0;
    return m;
}

bool localization_success(PointF pred_center, const BinaryMask& gt) {
    const int r = static_cast<int>(std::lround(pred_center.row));
    const int c = static_cast<int>(std::lround(pred_center.col));
    if (r < 0 || r >= gt.height || c < 0 || c >= gt.width) return false;
    return gt.get(r, c);
}

BatchReport aggregate(std::vector<EvalRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate: empty batch");
    std::sort(records.begin(), records.end(),
              [](const EvalRecord& a, const EvalRecord& b) { return a.image_id < b.image_id; });

    BatchReport report;
    long long located = 0;
    MeanStats all{}, loc{};
    for (const auto& r : records) {
        all.sensitivity += r.sensitivity;
        all.specificity += r.specificity;
        all.overlap += r.overlap;
        all.elapsed_s += r.elapsed_s;
        ++all.count;
        if (r.located) {
            loc.sensitivity += r.sensitivity;
            loc.specificity += r.specificity;
            loc.overlap += r.overlap;
            loc.elapsed_s += r.elapsed_s;
            ++loc.count;
            ++located;
        }
    }
    auto finish = [](MeanStats& m) {
        if (m.count == 0) return;
        m.sensitivity /= m.count;
        m.specificity /= m.count;
        m.overlap /= m.count;
        m.elapsed_s /= m.count;
    };
    finish(all);
    finish(loc);
    report.over_all = all;
    report.over_located = loc;
    report.success_rate = 100.0 * static_cast<double>(located) / records.size();
    report.records = std::move(records);
    return report;
}

}  // namespace odseg
