#include "odseg/commands.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "odseg/image_io.hpp"
#include "odseg/phantom.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace odseg {

namespace {

constexpr int kReportSchemaVersion = 1;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

ordered_json means_json(const MeanStats& m) {
    return ordered_json{{"count", m.count},
                        {"sensitivity", m.sensitivity},
                        {"specificity", m.specificity},
                        {"overlap", m.overlap},
                        {"elapsed_s", m.elapsed_s}};
}

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (base / path).string();
}

GrayImage load_gray(const std::string& path, const PipelineConfig& cfg) {
    return to_gray(read_image(path), cfg.channel_mode);
}

int worker_count(const PipelineConfig& cfg, size_t jobs) {
    int n = cfg.threads > 0 ? cfg.threads
                            : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, n);
    return static_cast<int>(std::min<size_t>(n, std::max<size_t>(jobs, 1)));
}

ordered_json sidecar_json(const std::string& image_path, const PipelineRun& run) {
    const auto& seg = run.segmentation;
    const char* temporal =
        seg.box.temporal_side == DiskBox::TemporalSide::LeftOfSplit ? "left" : "right";
    return ordered_json{
        {"schema_version", kReportSchemaVersion},
        {"image", image_path},
        {"center", {{"row", seg.box.center.row}, {"col", seg.box.center.col}}},
        {"locator_center",
         {{"row", run.located.center.row}, {"col", run.located.center.col}}},
        {"rect",
         {{"top", seg.box.rect.top},
          {"left", seg.box.rect.left},
          {"bottom", seg.box.rect.bottom},
          {"right", seg.box.rect.right}}},
        {"split_col", seg.box.split_col},
        {"temporal_side", temporal},
        {"iterations", run.located.iterations},
        {"fraction_used", run.located.fraction_used},
        {"average_vessel_width", run.located.average_width},
        {"low_confidence", seg.low_confidence},
        {"elapsed_s", run.elapsed_s},
    };
}

}  // namespace

std::optional<PipelineRun> run_pipeline(const GrayImage& gray, const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    auto located = locate_disk(gray, cfg.locator, cfg.vessels);
    if (!located) return std::nullopt;
    PipelineRun run;
    run.located = *located;
    run.segmentation = segment_disk(gray, *located, cfg.segmenter, cfg.vessels);
    run.elapsed_s = seconds_since(t0);
    return run;
}

std::vector<ManifestRow> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    const fs::path base = fs::path(path).parent_path();

    std::vector<ManifestRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 3> cols{};
        size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            const size_t comma = line.find(',', start);
            cols[i] = line.substr(start, comma == std::string::npos ? comma : comma - start);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!header_seen) {
            if (cols[0] != "image")
                throw std::runtime_error("manifest must start with header 'image,gt,fov': " +
                                         path);
            header_seen = true;
            continue;
        }
        if (cols[0].empty()) continue;
        rows.push_back(ManifestRow{resolve(base, cols[0]), resolve(base, cols[1]),
                                   resolve(base, cols[2])});
    }
    return rows;
}

EvalOutcome evaluate_manifest(const std::vector<ManifestRow>& rows, const PipelineConfig& cfg) {
    if (rows.empty()) throw std::invalid_argument("evaluate_manifest: empty manifest");

    struct RowResult {
        std::optional<EvalRecord> record;
        std::string error;
    };
    std::vector<RowResult> results(rows.size());

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            const auto& row = rows[i];
            auto& res = results[i];
            try {
                if (row.gt.empty())
                    throw std::runtime_error("no ground-truth mask in manifest");
                const GrayImage gray = load_gray(row.image, cfg);
                const auto run = run_pipeline(gray, cfg);
                if (!run) throw std::runtime_error("optic disk not located");

                const BinaryMask gt = read_mask(row.gt);
                if (gt.width != gray.width || gt.height != gray.height)
                    throw std::runtime_error("ground-truth dimensions mismatch");
                BinaryMask fov;
                const bool has_fov = !row.fov.empty();
                if (has_fov) {
                    fov = read_mask(row.fov);
                    if (fov.width != gray.width || fov.height != gray.height)
                        throw std::runtime_error("fov dimensions mismatch");
                }

                EvalRecord rec;
                rec.image_id = fs::path(row.image).stem().string();
                rec.counts = confusion(run->segmentation.mask, gt, has_fov ? &fov : nullptr);
                const Eq1Metrics m = eq1_metrics(rec.counts);
                rec.sensitivity = m.sensitivity;
                rec.specificity = m.specificity;
                rec.overlap = m.overlap;
                rec.located = localization_success(run->located.center, gt);
                rec.elapsed_s = run->elapsed_s;
                res.record = std::move(rec);
            } catch (const std::exception& e) {
                res.error = row.image + ": " + e.what();
            }
        }
    };

    const int n_workers = worker_count(cfg, rows.size());
    std::vector<std::thread> pool;
    for (int t = 1; t < n_workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    EvalOutcome out;
    std::vector<EvalRecord> records;
    for (auto& r : results) {
        if (r.record) records.push_back(std::move(*r.record));
        else out.errors.push_back(r.error);
    }
    if (records.empty())
        throw std::runtime_error("no image in the manifest could be evaluated");
    out.report = aggregate(std::move(records));
    return out;
}

std::string report_csv(const BatchReport& report) {
    std::ostringstream os;
    os << "image_id,tp,fp,tn,fn,sensitivity,specificity,overlap,located,elapsed_s\n";
    for (const auto& r : report.records) {
        os << r.image_id << ',' << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ','
           << r.counts.fn << ',' << fmt6(r.sensitivity) << ',' << fmt6(r.specificity) << ','
           << fmt6(r.overlap) << ',' << (r.located ? 1 : 0) << ',' << fmt6(r.elapsed_s) << "\n";
    }
    return os.str();
}

std::string report_json(const BatchReport& report, const std::vector<std::string>& errors) {
    ordered_json j{
        {"schema_version", kReportSchemaVersion},
        {"images", static_cast<int>(report.records.size() + errors.size())},
        {"evaluated", static_cast<int>(report.records.size())},
        {"success_rate", report.success_rate},
        {"means_all", means_json(report.over_all)},
        {"means_located", means_json(report.over_located)},
        {"errors", errors},
    };
    return j.dump(2) + "\n";
}

int cmd_locate(const std::string& image_path, const PipelineConfig& cfg, bool as_json,
               std::ostream& out, std::ostream& err) {
    try {
        const GrayImage gray = load_gray(image_path, cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const auto located = locate_disk(gray, cfg.locator, cfg.vessels);
        if (!located) {
            err << image_path << ": optic disk not located\n";
            return 1;
        }
        const double elapsed = seconds_since(t0);
        if (as_json) {
            out << ordered_json{{"image", image_path},
                                {"center",
                                 {{"row", located->center.row}, {"col", located->center.col}}},
                                {"iterations", located->iterations},
                                {"fraction_used", located->fraction_used},
                                {"average_vessel_width", located->average_width},
                                {"low_confidence", located->low_confidence},
                                {"elapsed_s", elapsed}}
                       .dump(2)
                << "\n";
        } else {
            out << "center " << fmt6(located->center.row) << " " << fmt6(located->center.col)
                << " (iterations=" << located->iterations
                << ", fraction=" << located->fraction_used
                << ", width=" << fmt6(located->average_width)
                << (located->low_confidence ? ", low-confidence" : "") << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_segment(const std::string& image_path, const PipelineConfig& cfg,
                const std::string& out_dir, std::ostream& out, std::ostream& err) {
    try {
        fs::create_directories(out_dir);
        const ColorImage color = read_image(image_path);
        const GrayImage gray = to_gray(color, cfg.channel_mode);
        const auto run = run_pipeline(gray, cfg);
        if (!run) {
            err << image_path << ": optic disk not located\n";
            return 1;
        }

        const std::string stem = fs::path(image_path).stem().string();
        const fs::path mask_path = fs::path(out_dir) / (stem + "_mask.png");
        const fs::path overlay_path = fs::path(out_dir) / (stem + "_overlay.png");
        const fs::path json_path = fs::path(out_dir) / (stem + ".json");

        write_mask_png(mask_path.string(), run->segmentation.mask);

        ColorImage overlay(color.width, color.height, 3);
        for (int r = 0; r < color.height; ++r)
            for (int c = 0; c < color.width; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    overlay.at(r, c, ch) = color.at(r, c, color.channels == 3 ? ch : 0);
        for (const auto& p : run->segmentation.boundary) {
            overlay.at(p.row, p.col, 0) = 0;
            overlay.at(p.row, p.col, 1) = 255;
            overlay.at(p.row, p.col, 2) = 0;
        }
        write_rgb_png(overlay_path.string(), overlay);

        std::ofstream js(json_path);
        js << sidecar_json(image_path, *run).dump(2) << "\n";
        if (!js) throw std::runtime_error("cannot write sidecar: " + json_path.string());

        out << mask_path.string() << "\n" << overlay_path.string() << "\n"
            << json_path.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_eval(const std::string& manifest_path, const PipelineConfig& cfg,
             const std::string& report_path, std::ostream& out, std::ostream& err) {
    try {
        const auto rows = load_manifest(manifest_path);
        if (rows.empty()) {
            err << manifest_path << ": manifest lists no images, no report written\n";
            return 1;
        }
        const EvalOutcome outcome = evaluate_manifest(rows, cfg);

        std::ofstream csv(report_path);
        csv << report_csv(outcome.report);
        if (!csv) throw std::runtime_error("cannot write report: " + report_path);
        fs::path json_path(report_path);
        json_path.replace_extension(".json");
        std::ofstream js(json_path);
        js << report_json(outcome.report, outcome.errors);
        if (!js) throw std::runtime_error("cannot write report: " + json_path.string());

        out << "evaluated " << outcome.report.records.size() << "/" << rows.size()
            << " images, success_rate=" << outcome.report.success_rate
            << "%, mean_overlap(all)=" << fmt6(outcome.report.over_all.overlap) << "\n"
            << report_path << "\n" << json_path.string() << "\n";
        for (const auto& e : outcome.errors) err << "error: " << e << "\n";
        return outcome.errors.empty() ? 0 : 1;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_phantom(int count, std::uint64_t seed, const std::string& out_dir, int width, int height,
                std::ostream& out, std::ostream& err) {
    try {
        if (count < 1) throw std::invalid_argument("phantom count must be >= 1");
        fs::create_directories(out_dir);

        constexpr PhantomKind kinds[] = {PhantomKind::Standard, PhantomKind::Distractor,
                                         PhantomKind::Dim};
        std::ostringstream manifest;
        manifest << "image,gt,fov\n";
        ordered_json meta = ordered_json::array();
        for (int i = 0; i < count; ++i) {
            PhantomSpec spec;
            spec.width = width;
            spec.height = height;
            spec.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
            spec.kind = kinds[i % 3];
            const Phantom ph = make_phantom(spec);

            std::ostringstream id;
            id << "phantom_" << std::setw(3) << std::setfill('0') << i;
            const std::string img_name = id.str() + ".png";
            const std::string gt_name = id.str() + "_gt.png";
            write_gray_png((fs::path(out_dir) / img_name).string(), ph.image);
            write_mask_png((fs::path(out_dir) / gt_name).string(), ph.gt_disk);
            manifest << img_name << ',' << gt_name << ",\n";
            meta.push_back(ordered_json{
                {"id", id.str()},
                {"kind", phantom_kind_name(ph.kind)},
                {"seed", spec.seed},
                {"disk_center", {{"row", ph.disk_center.row}, {"col", ph.disk_center.col}}},
                {"diameter_h", ph.diameter_h},
                {"diameter_v", ph.diameter_v},
                {"trunk_col", ph.trunk_col},
            });
        }
        {
            std::ofstream mf(fs::path(out_dir) / "manifest.csv");
            mf << manifest.str();
            if (!mf) throw std::runtime_error("cannot write manifest in " + out_dir);
            std::ofstream js(fs::path(out_dir) / "phantoms.json");
            js << meta.dump(2) << "\n";
            if (!js) throw std::runtime_error("cannot write phantoms.json in " + out_dir);
        }
        out << "wrote " << count << " phantoms to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace odseg
