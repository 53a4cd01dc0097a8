#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "odseg/commands.hpp"
#include "odseg/image_io.hpp"
#include "odseg/phantom.hpp"

using namespace odseg;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("odseg_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// CSV body with the elapsed column stripped (timings differ between runs)
std::string strip_elapsed(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto last_comma = line.rfind(',');
        out << line.substr(0, last_comma) << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("phantom generation is bit-deterministic and respects its invariants") {
    for (int i = 0; i < 4; ++i) {
        PhantomSpec spec;
        spec.seed = derive_seed(7, i);
        spec.kind = static_cast<PhantomKind>(i % 3);
        const Phantom a = make_phantom(spec);
        const Phantom b = make_phantom(spec);
        CHECK(a.image.data == b.image.data);  // seed 7 twice: identical
        CHECK(a.gt_disk == b.gt_disk);

        // gt disk diameter within the configured 70..200 px range at DRIVE scale
        CHECK(a.diameter_h >= 70.0);
        CHECK(a.diameter_h <= 200.0);
        CHECK(a.diameter_v >= a.diameter_h);
        CHECK(a.diameter_v <= 200.0);

        // the vessel trunk intersects the gt disk
        bool trunk_hits_disk = false;
        for (int r = 0; r < a.gt_disk.height && !trunk_hits_disk; ++r)
            trunk_hits_disk = a.gt_disk.get(r, a.trunk_col);
        CHECK(trunk_hits_disk);

        // gt mask is nonempty and inside the frame
        CHECK(a.gt_disk.count() > 3000);
    }
}

TEST_CASE("cmd_phantom writes a consistent, re-readable file set") {
    const fs::path dir = make_temp_dir("phantom");
    std::ostringstream out, err;
    REQUIRE(cmd_phantom(3, 7, dir.string(), 565, 584, out, err) == 0);
    CHECK(fs::exists(dir / "phantom_000.png"));
    CHECK(fs::exists(dir / "phantom_002_gt.png"));
    CHECK(fs::exists(dir / "manifest.csv"));
    CHECK(fs::exists(dir / "phantoms.json"));

    // rewriting with the same seed reproduces the files byte for byte
    const std::string first = slurp(dir / "phantom_001.png");
    const fs::path dir2 = make_temp_dir("phantom_again");
    REQUIRE(cmd_phantom(3, 7, dir2.string(), 565, 584, out, err) == 0);
    CHECK(first == slurp(dir2 / "phantom_001.png"));

    const auto rows = load_manifest((dir / "manifest.csv").string());
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(fs::exists(row.image));  // relative paths resolved to the manifest dir
        CHECK(fs::exists(row.gt));
        const BinaryMask gt = read_mask(row.gt);
        CHECK(gt.count() > 0);
    }
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("cmd_segment writes mask {0,255}, overlay, and sidecar") {
    const fs::path dir = make_temp_dir("segment");
    std::ostringstream out, err;
    REQUIRE(cmd_phantom(1, 21, dir.string(), 565, 584, out, err) == 0);

    const std::string img = (dir / "phantom_000.png").string();
    REQUIRE(cmd_segment(img, PipelineConfig{}, (dir / "out").string(), out, err) == 0);

    const fs::path mask_path = dir / "out" / "phantom_000_mask.png";
    REQUIRE(fs::exists(mask_path));
    const ColorImage raw = read_image(mask_path.string());
    CHECK(raw.channels == 1);
    for (auto v : raw.data) CHECK((v == 0 || v == 255));

    // round trip: the re-read mask equals the in-memory segmentation mask
    const GrayImage gray = to_gray(read_image(img), ChannelMode::Luma);
    const auto run = run_pipeline(gray, PipelineConfig{});
    REQUIRE(run.has_value());
    CHECK(read_mask(mask_path.string()) == run->segmentation.mask);

    CHECK(fs::exists(dir / "out" / "phantom_000_overlay.png"));
    const std::string sidecar = slurp(dir / "out" / "phantom_000.json");
    for (const char* field : {"center", "rect", "split_col", "low_confidence", "elapsed_s"})
        CHECK(sidecar.find(field) != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cmd_locate reports decode failures with the path and is deterministic") {
    const fs::path dir = make_temp_dir("locate");
    const fs::path bogus = dir / "corrupt.png";
    std::ofstream(bogus) << "this is not a png";
    std::ostringstream out, err;
    CHECK(cmd_locate(bogus.string(), PipelineConfig{}, false, out, err) == 1);
    CHECK(err.str().find("corrupt.png") != std::string::npos);

    REQUIRE(cmd_phantom(1, 33, dir.string(), 565, 584, out, err) == 0);
    std::ostringstream o1, o2, e;
    CHECK(cmd_locate((dir / "phantom_000.png").string(), PipelineConfig{}, true, o1, e) == 0);
    CHECK(cmd_locate((dir / "phantom_000.png").string(), PipelineConfig{}, true, o2, e) == 0);
    // byte-identical apart from the wall-time field
    auto strip_time = [](std::string s) {
        const auto pos = s.find("elapsed_s");
        return s.substr(0, pos);
    };
    CHECK(strip_time(o1.str()) == strip_time(o2.str()));
    fs::remove_all(dir);
}

TEST_CASE("evaluate_manifest: partial failure keeps going, empty manifest refuses") {
    const fs::path dir = make_temp_dir("eval");
    std::ostringstream out, err;
    REQUIRE(cmd_phantom(4, 11, dir.string(), 565, 584, out, err) == 0);

    auto rows = load_manifest((dir / "manifest.csv").string());
    REQUIRE(rows.size() == 4);
    rows[2].gt = (dir / "missing_gt.png").string();  // one bad row

    PipelineConfig cfg;
    cfg.threads = 2;
    const EvalOutcome outcome = evaluate_manifest(rows, cfg);
    CHECK(outcome.report.records.size() == 3);
    REQUIRE(outcome.errors.size() == 1);
    CHECK(outcome.errors[0].find("phantom_002") != std::string::npos);

    const std::string csv = report_csv(outcome.report);
    CHECK(csv.rfind("image_id,tp,fp,tn,fn,sensitivity,specificity,overlap,located,elapsed_s\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows

    const std::string json = report_json(outcome.report, outcome.errors);
    for (const char* field : {"schema_version", "means_all", "means_located", "success_rate"})
        CHECK(json.find(field) != std::string::npos);

    CHECK_THROWS(evaluate_manifest({}, cfg));
    fs::remove_all(dir);
}

TEST_CASE("evaluation records are identical across thread counts") {
    const fs::path dir = make_temp_dir("threads");
    std::ostringstream out, err;
    REQUIRE(cmd_phantom(4, 13, dir.string(), 565, 584, out, err) == 0);
    const auto rows = load_manifest((dir / "manifest.csv").string());

    PipelineConfig seq;
    seq.threads = 1;
    PipelineConfig par;
    par.threads = 3;
    const std::string a = strip_elapsed(report_csv(evaluate_manifest(rows, seq).report));
    const std::string b = strip_elapsed(report_csv(evaluate_manifest(rows, par).report));
    CHECK(a == b);
    fs::remove_all(dir);
}

TEST_CASE("cmd_eval writes both report files and flags partial failure") {
    const fs::path dir = make_temp_dir("cmdeval");
    std::ostringstream out, err;
    REQUIRE(cmd_phantom(2, 17, dir.string(), 565, 584, out, err) == 0);

    const std::string report = (dir / "report.csv").string();
    REQUIRE(cmd_eval((dir / "manifest.csv").string(), PipelineConfig{}, report, out, err) == 0);
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "report.json"));

    // a manifest whose gt is missing: row error, nonzero exit, run continues
    {
        std::ofstream mf(dir / "partial.csv");
        mf << "image,gt,fov\n";
        mf << "phantom_000.png,phantom_000_gt.png,\n";
        mf << "phantom_001.png,nope.png,\n";
    }
    std::ostringstream out2, err2;
    CHECK(cmd_eval((dir / "partial.csv").string(), PipelineConfig{}, report, out2, err2) == 1);
    CHECK(err2.str().find("nope.png") != std::string::npos);

    // empty manifest: error, no report
    {
        std::ofstream mf(dir / "empty.csv");
        mf << "image,gt,fov\n";
    }
    fs::remove(dir / "report.csv");
    std::ostringstream out3, err3;
    CHECK(cmd_eval((dir / "empty.csv").string(), PipelineConfig{}, report, out3, err3) == 1);
    CHECK_FALSE(fs::exists(dir / "report.csv"));
    fs::remove_all(dir);
}
