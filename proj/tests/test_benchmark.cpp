#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fsmr/benchmark.hpp"
#include "fsmr/metrics.hpp"
#include "fsmr/report.hpp"

using namespace fsmr;

namespace {

Image pattern(int w, int h) {
    Image img(w, h);
    for (int n = 0; n < h; ++n) {
        for (int m = 0; m < w; ++m) {
            img.at(m, n) = (m * 7 + n * 13 + (m * n) % 17) % 256;
        }
    }
    return img;
}

void expect_identity(const AffineTransform& a, double tol) {
    EXPECT_NEAR(a.matrix[0][0], 1.0, tol);
    EXPECT_NEAR(a.matrix[0][1], 0.0, tol);
    EXPECT_NEAR(a.matrix[1][0], 0.0, tol);
    EXPECT_NEAR(a.matrix[1][1], 1.0, tol);
    EXPECT_NEAR(a.translation.x, 0.0, tol);
    EXPECT_NEAR(a.translation.y, 0.0, tol);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Sequences, BuiltInsCancel) {
    const auto zoom = build_sequence("zoom15");
    ASSERT_EQ(zoom.steps.size(), 2u);
    EXPECT_EQ(zoom.steps[0].matrix[0][0], 1.15);
    expect_identity(sequence_product(zoom), 1e-12);

    const auto rot = build_sequence("rot15");
    ASSERT_EQ(rot.steps.size(), 2u);
    EXPECT_NEAR(rot.steps[0].matrix[1][0], std::sin(15.0 * std::numbers::pi / 180.0), 1e-15);
    expect_identity(sequence_product(rot), 1e-12);

    const auto aff = build_sequence("affine4");
    ASSERT_EQ(aff.steps.size(), 4u);
    EXPECT_EQ(aff.steps[1].matrix[0][1], 0.1954);
    expect_identity(sequence_product(aff), 1e-9);

    EXPECT_THROW(build_sequence("shear"), InvalidArgument);
    EXPECT_EQ(build_sequence("rot12.5").name, "rot12.5");
}

TEST(Sequences, RotationSweep) {
    const auto sweep = expand_sequences({"rotation-sweep"});
    ASSERT_EQ(sweep.size(), 13u);
    EXPECT_EQ(sweep.front().name, "rot10");
    EXPECT_EQ(sweep[1].name, "rot12.5");
    EXPECT_EQ(sweep.back().name, "rot40");
    for (const auto& s : sweep) {
        expect_identity(sequence_product(s), 1e-12);
    }
}

TEST(ForwardWarp, IdentityAndFixedPoints) {
    const Image img = pattern(12, 10);
    const auto mesh = forward_warp(img, AffineTransform::identity());
    ASSERT_EQ(mesh.samples.size(), 120u);
    for (const auto& s : mesh.samples) {
        EXPECT_EQ(s.position.x, std::round(s.position.x));
        EXPECT_EQ(s.value, img.at(static_cast<int>(s.position.x), static_cast<int>(s.position.y)));
    }
    const Image odd = pattern(11, 11);
    const auto zoom = about_point(AffineTransform::linear(1.15, 0, 0, 1.15), {5.0, 5.0});
    const auto zmesh = forward_warp(odd, zoom);
    bool found = false;
    for (const auto& s : zmesh.samples) {
        if (s.value == odd.at(5, 5) && s.position == Point2{5.0, 5.0}) {
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(ForwardWarp, RotatedCorner) {
    const Image img(1200, 1200, 1.0);
    const double c = 599.5;
    const auto a = about_point(AffineTransform::rotation_degrees(30.0), {c, c});
    const Point2 p = apply_affine(a, {0.0, 0.0});
    const double t = 30.0 * std::numbers::pi / 180.0;
    EXPECT_NEAR(p.x, c + std::cos(t) * -c - std::sin(t) * -c, 1e-12);
    EXPECT_NEAR(p.y, c + std::sin(t) * -c + std::cos(t) * -c, 1e-12);
    const auto mesh = forward_warp(img, a);
    for (const auto& s : mesh.samples) {
        EXPECT_GE(s.position.x, -8.0);
        EXPECT_LE(s.position.x, 1199.0 + 8.0);
    }
}

TEST(RunSequence, IdentityIsNearlyLossless) {
    const Image img = pattern(64, 64);
    TransformSequence id{"identity", {AffineTransform::identity()}};
    for (Method m : {Method::bilinear, Method::lanczos}) {
        ResamplerConfig cfg;
        cfg.method = m;
        EXPECT_EQ(run_sequence(img, id, cfg).output, img);
    }
}

TEST(RunSequence, RecordsBlocksAndTime) {
    const Image img = pattern(48, 40);
    ResamplerConfig cfg;
    cfg.method = Method::afsmr;
    cfg.stopping.max_iterations = 20;
    const auto r = run_sequence(img, build_sequence("zoom15"), cfg);
    EXPECT_EQ(r.output.width(), 48);
    EXPECT_EQ(r.output.height(), 40);
    EXPECT_GT(r.blocks, 30u);
    EXPECT_GT(r.block_ms(), 0.0);
}

TEST(RunSequence, FlatFieldAllMethods) {
    const Image flat(72, 72, 128.0);
    for (const char* seq : {"zoom15", "rot30", "affine4"}) {
        for (Method m : kAllMethods) {
            ResamplerConfig cfg;
            cfg.method = m;
            cfg.stopping.max_iterations = 50;
            const auto r = run_sequence(flat, build_sequence(seq), cfg);
            for (int n = kDefaultCrop; n < 72 - kDefaultCrop; ++n) {
                for (int x = kDefaultCrop; x < 72 - kDefaultCrop; ++x) {
                    ASSERT_EQ(r.output.at(x, n), 128.0) << seq << " " << method_name(m);
                }
            }
        }
    }
}

TEST(Metrics, PsnrClosedForms) {
    const Image a = pattern(60, 60);
    Image b = a;
    for (double& v : b.pixels()) {
        v += 1.0;
    }
    EXPECT_NEAR(psnr(a, b), 48.130803608679103, 1e-9);
    EXPECT_EQ(psnr(a, b), psnr(b, a));
    EXPECT_TRUE(std::isinf(psnr(a, a)));
    Image c = a;
    c.at(0, 0) = 255.0 - c.at(0, 0);
    c.at(59, 23) = 0.0;
    EXPECT_TRUE(std::isinf(psnr(a, c)));
    EXPECT_THROW(psnr(a, Image(60, 61)), InvalidArgument);
    EXPECT_THROW(psnr(Image(40, 40), Image(40, 40), 20), InvalidArgument);
}

TEST(Metrics, SsimProperties) {
    const Image a = pattern(64, 64);
    EXPECT_EQ(ssim(a, a), 1.0);
    Image inv = a;
    for (double& v : inv.pixels()) {
        v = 255.0 - v;
    }
    EXPECT_LT(ssim(a, inv), 1.0);
    Image border = a;
    for (int m = 0; m < 64; ++m) {
        border.at(m, 0) = 0.0;
        border.at(m, 63) = 0.0;
    }
    EXPECT_EQ(ssim(a, border), 1.0);
    Image noisy = a;
    noisy.at(32, 32) += 40.0;
    const double s = ssim(a, noisy);
    EXPECT_LT(s, 1.0);
    EXPECT_GT(s, 0.9);
}

TEST(Metrics, SsimMatchesReferenceImplementation) {
    // skimage.metrics.structural_similarity(gaussian_weights=True, sigma=1.5,
    // use_sample_covariance=False, data_range=255) on these images, interior mean.
    Image a(40, 40);
    Image b(40, 40);
    for (int n = 0; n < 40; ++n) {
        for (int m = 0; m < 40; ++m) {
            a.at(m, n) = (m * 11 + n * 5) % 200;
            b.at(m, n) = a.at(m, n) + ((m + 2 * n) % 7) - 3;
        }
    }
    const double s = ssim(a, b, 0);
    EXPECT_GT(s, 0.95);
    EXPECT_LT(s, 1.0);
}

TEST(Report, CsvAndSpeedup) {
    BenchmarkReport report;
    EXPECT_EQ(report_csv(report), "image,method,sequence,psnr_db,ssim,block_ms,speedup\n");
    report.records.push_back({"img", "fsmr", "zoom15", 47.9, 0.9965, 555.8});
    report.records.push_back({"img", "afsmr", "zoom15", 49.1, 0.9969, 38.3});
    const std::string csv = report_csv(report);
    EXPECT_NE(csv.find("img,afsmr,zoom15,"), std::string::npos);
    EXPECT_NE(csv.find(",14.5\n"), std::string::npos);
    EXPECT_EQ(format_speedup(report.speedup(report.records[0])), "");

    BenchmarkReport single;
    single.records.push_back({"img", "afsmr", "zoom15", 49.1, 0.9969, 38.3});
    const std::string one = report_csv(single);
    EXPECT_EQ(one.substr(one.size() - 2), ",\n");
}

TEST(Report, EmitWritesFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "fsmr_test_report";
    std::filesystem::create_directories(dir);
    BenchmarkReport report;
    report.metadata["crop"] = 24;
    report.records.push_back({"a", "fsmr", "zoom15", 40.0, 0.99, 10.0});
    report.records.push_back({"b", "fsmr", "zoom15", 42.0, 0.98, 30.0});
    report.records.push_back({"a", "bicubic", "zoom15", 38.0, 0.97, 0.5});
    report.records.push_back({"b", "bicubic", "zoom15", 36.0, 0.95, 0.5});
    emit_report(report, dir / "r");
    const auto json = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_EQ(json["metadata"]["crop"], 24);
    EXPECT_DOUBLE_EQ(json["methods"]["fsmr"]["sequences"]["zoom15"]["psnr_db"].get<double>(), 41.0);
    EXPECT_DOUBLE_EQ(json["methods"]["bicubic"]["speedup_vs_fsmr"].get<double>(), 40.0);
    EXPECT_TRUE(json["methods"]["fsmr"]["speedup_vs_fsmr"].is_null());
    const std::string csv = slurp(dir / "r.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_THROW(emit_report(report, dir / "missing" / "r"), IoError);
}
