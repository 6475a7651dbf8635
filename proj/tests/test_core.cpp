#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "fsmr/blocks.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/image.hpp"
#include "fsmr/io.hpp"

using namespace fsmr;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "fsmr_test_core";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Image, RejectsEmptyDimensions) {
    EXPECT_THROW(Image(0, 4), InvalidArgument);
    EXPECT_THROW(Image(4, -1), InvalidArgument);
}

TEST(Image, ExportClampsAndRoundsHalfAwayFromZero) {
    Image img(5, 1);
    img.at(0, 0) = -3.0;
    img.at(1, 0) = 300.0;
    img.at(2, 0) = 2.5;
    img.at(3, 0) = 2.4999;
    img.at(4, 0) = 254.5;
    const auto bytes = img.to_bytes();
    EXPECT_EQ(bytes[0], 0);
    EXPECT_EQ(bytes[1], 255);
    EXPECT_EQ(bytes[2], 3);
    EXPECT_EQ(bytes[3], 2);
    EXPECT_EQ(bytes[4], 255);
}

TEST(Partition, FullResolution) {
    const auto blocks = partition_blocks(1200, 1200, 8, 8);
    ASSERT_EQ(blocks.size(), 22500u);
    const BlockContext& interior = blocks[151];
    EXPECT_EQ(interior.area_width, 24);
    EXPECT_EQ(interior.area_height, 24);
    EXPECT_EQ(interior.area_origin, (PixelOrigin{0, 0}));
    EXPECT_EQ(blocks[152].area_origin, (PixelOrigin{8, 0}));
}

TEST(Partition, SingleClippedBlock) {
    const auto blocks = partition_blocks(8, 8, 8, 8);
    ASSERT_EQ(blocks.size(), 1u);
    EXPECT_EQ(blocks[0].area_origin, (PixelOrigin{0, 0}));
    EXPECT_EQ(blocks[0].area_width, 8);
    EXPECT_EQ(blocks[0].area_height, 8);
}

TEST(Partition, ZeroSupport) {
    const auto blocks = partition_blocks(16, 8, 8, 0);
    ASSERT_EQ(blocks.size(), 2u);
    for (const auto& b : blocks) {
        EXPECT_EQ(b.area_origin, b.block_origin);
        EXPECT_EQ(b.area_width, 8);
        EXPECT_EQ(b.area_height, 8);
    }
}

TEST(Partition, InvalidArguments) {
    EXPECT_THROW(partition_blocks(0, 8, 8, 8), InvalidArgument);
    EXPECT_THROW(partition_blocks(8, 8, 0, 8), InvalidArgument);
    EXPECT_THROW(partition_blocks(8, 8, 8, -1), InvalidArgument);
}

TEST(Partition, CoverageIsDisjointAndComplete) {
    for (auto [w, h] : {std::pair{37, 21}, std::pair{64, 64}, std::pair{9, 30}}) {
        const auto blocks = partition_blocks(w, h, 8, 8);
        std::vector<int> hits(static_cast<std::size_t>(w * h), 0);
        for (const auto& b : blocks) {
            EXPECT_LE(b.area_width, 24);
            EXPECT_LE(b.area_height, 24);
            EXPECT_LE(b.area_origin.x, b.block_origin.x);
            EXPECT_LE(b.area_origin.y, b.block_origin.y);
            EXPECT_GE(b.area_origin.x + b.area_width, b.block_origin.x + b.block_width);
            EXPECT_GE(b.area_origin.y + b.area_height, b.block_origin.y + b.block_height);
            for (int n = 0; n < b.block_height; ++n) {
                for (int m = 0; m < b.block_width; ++m) {
                    ++hits[static_cast<std::size_t>((b.block_origin.y + n) * w + b.block_origin.x + m)];
                }
            }
        }
        for (int c : hits) {
            EXPECT_EQ(c, 1);
        }
    }
}

TEST(Gather, RebasesAndExcludes) {
    MeshSampleSet mesh{{{{10.3, 2.1}, 5.0}, {{-0.5, 3.0}, 7.0}}, 48, 24};
    BlockContext ctx;
    ctx.area_origin = {8, 0};
    ctx.area_width = 24;
    ctx.area_height = 24;
    const auto local = gather_local_samples(mesh, ctx);
    ASSERT_EQ(local.local_mesh.size(), 1u);
    EXPECT_NEAR(local.local_mesh[0].position.x, 2.3, 1e-12);
    EXPECT_DOUBLE_EQ(local.local_mesh[0].position.y, 2.1);

    BlockContext origin_area;
    origin_area.area_width = 24;
    origin_area.area_height = 24;
    EXPECT_TRUE(gather_local_samples(mesh, origin_area).local_mesh.size() == 1u);
}

TEST(Gather, HalfOpenMembership) {
    MeshSampleSet mesh{{{{24.0, 0.0}, 1.0}, {{23.999, 0.0}, 2.0}, {{0.0, 0.0}, 3.0}}, 48, 24};
    BlockContext ctx;
    ctx.area_width = 24;
    ctx.area_height = 24;
    const auto local = gather_local_samples(mesh, ctx);
    ASSERT_EQ(local.local_mesh.size(), 2u);
    EXPECT_EQ(local.local_mesh[0].value, 2.0);
    EXPECT_EQ(local.local_mesh[1].value, 3.0);
}

TEST(Gather, ScatteredPointsInOneArea) {
    // 21 of the 25 positions of a 5x5 grid, jittered off the integer lattice.
    MeshSampleSet mesh;
    mesh.width = 5;
    mesh.height = 5;
    int skipped = 0;
    for (int n = 0; n < 5; ++n) {
        for (int m = 0; m < 5; ++m) {
            if ((n * 5 + m) % 6 == 1 && skipped < 4) {
                ++skipped;
                continue;
            }
            mesh.samples.push_back({{m + 0.3 * std::sin(m + n), n + 0.2 * std::cos(m * n + 1.0) + 0.21}, 1.0});
        }
    }
    ASSERT_EQ(mesh.samples.size(), 21u);
    for (auto& s : mesh.samples) {
        s.position.x = std::clamp(s.position.x, 0.0, 4.9);
        s.position.y = std::clamp(s.position.y, 0.0, 4.9);
    }
    auto blocks = partition_blocks(5, 5, 8, 8);
    gather_all_local_samples(mesh, blocks);
    EXPECT_EQ(blocks[0].local_mesh.size(), 21u);
}

TEST(Gather, BulkMatchesPerAreaAndRoundTripsExactly) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 43.0);
    std::uniform_real_distribution<double> uy(-3.0, 29.0);
    MeshSampleSet mesh;
    mesh.width = 40;
    mesh.height = 26;
    for (int i = 0; i < 700; ++i) {
        mesh.samples.push_back({{ux(rng), uy(rng)}, static_cast<double>(i)});
    }
    auto blocks = partition_blocks(40, 26, 8, 8);
    gather_all_local_samples(mesh, blocks);
    for (const auto& b : blocks) {
        const auto single = gather_local_samples(mesh, b);
        std::multiset<double> a;
        std::multiset<double> c;
        for (const auto& s : b.local_mesh) {
            a.insert(s.value);
            const auto& g = mesh.samples[static_cast<std::size_t>(s.value)];
            EXPECT_EQ(s.position.x + b.area_origin.x, g.position.x);
            EXPECT_EQ(s.position.y + b.area_origin.y, g.position.y);
            EXPECT_GE(s.position.x, 0.0);
            EXPECT_LT(s.position.x, b.area_width);
        }
        for (const auto& s : single.local_mesh) {
            c.insert(s.value);
        }
        EXPECT_EQ(a, c);
    }
}

TEST(NearestSample, FindsClosest) {
    MeshSampleSet mesh{{{{1.0, 1.0}, 10.0}, {{30.0, 5.0}, 20.0}, {{15.0, 20.0}, 30.0}}, 32, 32};
    const NearestSampleIndex index(mesh);
    EXPECT_EQ(index.nearest_value({0.0, 0.0}), 10.0);
    EXPECT_EQ(index.nearest_value({31.0, 0.0}), 20.0);
    EXPECT_EQ(index.nearest_value({14.0, 31.0}), 30.0);
}

TEST(Affine, ApplyExamples) {
    const auto zoom = AffineTransform::linear(1.15, 0.0, 0.0, 1.15);
    const Point2 z = apply_affine(zoom, {1.0, 1.0});
    EXPECT_DOUBLE_EQ(z.x, 1.15);
    EXPECT_DOUBLE_EQ(z.y, 1.15);
    const Point2 t = apply_affine(AffineTransform::translate(3.0, -2.0), {0.0, 0.0});
    EXPECT_EQ(t, (Point2{3.0, -2.0}));
    const Point2 s = apply_affine(AffineTransform::linear(1.2, 0.1954, 0.0, 1.0), {0.0, 1.0});
    EXPECT_DOUBLE_EQ(s.x, 0.1954);
    EXPECT_DOUBLE_EQ(s.y, 1.0);
}

TEST(Affine, InverseExamples) {
    AffineTransform zoom = AffineTransform::linear(1.15, 0.0, 0.0, 1.15);
    zoom.translation = {2.0, -4.0};
    const auto inv = invert_affine(zoom);
    EXPECT_NEAR(inv.matrix[0][0], 1.0 / 1.15, 1e-15);
    EXPECT_NEAR(inv.translation.x, -2.0 / 1.15, 1e-12);
    EXPECT_NEAR(inv.translation.y, 4.0 / 1.15, 1e-12);

    const auto id = invert_affine(AffineTransform::identity());
    EXPECT_EQ(id.matrix, AffineTransform::identity().matrix);

    const auto r = invert_affine(AffineTransform::rotation_degrees(15.0));
    const auto expect = AffineTransform::rotation_degrees(-15.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(r.matrix[i][j], expect.matrix[i][j], 1e-15);
        }
    }
    EXPECT_THROW(invert_affine(AffineTransform::linear(1.0, 2.0, 2.0, 4.0)), SingularTransform);
}

TEST(Affine, RoundTripRandom) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> p(-600.0, 600.0);
    for (int trial = 0; trial < 200; ++trial) {
        AffineTransform a = AffineTransform::linear(u(rng), u(rng), u(rng), u(rng));
        a.translation = {p(rng), p(rng)};
        if (std::abs(a.determinant()) < 0.05) {
            continue;
        }
        const auto inv = invert_affine(a);
        for (int i = 0; i < 5; ++i) {
            const Point2 x{p(rng), p(rng)};
            const Point2 y = apply_affine(inv, apply_affine(a, x));
            EXPECT_NEAR(y.x, x.x, 1e-9);
            EXPECT_NEAR(y.y, x.y, 1e-9);
        }
    }
}

TEST(Affine, AboutPointKeepsCenterFixed) {
    const auto a = about_point(AffineTransform::rotation_degrees(30.0), {49.5, 20.0});
    const Point2 c = apply_affine(a, {49.5, 20.0});
    EXPECT_NEAR(c.x, 49.5, 1e-12);
    EXPECT_NEAR(c.y, 20.0, 1e-12);
}

TEST(Io, PgmRoundTrip) {
    Image img(7, 3);
    for (int n = 0; n < 3; ++n) {
        for (int m = 0; m < 7; ++m) {
            img.at(m, n) = (m * 37 + n * 11) % 256;
        }
    }
    const auto path = temp_dir() / "roundtrip.pgm";
    io::write_image(img, path);
    EXPECT_EQ(io::read_image(path), img);
}

TEST(Io, PngRoundTrip) {
    Image img(9, 4);
    for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 9; ++m) {
            img.at(m, n) = (m * 29 + n * 53) % 256;
        }
    }
    const auto path = temp_dir() / "roundtrip.png";
    io::write_image(img, path);
    EXPECT_EQ(io::read_image(path), img);
}

TEST(Io, MeshCsvRoundTrip) {
    MeshSampleSet mesh{{{{0.125, 3.5}, 12.0}, {{7.75, 0.0}, 200.5}}, 8, 4};
    const auto path = temp_dir() / "mesh.csv";
    io::write_mesh_csv(mesh, path);
    const auto back = io::read_mesh_csv(path, 8, 4);
    ASSERT_EQ(back.samples.size(), 2u);
    EXPECT_EQ(back.samples[1].position, (Point2{7.75, 0.0}));
    EXPECT_EQ(back.samples[1].value, 200.5);
}

TEST(Io, Errors) {
    EXPECT_THROW(io::read_image(temp_dir() / "missing.pgm"), IoError);
    const auto bad = temp_dir() / "bad.csv";
    {
        std::ofstream f(bad);
        f << "a,b,c\n1,2,3\n";
    }
    EXPECT_THROW(io::read_mesh_csv(bad, 4, 4), IoError);
}
