#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "shapeopt/io.hpp"

using namespace shapeopt;
namespace fs = std::filesystem;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

fs::path scratch_dir() {
    const fs::path p = fs::temp_directory_path() / "shapeopt_io_test";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("doubles survive a format/parse round trip bit for bit") {
    const double values[] = {0.0,
                             -0.0,
                             1.0,
                             -1.0,
                             0.1,
                             1.0 / 3.0,
                             2.5,
                             -2.5e-7,
                             123456.789,
                             1e-300,
                             5e-324,
                             std::numeric_limits<double>::max()};
    for (double v : values) {
        CAPTURE(v);
        CHECK(bits(parse_double(format_double(v))) == bits(v));
    }

    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("parse_double rejects junk and partial parses") {
    CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1.2.3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1e"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(" 1"), std::invalid_argument);
}

TEST_CASE("a positive field has no zero contour") {
    const Mesh mesh = build_structured_mesh(9);
    const NodalVector g(mesh.n_vertices(), 1.0);
    CHECK(extract_zero_contour(mesh, g).empty());
    CHECK_THROWS_AS(extract_zero_contour(mesh, NodalVector(3, 1.0)), std::invalid_argument);
}

TEST_CASE("the contour of g = x is a single chain down the middle") {
    const Mesh mesh = build_structured_mesh(33);
    NodalVector g(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) g[v] = mesh.vertices[v].x;
    const auto polys = extract_zero_contour(mesh, g);
    REQUIRE(polys.size() == 1);
    const auto& pts = polys[0].points;
    CHECK(pts.size() == 65);  // 33 horizontal + 32 diagonal crossings
    double ymin = 1e300, ymax = -1e300;
    for (const auto& p : pts) {
        CHECK(std::abs(p.x) <= 1e-12);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    CHECK(ymin == -1.0);
    CHECK(ymax == 1.0);
    const double ya = pts.front().y, yb = pts.back().y;
    CHECK(std::min(ya, yb) == -1.0);
    CHECK(std::max(ya, yb) == 1.0);
}

TEST_CASE("the contour of a disk level set closes with perimeter near the truth") {
    const Mesh mesh = build_structured_mesh(65);
    NodalVector g(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec2 p = mesh.vertices[v];
        g[v] = 0.25 - p.x * p.x - p.y * p.y;
    }
    const auto polys = extract_zero_contour(mesh, g);
    REQUIRE(polys.size() == 1);
    const auto& pts = polys[0].points;
    REQUIRE(pts.size() > 20);
    CHECK(pts.front().x == pts.back().x);
    CHECK(pts.front().y == pts.back().y);
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i)
        len += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    const double h = 2.0 / 64.0;
    CHECK(std::abs(len - std::numbers::pi) <= 4.0 * h);
    for (const auto& p : pts) {
        const double r = std::hypot(p.x, p.y);
        CHECK(std::abs(r - 0.5) <= h);
    }
}

TEST_CASE("history files round-trip every column") {
    RunHistory h;
    h.records.push_back({0, 0.476625868, 0.0, 0.0, 0.0, 0.25});
    h.records.push_back({1, 1.0 / 3.0, 1.5, 1e-3, 0.123456789012345, 1.75});
    h.records.push_back({3, 1e-300, 10.0, 5e-324, 0.0, 100.5});  // gap after a stall
    h.termination = "cost_change+g_change";

    const fs::path path = scratch_dir() / "history.csv";
    write_history(h, path.string());
    const RunHistory back = parse_history(path.string());
    REQUIRE(back.records.size() == h.records.size());
    for (size_t i = 0; i < h.records.size(); ++i) {
        CHECK(back.records[i].iter == h.records[i].iter);
        CHECK(bits(back.records[i].cost) == bits(h.records[i].cost));
        CHECK(bits(back.records[i].step) == bits(h.records[i].step));
        CHECK(bits(back.records[i].dcost) == bits(h.records[i].dcost));
        CHECK(bits(back.records[i].dg) == bits(h.records[i].dg));
        CHECK(bits(back.records[i].seconds) == bits(h.records[i].seconds));
    }
    CHECK(back.termination == h.termination);

    RunHistory empty;
    empty.termination = "max_iters";
    const fs::path p2 = scratch_dir() / "empty.csv";
    write_history(empty, p2.string());
    const RunHistory eb = parse_history(p2.string());
    CHECK(eb.records.empty());
    CHECK(eb.termination == "max_iters");

    const fs::path bad = scratch_dir() / "bad.csv";
    std::ofstream(bad.string()) << "not,a,history\n";
    CHECK_THROWS_AS(parse_history(bad.string()), std::runtime_error);
    CHECK_THROWS_AS(parse_history((scratch_dir() / "absent.csv").string()),
                    std::runtime_error);
}

TEST_CASE("snapshot files are named by iteration and read back exactly") {
    CHECK(snapshot_name(16) == "shape_0016.csv");
    CHECK(snapshot_name(0) == "shape_0000.csv");
    CHECK(contour_name(3) == "contour_0003.txt");

    const Mesh mesh = build_structured_mesh(2);
    const NodalVector g{0.1, -0.2, 1.0 / 3.0, 1e-300};
    const fs::path dir = scratch_dir();
    write_field_snapshot(mesh, g, 7, dir.string());

    std::vector<Vec2> coords;
    const NodalVector back = read_field_csv((dir / "shape_0007.csv").string(), &coords);
    REQUIRE(back.size() == g.size());
    for (size_t v = 0; v < g.size(); ++v) CHECK(bits(back[v]) == bits(g[v]));
    REQUIRE(coords.size() == 4);
    CHECK(coords[0].x == -1.0);
    CHECK(coords[0].y == -1.0);
    CHECK(coords[3].x == 1.0);
    CHECK(coords[3].y == 1.0);

    // g changes sign, so this snapshot's contour is nonempty
    std::ifstream cf((dir / "contour_0007.txt").string());
    REQUIRE(cf.good());
    std::string word;
    cf >> word;
    CHECK(word == "polyline");

    // an all-positive field writes an empty contour file
    write_field_snapshot(mesh, NodalVector(4, 1.0), 8, dir.string());
    std::ifstream empty((dir / "contour_0008.txt").string());
    REQUIRE(empty.good());
    const bool has_content = static_cast<bool>(empty >> word);
    CHECK_FALSE(has_content);
}

TEST_CASE("writers report the offending path") {
    const Mesh mesh = build_structured_mesh(2);
    const NodalVector g(4, 1.0);
    const std::string bad = "/nonexistent_dir_zz/f.csv";
    CHECK_THROWS_AS(write_field_csv(mesh, g, bad), std::runtime_error);
    try {
        write_field_csv(mesh, g, bad);
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(bad) != std::string::npos);
    }
    CHECK_THROWS_AS(write_field_csv(mesh, NodalVector(2, 1.0), "x.csv"),
                    std::invalid_argument);
}
