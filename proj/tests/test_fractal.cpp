#include <catch_amalgamated.hpp>

#include <gasket/gasket.hpp>

#include <filesystem>
#include <random>
#include <sstream>

using namespace gasket;
using Catch::Matchers::WithinAbs;

namespace {

PointCloud cloud_of(std::vector<std::array<double, 2>> pts) {
  PointCloud c;
  c.points = std::move(pts);
  c.update_bbox();
  return c;
}

// Centroids of the level-k subtriangles of the standard gasket, plus the three corners.
PointCloud sierpinski_centroids(int k) {
  auto e = catalog::get("sierpinski", {{"alpha", "2"}});
  auto c = orbit_cloud(e.spec, *e.chart, *e.seed, k);
  for (auto q : {std::array<double, 2>{0, 0}, {1, 0}, {0, 1}}) c.points.push_back(q);
  c.update_bbox();
  return c;
}

std::string tmp_path(const std::string& leaf) {
  return (std::filesystem::temp_directory_path() / ("gasket_test_" + leaf)).string();
}

}  // namespace

TEST_CASE("box_count examples", "[fractal]") {
  auto one = cloud_of({{0.3, 0.7}});
  for (int j : {0, 3, 12}) CHECK(box_count(one, j) == 1);

  const int J = 6;
  std::vector<std::array<double, 2>> grid;
  for (int a = 0; a <= (1 << J); ++a)
    for (int b = 0; b <= (1 << J); ++b) grid.push_back({std::ldexp(a, -J), std::ldexp(b, -J)});
  auto g = cloud_of(grid);
  for (int j = 0; j <= J; ++j) CHECK(box_count(g, j) == (std::uint64_t(1) << (2 * j)));

  auto s = sierpinski_centroids(7);
  std::uint64_t p3 = 1;
  for (int j = 0; j <= 7; ++j, p3 *= 3) {
    INFO("j=" << j);
    CHECK(box_count(s, j) == p3);
  }

  CHECK_THROWS_AS(box_count(PointCloud{}, 2), std::invalid_argument);
  CHECK_THROWS_AS(box_count(one, -1), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(one, 4, 5), std::invalid_argument);
}

TEST_CASE("box counts refine monotonically", "[fractal]") {
  for (auto name : {"C3", "apollonian", "affine"}) {
    auto e = catalog::get(name, std::string(name) == "affine" ? catalog::Params{{"a", "1/4"}, {"b", "1/2"}} : catalog::Params{});
    auto c = orbit_cloud(e.spec, *e.chart, *e.seed, 8);
    for (int j = 0; j < 12; ++j) {
      auto a = box_count(c, j), b = box_count(c, j + 1);
      INFO(name << " j=" << j);
      REQUIRE(a <= b);
      REQUIRE(b <= 4 * a);
    }
  }
}

TEST_CASE("standard gasket box dimension", "[fractal]") {
  auto e = catalog::get("sierpinski", {{"alpha", "2"}});
  auto r = box_dimension(orbit_cloud(e.spec, *e.chart, *e.seed, 11));
  CHECK_THAT(r.slope, WithinAbs(std::log2(3.0), 0.06));
  CHECK_THAT(r.mean_slope, WithinAbs(std::log2(3.0), 0.06));
  CHECK(r.jitter_slopes.size() == 4);
  CHECK(r.r_squared > 0.99);
  CHECK_FALSE(r.undersampled);
}

TEST_CASE("box dimension ignores translation and sees filled squares", "[fractal]") {
  auto e = catalog::get("sierpinski", {{"alpha", "2"}});
  auto c = orbit_cloud(e.spec, *e.chart, *e.seed, 10);
  auto moved = c;
  for (auto& p : moved.points) {
    p[0] += 0.123;
    p[1] -= 0.456;
  }
  moved.update_bbox();
  CHECK(std::fabs(box_dimension(c).slope - box_dimension(moved).slope) < 0.02);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<std::array<double, 2>> pts(1000000);
  for (auto& p : pts) p = {U(rng), U(rng)};
  CHECK_THAT(box_dimension(cloud_of(pts), 4, 8).slope, WithinAbs(2.0, 0.05));
}

TEST_CASE("CSV and SVG output", "[fractal]") {
  auto e = catalog::get("C3");
  auto c = orbit_cloud(e.spec, *e.chart, *e.seed, 5);
  auto path = tmp_path("cloud.csv");
  emit(c, CloudFormat::CSV, path);
  auto back = read_csv(path);
  CHECK(back.points == c.points);
  CHECK(back.lo == c.lo);
  CHECK(back.hi == c.hi);

  emit(PointCloud{}, CloudFormat::CSV, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x,y\n");
  CHECK(read_csv(path).points.empty());

  auto svg = tmp_path("cloud.svg");
  emit(c, CloudFormat::SVG, svg);
  std::ifstream sin(svg);
  std::string line;
  std::size_t circles = 0;
  while (std::getline(sin, line))
    if (line.rfind("<circle", 0) == 0) ++circles;
  CHECK(circles == c.points.size());

  std::filesystem::remove(path);
  std::filesystem::remove(svg);
  CHECK_THROWS_AS(read_csv(tmp_path("missing.csv")), std::runtime_error);
}
