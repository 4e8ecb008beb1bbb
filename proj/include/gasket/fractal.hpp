#pragma once

#include "projective.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

namespace gasket {

namespace detail {

// Occupied cells of side h anchored at (ox, oy); cells are unbounded so shifted grids work.
inline std::uint64_t occupied(const PointCloud& c, double ox, double oy, double h) {
  std::vector<std::uint64_t> keys;
  keys.reserve(c.points.size());
  for (auto& p : c.points) {
    auto ix = (std::int64_t)std::floor((p[0] - ox) / h);
    auto iy = (std::int64_t)std::floor((p[1] - oy) / h);
    keys.push_back((std::uint64_t(ix + (1 << 30)) << 32) | std::uint64_t(iy + (1 << 30)));
  }
  std::sort(keys.begin(), keys.end());
  return std::uint64_t(std::unique(keys.begin(), keys.end()) - keys.begin());
}

inline double box_side(const PointCloud& c) {
  double w = std::max(c.hi[0] - c.lo[0], c.hi[1] - c.lo[1]);
  return w > 0 ? w : 1.0;
}

}  // namespace detail

// Cells of side 2^-j * bbox width anchored at bbox min; the far edge folds into the last cell.
inline std::uint64_t box_count(const PointCloud& c, int j) {
  if (c.points.empty()) throw std::invalid_argument("empty point cloud");
  if (j < 0 || j > 28) throw std::invalid_argument("scale index out of range");
  const double w = detail::box_side(c);
  const std::int64_t cells = std::int64_t(1) << j;
  std::vector<std::uint64_t> keys;
  keys.reserve(c.points.size());
  for (auto& p : c.points) {
    std::int64_t ix = std::min<std::int64_t>(cells - 1, (std::int64_t)std::floor((p[0] - c.lo[0]) / w * cells));
    std::int64_t iy = std::min<std::int64_t>(cells - 1, (std::int64_t)std::floor((p[1] - c.lo[1]) / w * cells));
    keys.push_back((std::uint64_t(ix) << 32) | std::uint64_t(iy));
  }
  std::sort(keys.begin(), keys.end());
  return std::uint64_t(std::unique(keys.begin(), keys.end()) - keys.begin());
}

struct BoxCountResult {
  std::vector<double> scales;  // eps = 2^-j relative to the padded box
  std::vector<std::uint64_t> counts;
  double slope{0};
  double r_squared{0};
  std::vector<double> jitter_slopes;
  double mean_slope{0};  // base grid and jittered anchors averaged
  bool undersampled{false};
};

namespace detail {
inline std::pair<double, double> ls_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("degenerate fit");
  double slope = sxy / sxx;
  double r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return {slope, r2};
}
}  // namespace detail

// Slope of log2 count against j over [jmin, jmax], grid padded by 1% around the bbox.
inline BoxCountResult box_dimension(const PointCloud& c, int jmin = 4, int jmax = 9) {
  if (c.points.empty()) throw std::invalid_argument("empty point cloud");
  if (jmin < 0 || jmax - jmin < 2 || jmax > 28) throw std::invalid_argument("need at least 3 scales");
  const double w0 = detail::box_side(c);
  const double pad = 0.01 * w0, w = w0 + 2 * pad;
  const double ox = c.lo[0] - pad, oy = c.lo[1] - pad;
  BoxCountResult r;
  std::vector<double> xs, ys;
  for (int j = jmin; j <= jmax; ++j) {
    double h = w / double(std::uint64_t(1) << j);
    auto n = detail::occupied(c, ox, oy, h);
    r.scales.push_back(std::ldexp(1.0, -j));
    r.counts.push_back(n);
    xs.push_back(j);
    ys.push_back(std::log2((double)n));
  }
  std::tie(r.slope, r.r_squared) = detail::ls_fit(xs, ys);
  r.undersampled = double(c.points.size()) < 4.0 * double(r.counts.back());

  // Fixed jitter offsets as fractions of the coarsest cell, for reproducible output.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double coarse = w / double(std::uint64_t(1) << jmin);
  double sum = r.slope;
  for (int t = 0; t < 4; ++t) {
    double dx = U(rng) * coarse, dy = U(rng) * coarse;
    std::vector<double> yj;
    for (int j = jmin; j <= jmax; ++j) {
      double h = w / double(std::uint64_t(1) << j);
      yj.push_back(std::log2((double)detail::occupied(c, ox - dx, oy - dy, h)));
    }
    double s = detail::ls_fit(xs, yj).first;
    r.jitter_slopes.push_back(s);
    sum += s;
  }
  r.mean_slope = sum / 5;
  return r;
}

enum class CloudFormat { CSV, SVG };

inline void emit(const PointCloud& c, CloudFormat f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[96];
  if (f == CloudFormat::CSV) {
    out << "x,y\n";
    for (auto& p : c.points) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
      out << buf;
    }
  } else {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    double w = detail::box_side(c);
    for (auto& p : c.points) {
      double x = (p[0] - c.lo[0]) / w * 1000, y = 1000 - (p[1] - c.lo[1]) / w * 1000;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"0.5\"/>\n", x, y);
      out << buf;
    }
    out << "</svg>\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline PointCloud read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  PointCloud c;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("x,y", 0) == 0) continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad CSV row: " + line);
    c.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  c.update_bbox();
  return c;
}

}  // namespace gasket
