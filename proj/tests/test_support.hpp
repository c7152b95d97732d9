#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "roadnet/pattern.hpp"
#include "roadnet/pattern_io.hpp"

namespace roadnet {

inline std::string fixture_path(const std::string& name) {
  return std::string(ROADNET_FIXTURE_DIR) + "/" + name + ".json";
}

inline TorusPattern fixture(const std::string& name) { return load_pattern(fixture_path(name)); }

// Closed star-shaped polyline loop strictly inside the cell. No junctions
// and no boundary contact, so the pattern is regular by construction; the
// corner turning angle stays below 60 degrees for the sizes drawn here.
inline TorusPattern random_loop(std::mt19937& rng, const std::string& name = "random_loop") {
  std::uniform_int_distribution<int> count(8, 14);
  std::uniform_real_distribution<double> base_radius(0.12, 0.30);
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  int n = count(rng);
  double base = base_radius(rng);
  PolylineSpec poly;
  for (int i = 0; i < n; ++i) {
    double theta = 2.0 * std::numbers::pi * i / n;
    double r = std::min(0.34, base * jitter(rng));
    poly.points.push_back({0.5 + r * std::cos(theta), 0.5 + r * std::sin(theta)});
  }
  poly.points.push_back(poly.points.front());
  return TorusPattern(name, {ArcSpec(poly)});
}

}  // namespace roadnet
