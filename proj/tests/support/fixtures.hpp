#pragma once

// Shared catalog/grammar and a small world builder for unit tests.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ecl/instruct/grammar.hpp"
#include "ecl/world/catalog.hpp"
#include "ecl/world/world.hpp"

namespace ecl::fixture {

inline std::filesystem::path data_dir() { return ECL_DATA_DIR; }

inline std::shared_ptr<const Catalog> catalog() {
  static const auto c = std::make_shared<const Catalog>(Catalog::load(data_dir() / "catalog.txt"));
  return c;
}

inline const Grammar& grammar() {
  static const Grammar g = Grammar::load(data_dir() / "grammar.txt");
  return g;
}

inline ClassId cls(std::string_view name) { return catalog()->require(name); }

// Rows of '#' (wall) and '.' (free); objects are added afterwards.
inline GridWorld layout(const std::vector<std::string>& rows, AgentPose agent, uint64_t seed = 1) {
  GridWorld w(catalog(), static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), seed);
  for (int y = 0; y < w.height(); ++y)
    for (int x = 0; x < w.width(); ++x)
      if (rows[static_cast<size_t>(y)][static_cast<size_t>(x)] == '#') w.set_wall({x, y});
  w.set_agent(agent);
  return w;
}

// Walled rectangle with a free interior.
inline GridWorld room(int width, int height, AgentPose agent, uint64_t seed = 1) {
  std::vector<std::string> rows;
  for (int y = 0; y < height; ++y) {
    std::string r(static_cast<size_t>(width), '.');
    if (y == 0 || y == height - 1) r.assign(static_cast<size_t>(width), '#');
    r.front() = r.back() = '#';
    rows.push_back(r);
  }
  return layout(rows, agent, seed);
}

}  // namespace ecl::fixture
