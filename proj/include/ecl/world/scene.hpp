#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ecl/world/world.hpp"

namespace ecl {

struct ClassCount {
  ClassId class_id = -1;
  int min = 0;
  int max = 0;

  friend bool operator==(const ClassCount&, const ClassCount&) = default;
};

// Recipe for a family of scenes. Placement rules come from the catalog
// entries (against a wall, attached to an anchor class, anywhere).
struct SceneSpec {
  std::shared_ptr<const Catalog> catalog;
  int width = 12;
  int height = 12;
  double wall_density = 0.0;  // fraction of interior cells turned into wall segments
  int min_gap = 1;            // free cells required between unattached footprints
  int max_retries = 200;      // placement attempts per instance
  double interaction_range = 1.5;
  std::vector<ClassCount> counts;

  std::string serialize() const;
  static SceneSpec parse(std::string_view text);

  friend bool operator==(const SceneSpec& a, const SceneSpec& b);
};

// Deterministic in (spec, seed). Throws PlacementError naming the class when
// an instance cannot be placed within max_retries attempts.
GridWorld generate_scene(const SceneSpec& spec, uint64_t seed);

// True when every free cell is 4-connected to every other free cell.
bool free_space_connected(const GridWorld& world);

// Structured-text world format (versioned header, catalog section, terrain,
// object table, agent pose). serialize(parse(s)) == s byte for byte.
std::string serialize_world(const GridWorld& world);
GridWorld parse_world(std::string_view text);

}  // namespace ecl
