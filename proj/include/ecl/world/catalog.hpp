#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecl {

using ClassId = int;

enum class ApplianceEffect { None, Clean, Heat, Cool, Light };

// Where the scene generator may put instances of a class.
enum class PlacementRule { Anywhere, AgainstWall, Attached };

struct ClassInfo {
  std::string name;
  char glyph = '?';
  std::string group;  // semantic group, e.g. "produce"; empty = singleton
  bool background = false;
  bool pickupable = false;
  bool receptacle = false;
  bool cutter = false;
  bool sliceable = false;
  bool openable = false;
  bool toggleable = false;
  ApplianceEffect effect = ApplianceEffect::None;
  std::string activates;  // receptacle class whose contents the effect applies to
  PlacementRule placement = PlacementRule::Anywhere;
  std::string attach_to;  // anchor class for PlacementRule::Attached
  int size_x = 1;
  int size_y = 1;

  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

// Ordered list of object classes. Exactly one entry is the reserved
// background class for unlabeled surface.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<ClassInfo> classes);

  static Catalog parse(std::string_view text);
  static Catalog load(const std::filesystem::path& path);
  std::string serialize() const;

  int size() const { return static_cast<int>(classes_.size()); }
  const ClassInfo& operator[](ClassId id) const { return classes_.at(static_cast<size_t>(id)); }
  const std::vector<ClassInfo>& classes() const { return classes_; }

  ClassId background() const { return background_; }
  bool valid(ClassId id) const { return id >= 0 && id < size(); }

  // Case-insensitive lookup by name.
  std::optional<ClassId> find(std::string_view name) const;
  ClassId require(std::string_view name) const;

  // Every non-background class id, ascending.
  std::vector<ClassId> object_classes() const;

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  std::vector<ClassInfo> classes_;
  ClassId background_ = -1;
};

std::string to_lower(std::string_view s);

}  // namespace ecl
