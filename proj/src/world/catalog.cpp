#include "ecl/world/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"

namespace ecl {

namespace {

constexpr std::string_view kHeader = "# ecl-catalog v1";

const char* effect_name(ApplianceEffect e) {
  switch (e) {
    case ApplianceEffect::Clean: return "clean";
    case ApplianceEffect::Heat: return "heat";
    case ApplianceEffect::Cool: return "cool";
    case ApplianceEffect::Light: return "light";
    case ApplianceEffect::None: break;
  }
  return "none";
}

ApplianceEffect parse_effect(const std::string& s) {
  if (s == "clean") return ApplianceEffect::Clean;
  if (s == "heat") return ApplianceEffect::Heat;
  if (s == "cool") return ApplianceEffect::Cool;
  if (s == "light") return ApplianceEffect::Light;
  if (s == "none") return ApplianceEffect::None;
  throw FormatError("unknown appliance effect '" + s + "'");
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Catalog::Catalog(std::vector<ClassInfo> classes) : classes_(std::move(classes)) {
  std::set<std::string> names;
  std::set<char> glyphs;
  for (size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.name.empty()) throw ConfigError("catalog class with empty name");
    if (!names.insert(to_lower(c.name)).second)
      throw ConfigError("duplicate catalog class '" + c.name + "'");
    if (!glyphs.insert(c.glyph).second)
      throw ConfigError("duplicate glyph for catalog class '" + c.name + "'");
    if (c.size_x < 1 || c.size_y < 1) throw ConfigError("bad footprint size for '" + c.name + "'");
    if (c.background) {
      if (background_ >= 0) throw ConfigError("catalog declares two background classes");
      background_ = static_cast<ClassId>(i);
    }
  }
  if (background_ < 0) throw ConfigError("catalog has no background class");
  for (const auto& c : classes_) {
    if (!c.activates.empty() && !find(c.activates))
      throw ConfigError("'" + c.name + "' activates unknown class '" + c.activates + "'");
    if (c.placement == PlacementRule::Attached && !find(c.attach_to))
      throw ConfigError("'" + c.name + "' attaches to unknown class '" + c.attach_to + "'");
  }
}

std::optional<ClassId> Catalog::find(std::string_view name) const {
  const auto key = to_lower(name);
  for (size_t i = 0; i < classes_.size(); ++i)
    if (to_lower(classes_[i].name) == key) return static_cast<ClassId>(i);
  return std::nullopt;
}

ClassId Catalog::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw UnknownConceptError(std::string(name));
  return *id;
}

std::vector<ClassId> Catalog::object_classes() const {
  std::vector<ClassId> out;
  for (ClassId i = 0; i < size(); ++i)
    if (i != background_) out.push_back(i);
  return out;
}

// Line format:
//   class <Name> glyph=<c> [group=<g>] [flags...] [effect=<e>] [activates=<C>]
//         [place=any|wall|attach:<C>] [size=<w>x<h>]
Catalog Catalog::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<ClassInfo> classes;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!header_seen) {
      if (line != kHeader) throw FormatError("catalog: missing '" + std::string(kHeader) + "' header");
      header_seen = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw != "class") throw FormatError("catalog: unexpected line '" + line + "'");
    ClassInfo c;
    ls >> c.name;
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      const std::string key = tok.substr(0, eq);
      const std::string val = eq == std::string::npos ? "" : tok.substr(eq + 1);
      if (key == "glyph") {
        if (val.size() != 1) throw FormatError("catalog: glyph must be one character");
        c.glyph = val[0];
      } else if (key == "group") {
        c.group = val;
      } else if (key == "background") {
        c.background = true;
      } else if (key == "pickupable") {
        c.pickupable = true;
      } else if (key == "receptacle") {
        c.receptacle = true;
      } else if (key == "cutter") {
        c.cutter = true;
      } else if (key == "sliceable") {
        c.sliceable = true;
      } else if (key == "openable") {
        c.openable = true;
      } else if (key == "toggleable") {
        c.toggleable = true;
      } else if (key == "effect") {
        c.effect = parse_effect(val);
      } else if (key == "activates") {
        c.activates = val;
      } else if (key == "place") {
        if (val == "any") {
          c.placement = PlacementRule::Anywhere;
        } else if (val == "wall") {
          c.placement = PlacementRule::AgainstWall;
        } else if (val.rfind("attach:", 0) == 0) {
          c.placement = PlacementRule::Attached;
          c.attach_to = val.substr(7);
        } else {
          throw FormatError("catalog: bad placement '" + val + "'");
        }
      } else if (key == "size") {
        auto x = val.find('x');
        if (x == std::string::npos) throw FormatError("catalog: bad size '" + val + "'");
        c.size_x = std::stoi(val.substr(0, x));
        c.size_y = std::stoi(val.substr(x + 1));
      } else {
        throw FormatError("catalog: unknown attribute '" + key + "'");
      }
    }
    classes.push_back(std::move(c));
  }
  if (!header_seen) throw FormatError("catalog: empty input");
  return Catalog(std::move(classes));
}

Catalog Catalog::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string Catalog::serialize() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& c : classes_) {
    out << "class " << c.name << " glyph=" << c.glyph;
    if (!c.group.empty()) out << " group=" << c.group;
    if (c.background) out << " background";
    if (c.pickupable) out << " pickupable";
    if (c.receptacle) out << " receptacle";
    if (c.cutter) out << " cutter";
    if (c.sliceable) out << " sliceable";
    if (c.openable) out << " openable";
    if (c.toggleable) out << " toggleable";
    if (c.effect != ApplianceEffect::None) out << " effect=" << effect_name(c.effect);
    if (!c.activates.empty()) out << " activates=" << c.activates;
    switch (c.placement) {
      case PlacementRule::AgainstWall: out << " place=wall"; break;
      case PlacementRule::Attached: out << " place=attach:" << c.attach_to; break;
      case PlacementRule::Anywhere: break;
    }
    if (c.size_x != 1 || c.size_y != 1) out << " size=" << c.size_x << 'x' << c.size_y;
    out << '\n';
  }
  return out.str();
}

}  // namespace ecl
