#include "ecl/world/scene.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"
#include "ecl/common/rng.hpp"

namespace ecl {

namespace {

constexpr std::string_view kSpecHeader = "# ecl-scenespec v1";
constexpr std::string_view kWorldHeader = "# ecl-world v1";

std::string catalog_body(const Catalog& catalog) {
  std::string text = catalog.serialize();
  return text.substr(text.find('\n') + 1);
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError(std::string("unexpected end of input, expected ") + what);
    return line;
  }

  // Reads "<keyword> rest..." and returns the rest as a stream.
  std::istringstream expect(const std::string& keyword) {
    std::string line = next(keyword.c_str());
    if (line.rfind(keyword, 0) != 0 ||
        (line.size() > keyword.size() && line[keyword.size()] != ' '))
      throw FormatError("expected '" + keyword + "', got '" + line + "'");
    return std::istringstream(line.size() > keyword.size() ? line.substr(keyword.size() + 1) : "");
  }

  std::shared_ptr<const Catalog> catalog() {
    int n = 0;
    expect("catalog") >> n;
    std::string text = "# ecl-catalog v1\n";
    for (int i = 0; i < n; ++i) text += next("catalog class") + "\n";
    return std::make_shared<const Catalog>(Catalog::parse(text));
  }

  bool done() {
    std::string rest;
    while (std::getline(in_, rest))
      if (!rest.empty()) return false;
    return true;
  }

 private:
  std::istringstream in_;
};

double parse_double(const std::string& s) {
  size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

// ----- scene generation -------------------------------------------------

struct Placer {
  const SceneSpec& spec;
  GridWorld& world;
  Rng& rng;

  int rand_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  bool interior(Cell c) const {
    return c.x >= 1 && c.y >= 1 && c.x < world.width() - 1 && c.y < world.height() - 1;
  }

  bool touches_wall(const std::vector<Cell>& fp) const {
    for (Cell c : fp)
      for (Cell d : kNeighbors4)
        if (world.terrain()[Cell{c.x + d.x, c.y + d.y}] == Terrain::Wall) return true;
    return false;
  }

  // Every object keeps an 8-adjacent free cell inside the one free region.
  bool accessible_layout() const {
    if (!free_space_connected(world)) return false;
    for (const auto& o : world.objects()) {
      bool ok = false;
      for (Cell c : o.footprint)
        for (Cell d : kNeighbors8) {
          Cell n{c.x + d.x, c.y + d.y};
          if (world.in_bounds(n) && !world.blocked(n)) ok = true;
        }
      if (!ok) return false;
    }
    return true;
  }

  bool gap_ok(const std::vector<Cell>& fp, int anchor_id) const {
    for (const auto& o : world.objects()) {
      const int gap = o.id == anchor_id ? 0 : spec.min_gap;
      for (Cell a : o.footprint)
        for (Cell b : fp)
          if (chebyshev(a, b) <= gap) return false;
    }
    return true;
  }

  std::vector<Cell> footprint_at(Cell origin, int sx, int sy) const {
    std::vector<Cell> fp;
    for (int dy = 0; dy < sy; ++dy)
      for (int dx = 0; dx < sx; ++dx) fp.push_back({origin.x + dx, origin.y + dy});
    return fp;
  }

  bool try_place(ClassId cls) {
    const auto& info = world.catalog()[cls];
    int sx = info.size_x, sy = info.size_y;
    if (rand_int(0, 1) == 1) std::swap(sx, sy);
    Cell origin{};
    int anchor_id = -1;
    if (info.placement == PlacementRule::Attached) {
      const ClassId anchor_cls = world.catalog().require(info.attach_to);
      std::vector<int> anchors;
      for (const auto& o : world.objects())
        if (o.class_id == anchor_cls) anchors.push_back(o.id);
      if (anchors.empty()) return false;
      anchor_id = anchors[static_cast<size_t>(rand_int(0, static_cast<int>(anchors.size()) - 1))];
      const auto& afp = world.object(anchor_id).footprint;
      const Cell a = afp[static_cast<size_t>(rand_int(0, static_cast<int>(afp.size()) - 1))];
      const Cell d = kNeighbors4[rand_int(0, 3)];
      origin = {a.x + d.x, a.y + d.y};
      sx = sy = 1;
    } else {
      origin = {rand_int(1, world.width() - 2), rand_int(1, world.height() - 2)};
    }
    auto fp = footprint_at(origin, sx, sy);
    for (Cell c : fp)
      if (!interior(c) || world.blocked(c) || c == world.agent().cell) return false;
    if (info.placement == PlacementRule::AgainstWall && !touches_wall(fp)) return false;
    if (!gap_ok(fp, anchor_id)) return false;
    // Tentatively place, then check that the layout stays navigable.
    GridWorld backup = world;
    world.add_object(cls, fp);
    if (!accessible_layout()) {
      world = std::move(backup);
      return false;
    }
    return true;
  }

  void place_walls() {
    const int w = world.width(), h = world.height();
    for (int x = 0; x < w; ++x) {
      world.set_wall({x, 0});
      world.set_wall({x, h - 1});
    }
    for (int y = 0; y < h; ++y) {
      world.set_wall({0, y});
      world.set_wall({w - 1, y});
    }
    const int interior_cells = std::max(0, (w - 2) * (h - 2));
    const int target = static_cast<int>(spec.wall_density * interior_cells + 0.5);
    int placed = 0;
    for (int attempt = 0; placed < target && attempt < spec.max_retries * 4; ++attempt) {
      const Cell start{rand_int(1, w - 2), rand_int(1, h - 2)};
      const Cell dir = kNeighbors4[rand_int(0, 3)];
      const int len = std::min(rand_int(2, 4), target - placed);
      std::vector<Cell> seg;
      for (int i = 0; i < len; ++i) {
        Cell c{start.x + dir.x * i, start.y + dir.y * i};
        if (!interior(c) || world.terrain()[c] == Terrain::Wall) break;
        seg.push_back(c);
      }
      if (seg.empty()) continue;
      GridWorld backup = world;
      for (Cell c : seg) world.set_wall(c);
      if (!free_space_connected(world)) {
        world = std::move(backup);
        continue;
      }
      placed += static_cast<int>(seg.size());
    }
  }
};

}  // namespace

bool operator==(const SceneSpec& a, const SceneSpec& b) {
  const bool same_catalog =
      a.catalog == b.catalog || (a.catalog && b.catalog && *a.catalog == *b.catalog);
  return same_catalog && a.width == b.width && a.height == b.height &&
         a.wall_density == b.wall_density && a.min_gap == b.min_gap &&
         a.max_retries == b.max_retries && a.interaction_range == b.interaction_range &&
         a.counts == b.counts;
}

bool free_space_connected(const GridWorld& world) {
  Grid<char> seen(world.width(), world.height(), 0);
  int free_total = 0;
  Cell start{-1, -1};
  for (int y = 0; y < world.height(); ++y)
    for (int x = 0; x < world.width(); ++x)
      if (!world.blocked({x, y})) {
        ++free_total;
        if (start.x < 0) start = {x, y};
      }
  if (free_total == 0) return true;
  std::deque<Cell> queue{start};
  seen[start] = 1;
  int count = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    ++count;
    for (Cell d : kNeighbors4) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!world.in_bounds(n) || seen[n] || world.blocked(n)) continue;
      seen[n] = 1;
      queue.push_back(n);
    }
  }
  return count == free_total;
}

GridWorld generate_scene(const SceneSpec& spec, uint64_t seed) {
  if (!spec.catalog) throw ConfigError("scene spec without catalog");
  if (spec.width < 3 || spec.height < 3) throw ConfigError("scene must be at least 3x3");
  Rng rng(derive_seed(seed, "scene"));
  GridWorld world(spec.catalog, spec.width, spec.height, seed);
  world.set_interaction_range(spec.interaction_range);
  Placer placer{spec, world, rng};
  placer.place_walls();

  // Anchors before attached classes; catalog order otherwise.
  std::vector<ClassCount> order = spec.counts;
  std::stable_sort(order.begin(), order.end(), [&](const ClassCount& a, const ClassCount& b) {
    const bool aa = (*spec.catalog)[a.class_id].placement == PlacementRule::Attached;
    const bool ba = (*spec.catalog)[b.class_id].placement == PlacementRule::Attached;
    return !aa && ba;
  });
  for (const auto& cc : order) {
    if (!spec.catalog->valid(cc.class_id) || cc.class_id == spec.catalog->background())
      throw ConfigError("scene spec counts a non-object class");
    if (cc.min < 0 || cc.max < cc.min) throw ConfigError("bad count range");
    const int n = placer.rand_int(cc.min, cc.max);
    for (int i = 0; i < n; ++i) {
      bool ok = false;
      for (int attempt = 0; attempt < spec.max_retries && !ok; ++attempt) ok = placer.try_place(cc.class_id);
      if (!ok) {
        const auto& name = (*spec.catalog)[cc.class_id].name;
        throw PlacementError(name, "cannot place '" + name + "' after " +
                                       std::to_string(spec.max_retries) + " attempts");
      }
    }
  }

  std::vector<Cell> free_cells;
  for (int y = 0; y < world.height(); ++y)
    for (int x = 0; x < world.width(); ++x)
      if (!world.blocked({x, y})) free_cells.push_back({x, y});
  if (free_cells.empty()) throw PlacementError("agent", "no free cell for the agent");
  const Cell start = free_cells[static_cast<size_t>(placer.rand_int(0, static_cast<int>(free_cells.size()) - 1))];
  world.set_agent({start, static_cast<Heading>(placer.rand_int(0, 3))});
  world.validate();
  return world;
}

std::string SceneSpec::serialize() const {
  if (!catalog) throw ConfigError("scene spec without catalog");
  std::ostringstream out;
  out << kSpecHeader << '\n';
  out << "size " << width << ' ' << height << '\n';
  out << "wall_density " << format_double(wall_density) << '\n';
  out << "min_gap " << min_gap << '\n';
  out << "max_retries " << max_retries << '\n';
  out << "reach " << format_double(interaction_range) << '\n';
  const std::string body = catalog_body(*catalog);
  out << "catalog " << count_lines(body) << '\n' << body;
  out << "counts " << counts.size() << '\n';
  for (const auto& c : counts)
    out << "count " << (*catalog)[c.class_id].name << ' ' << c.min << ' ' << c.max << '\n';
  return out.str();
}

SceneSpec SceneSpec::parse(std::string_view text) {
  LineReader r(text);
  if (r.next("header") != kSpecHeader) throw FormatError("scene spec: bad header");
  SceneSpec s;
  r.expect("size") >> s.width >> s.height;
  std::string v;
  r.expect("wall_density") >> v;
  s.wall_density = parse_double(v);
  r.expect("min_gap") >> s.min_gap;
  r.expect("max_retries") >> s.max_retries;
  r.expect("reach") >> v;
  s.interaction_range = parse_double(v);
  s.catalog = r.catalog();
  size_t n = 0;
  r.expect("counts") >> n;
  for (size_t i = 0; i < n; ++i) {
    std::string name;
    ClassCount c;
    r.expect("count") >> name >> c.min >> c.max;
    c.class_id = s.catalog->require(name);
    s.counts.push_back(c);
  }
  if (!r.done()) throw FormatError("scene spec: trailing content");
  return s;
}

// ----- world codec ------------------------------------------------------

class WorldCodec {
 public:
  static std::string write(const GridWorld& w) {
    std::ostringstream out;
    out << kWorldHeader << '\n';
    out << "size " << w.width() << ' ' << w.height() << '\n';
    out << "seed " << w.rng_seed_ << '\n';
    out << "step " << w.step_count_ << '\n';
    out << "reach " << format_double(w.interaction_range_) << '\n';
    const std::string body = catalog_body(*w.catalog_);
    out << "catalog " << count_lines(body) << '\n' << body;
    out << "terrain\n";
    for (int y = 0; y < w.height(); ++y) {
      for (int x = 0; x < w.width(); ++x) out << (w.terrain_[Cell{x, y}] == Terrain::Wall ? '#' : '.');
      out << '\n';
    }
    out << "objects " << w.objects_.size() << '\n';
    for (const auto& o : w.objects_) {
      out << "object " << o.id << " class=" << w.catalog()[o.class_id].name << " cells=";
      if (o.footprint.empty()) out << '-';
      for (size_t i = 0; i < o.footprint.size(); ++i)
        out << (i ? "," : "") << o.footprint[i].x << ':' << o.footprint[i].y;
      out << " flags=" << flags_string(o.flags) << " held=" << o.held_by_agent
          << " contained=" << o.contained << " parent=" << o.parent << '\n';
    }
    out << "agent " << w.agent_.cell.x << ' ' << w.agent_.cell.y << ' '
        << heading_char(w.agent_.heading) << '\n';
    out << "hand " << (w.held_ ? *w.held_ : -1) << '\n';
    return out.str();
  }

  static GridWorld read(std::string_view text) {
    LineReader r(text);
    if (r.next("header") != kWorldHeader) throw FormatError("world: bad header");
    int width = 0, height = 0;
    r.expect("size") >> width >> height;
    uint64_t seed = 0;
    r.expect("seed") >> seed;
    long step = 0;
    r.expect("step") >> step;
    std::string v;
    r.expect("reach") >> v;
    const double reach = parse_double(v);
    auto catalog = r.catalog();
    GridWorld w(catalog, width, height, seed);
    w.step_count_ = step;
    w.interaction_range_ = reach;
    r.expect("terrain");
    for (int y = 0; y < height; ++y) {
      const std::string row = r.next("terrain row");
      if (static_cast<int>(row.size()) != width) throw FormatError("world: terrain row width");
      for (int x = 0; x < width; ++x) {
        if (row[static_cast<size_t>(x)] == '#') w.terrain_[Cell{x, y}] = Terrain::Wall;
        else if (row[static_cast<size_t>(x)] != '.') throw FormatError("world: bad terrain glyph");
      }
    }
    size_t n = 0;
    r.expect("objects") >> n;
    for (size_t i = 0; i < n; ++i) {
      auto ls = r.expect("object");
      ObjectInstance o;
      ls >> o.id;
      if (o.id != static_cast<int>(i)) throw FormatError("world: object ids must be dense");
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "class") o.class_id = catalog->require(val);
        else if (key == "cells") o.footprint = parse_cells(val);
        else if (key == "flags") o.flags = parse_flags(val);
        else if (key == "held") o.held_by_agent = val == "1";
        else if (key == "contained") o.contained = val == "1";
        else if (key == "parent") o.parent = std::stoi(val);
        else throw FormatError("world: unknown object field '" + key + "'");
      }
      o.pickupable = (*catalog)[o.class_id].pickupable;
      o.is_receptacle = (*catalog)[o.class_id].receptacle;
      w.objects_.push_back(std::move(o));
      w.occupy(static_cast<int>(i));
    }
    auto as = r.expect("agent");
    std::string h;
    as >> w.agent_.cell.x >> w.agent_.cell.y >> h;
    if (h.size() != 1) throw FormatError("world: bad agent heading");
    w.agent_.heading = parse_heading(h[0]);
    int hand = -1;
    r.expect("hand") >> hand;
    if (hand >= 0) w.held_ = hand;
    if (!r.done()) throw FormatError("world: trailing content");
    w.validate();
    return w;
  }

 private:
  static std::string flags_string(const StateFlags& f) {
    std::string s;
    auto add = [&](bool on, const char* name) {
      if (!on) return;
      if (!s.empty()) s += ',';
      s += name;
    };
    add(f.sliced, "sliced");
    add(f.clean, "clean");
    add(f.heated, "heated");
    add(f.cooled, "cooled");
    add(f.toggled_on, "on");
    add(f.open, "open");
    return s.empty() ? "-" : s;
  }

  static StateFlags parse_flags(const std::string& s) {
    StateFlags f;
    if (s == "-") return f;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (tok == "sliced") f.sliced = true;
      else if (tok == "clean") f.clean = true;
      else if (tok == "heated") f.heated = true;
      else if (tok == "cooled") f.cooled = true;
      else if (tok == "on") f.toggled_on = true;
      else if (tok == "open") f.open = true;
      else throw FormatError("world: unknown flag '" + tok + "'");
    }
    return f;
  }

  static std::vector<Cell> parse_cells(const std::string& s) {
    std::vector<Cell> cells;
    if (s == "-") return cells;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw FormatError("world: bad cell '" + tok + "'");
      cells.push_back({std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1))});
    }
    return cells;
  }
};

std::string serialize_world(const GridWorld& world) { return WorldCodec::write(world); }
GridWorld parse_world(std::string_view text) { return WorldCodec::read(text); }

}  // namespace ecl
