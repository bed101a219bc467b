#include "ecl/world/world.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "ecl/common/error.hpp"

namespace ecl {

Cell heading_vector(Heading h) {
  switch (h) {
    case Heading::N: return {0, -1};
    case Heading::E: return {1, 0};
    case Heading::S: return {0, 1};
    case Heading::W: return {-1, 0};
  }
  return {0, 0};
}

Heading rotate_left(Heading h) {
  switch (h) {
    case Heading::N: return Heading::W;
    case Heading::W: return Heading::S;
    case Heading::S: return Heading::E;
    case Heading::E: return Heading::N;
  }
  return h;
}

Heading rotate_right(Heading h) {
  switch (h) {
    case Heading::N: return Heading::E;
    case Heading::E: return Heading::S;
    case Heading::S: return Heading::W;
    case Heading::W: return Heading::N;
  }
  return h;
}

char heading_char(Heading h) { return "NESW"[static_cast<int>(h)]; }

Heading parse_heading(char c) {
  switch (c) {
    case 'N': return Heading::N;
    case 'E': return Heading::E;
    case 'S': return Heading::S;
    case 'W': return Heading::W;
    default: throw FormatError(std::string("bad heading '") + c + "'");
  }
}

namespace {

constexpr const char* kActionNames[] = {"MoveAhead", "RotateLeft", "RotateRight", "Pickup",
                                        "Put",       "Open",       "Close",       "ToggleOn",
                                        "ToggleOff", "Slice",      "Stop"};

}  // namespace

const char* action_name(ActionType t) { return kActionNames[static_cast<int>(t)]; }

std::optional<ActionType> parse_action_type(const std::string& name) {
  for (int i = 0; i < static_cast<int>(std::size(kActionNames)); ++i)
    if (name == kActionNames[i]) return static_cast<ActionType>(i);
  return std::nullopt;
}

bool is_interaction(ActionType t) {
  switch (t) {
    case ActionType::Pickup:
    case ActionType::Put:
    case ActionType::Open:
    case ActionType::Close:
    case ActionType::ToggleOn:
    case ActionType::ToggleOff:
    case ActionType::Slice:
      return true;
    default:
      return false;
  }
}

std::string Action::to_string() const {
  std::string s = action_name(type);
  if (is_interaction(type)) s += "(" + std::to_string(target) + ")";
  return s;
}

Action Action::parse(const std::string& text) {
  const auto open = text.find('(');
  const std::string name = text.substr(0, open);
  auto type = parse_action_type(name);
  if (!type) throw FormatError("unknown action '" + text + "'");
  Action a{*type, -1};
  if (is_interaction(*type)) {
    const auto close = text.find(')', open);
    if (open == std::string::npos || close == std::string::npos)
      throw FormatError("interaction action without target: '" + text + "'");
    a.target = std::stoi(text.substr(open + 1, close - open - 1));
  } else if (open != std::string::npos) {
    throw FormatError("navigation action with target: '" + text + "'");
  }
  return a;
}

const char* outcome_name(StepOutcome o) {
  switch (o) {
    case StepOutcome::Ok: return "Ok";
    case StepOutcome::Collision: return "Collision";
    case StepOutcome::InteractionFailure: return "InteractionFailure";
  }
  return "?";
}

StepOutcome parse_outcome(const std::string& name) {
  if (name == "Ok") return StepOutcome::Ok;
  if (name == "Collision") return StepOutcome::Collision;
  if (name == "InteractionFailure") return StepOutcome::InteractionFailure;
  throw FormatError("unknown step outcome '" + name + "'");
}

GridWorld::GridWorld(std::shared_ptr<const Catalog> catalog, int width, int height,
                     uint64_t rng_seed)
    : catalog_(std::move(catalog)),
      terrain_(width, height, Terrain::Free),
      occupant_(width, height, -1),
      rng_seed_(rng_seed) {
  if (!catalog_) throw ConfigError("world requires a catalog");
  if (width < 1 || height < 1) throw ConfigError("world dimensions must be positive");
}

CellKind GridWorld::cell_kind(Cell c) const {
  if (!in_bounds(c) || terrain_[c] == Terrain::Wall) return CellKind::Wall;
  return occupant_[c] >= 0 ? CellKind::Object : CellKind::Free;
}

const ObjectInstance& GridWorld::object(int id) const {
  if (!has_object(id)) throw InputError("no object with id " + std::to_string(id));
  return objects_[static_cast<size_t>(id)];
}

void GridWorld::set_wall(Cell c) {
  if (!in_bounds(c)) throw InputError("wall outside world bounds");
  if (occupant_[c] >= 0) throw InputError("wall over an object footprint");
  terrain_[c] = Terrain::Wall;
}

int GridWorld::add_object(ClassId cls, std::vector<Cell> footprint) {
  if (!catalog_->valid(cls) || cls == catalog_->background())
    throw InputError("object class id " + std::to_string(cls) + " is not an object class");
  if (footprint.empty()) throw InputError("placed object needs a footprint");
  std::sort(footprint.begin(), footprint.end());
  for (Cell c : footprint) {
    if (!in_bounds(c)) throw InputError("object footprint out of bounds");
    if (terrain_[c] == Terrain::Wall) throw InputError("object footprint overlaps a wall");
    if (occupant_[c] >= 0) throw InputError("object footprints overlap");
  }
  ObjectInstance obj;
  obj.id = static_cast<int>(objects_.size());
  obj.class_id = cls;
  obj.footprint = std::move(footprint);
  obj.pickupable = (*catalog_)[cls].pickupable;
  obj.is_receptacle = (*catalog_)[cls].receptacle;
  objects_.push_back(std::move(obj));
  occupy(objects_.back().id);
  return objects_.back().id;
}

void GridWorld::set_agent(AgentPose pose) {
  if (!in_bounds(pose.cell)) throw InputError("agent outside world bounds");
  agent_ = pose;
}

void GridWorld::occupy(int id) {
  for (Cell c : objects_[static_cast<size_t>(id)].footprint) occupant_[c] = id;
}

void GridWorld::vacate(int id) {
  for (Cell c : objects_[static_cast<size_t>(id)].footprint) occupant_[c] = -1;
}

void GridWorld::validate() const {
  Grid<int> expect(width(), height(), -1);
  int held_count = 0;
  for (const auto& o : objects_) {
    if (!catalog_->valid(o.class_id)) throw InputError("object with invalid class");
    if (o.held_by_agent) {
      ++held_count;
      if (!held_ || *held_ != o.id) throw InputError("held flag disagrees with agent hand");
    }
    if (o.placed() == o.footprint.empty())
      throw InputError("object " + std::to_string(o.id) + " footprint/placement mismatch");
    if (o.contained && (o.parent < 0 || !has_object(o.parent)))
      throw InputError("contained object without container");
    for (Cell c : o.footprint) {
      if (!in_bounds(c) || terrain_[c] == Terrain::Wall)
        throw InputError("object footprint on wall or out of bounds");
      if (expect[c] >= 0) throw InputError("overlapping object footprints");
      expect[c] = o.id;
    }
  }
  if (held_count > 1) throw InputError("agent holds more than one object");
  if (held_ && held_count == 0) throw InputError("agent hand refers to unheld object");
  if (expect != occupant_) throw InputError("occupancy index out of sync");
  if (!in_bounds(agent_.cell) || blocked(agent_.cell))
    throw InputError("agent cell is blocked");
}

bool operator==(const GridWorld& a, const GridWorld& b) {
  const bool same_catalog =
      a.catalog_ == b.catalog_ || (a.catalog_ && b.catalog_ && *a.catalog_ == *b.catalog_);
  return same_catalog && a.terrain_ == b.terrain_ && a.occupant_ == b.occupant_ &&
         a.objects_ == b.objects_ && a.agent_ == b.agent_ && a.held_ == b.held_ &&
         a.rng_seed_ == b.rng_seed_ && a.step_count_ == b.step_count_ &&
         a.interaction_range_ == b.interaction_range_;
}

double distance_to_object(const GridWorld& world, int object_id) {
  const auto& o = world.object(object_id);
  if (o.held_by_agent) return 0.0;
  if (o.contained) return distance_to_object(world, o.parent);
  int best = std::numeric_limits<int>::max();
  for (Cell c : o.footprint) best = std::min(best, chebyshev(c, world.agent().cell));
  return best;
}

bool within_reach(const GridWorld& world, int object_id) {
  return distance_to_object(world, object_id) <= world.interaction_range();
}

// Friend with write access to GridWorld internals; keeps the transition
// rules in one place.
class WorldMutator {
 public:
  explicit WorldMutator(GridWorld& w) : w_(w) {}

  StepOutcome apply(const Action& action) {
    if (is_interaction(action.type) && !w_.has_object(action.target))
      throw InputError("action " + action.to_string() + " targets unknown object id");
    if (!is_interaction(action.type) && action.target != -1)
      throw InputError("navigation action carries a target id");
    ++w_.step_count_;
    switch (action.type) {
      case ActionType::MoveAhead: return move_ahead();
      case ActionType::RotateLeft:
        w_.agent_.heading = rotate_left(w_.agent_.heading);
        return StepOutcome::Ok;
      case ActionType::RotateRight:
        w_.agent_.heading = rotate_right(w_.agent_.heading);
        return StepOutcome::Ok;
      case ActionType::Stop: return StepOutcome::Ok;
      case ActionType::Pickup: return pickup(action.target);
      case ActionType::Put: return put(action.target);
      case ActionType::Open: return set_open(action.target, true);
      case ActionType::Close: return set_open(action.target, false);
      case ActionType::ToggleOn: return toggle(action.target, true);
      case ActionType::ToggleOff: return toggle(action.target, false);
      case ActionType::Slice: return slice(action.target);
    }
    return StepOutcome::InteractionFailure;
  }

 private:
  ObjectInstance& obj(int id) { return w_.objects_[static_cast<size_t>(id)]; }
  const ClassInfo& info(const ObjectInstance& o) const { return w_.catalog()[o.class_id]; }

  StepOutcome move_ahead() {
    const Cell d = heading_vector(w_.agent_.heading);
    const Cell next{w_.agent_.cell.x + d.x, w_.agent_.cell.y + d.y};
    if (w_.blocked(next)) return StepOutcome::Collision;
    w_.agent_.cell = next;
    return StepOutcome::Ok;
  }

  StepOutcome pickup(int id) {
    auto& o = obj(id);
    if (w_.held_ || !o.pickupable || !o.placed() || !within_reach(w_, id))
      return StepOutcome::InteractionFailure;
    w_.vacate(id);
    o.footprint.clear();
    o.held_by_agent = true;
    o.parent = -1;
    w_.held_ = id;
    return StepOutcome::Ok;
  }

  // Number of free cells 4-reachable from the agent.
  int reachable_free_cells() const {
    Grid<char> seen(w_.width(), w_.height(), 0);
    std::deque<Cell> queue{w_.agent_.cell};
    seen[w_.agent_.cell] = 1;
    int count = 0;
    while (!queue.empty()) {
      Cell c = queue.front();
      queue.pop_front();
      ++count;
      for (Cell d : kNeighbors4) {
        Cell n{c.x + d.x, c.y + d.y};
        if (!w_.in_bounds(n) || seen[n] || w_.blocked(n)) continue;
        seen[n] = 1;
        queue.push_back(n);
      }
    }
    return count;
  }

  StepOutcome put(int recep_id) {
    if (!w_.held_) return StepOutcome::InteractionFailure;
    const int held_id = *w_.held_;
    auto& r = obj(recep_id);
    if (recep_id == held_id || !r.is_receptacle || !r.placed() || !within_reach(w_, recep_id))
      return StepOutcome::InteractionFailure;
    auto& h = obj(held_id);
    if (r.pickupable) {
      h.held_by_agent = false;
      h.contained = true;
      h.parent = recep_id;
      w_.held_.reset();
      return StepOutcome::Ok;
    }
    std::vector<Cell> candidates;
    for (Cell f : r.footprint) {
      for (Cell d : kNeighbors4) {
        Cell n{f.x + d.x, f.y + d.y};
        if (w_.blocked(n) || n == w_.agent_.cell) continue;
        if (std::find(candidates.begin(), candidates.end(), n) == candidates.end())
          candidates.push_back(n);
      }
    }
    if (candidates.empty()) return StepOutcome::InteractionFailure;
    const Cell agent = w_.agent_.cell;
    std::sort(candidates.begin(), candidates.end(), [&](Cell a, Cell b) {
      const int da = chebyshev(a, agent), db = chebyshev(b, agent);
      if (da != db) return da < db;
      return w_.terrain_.index(a) < w_.terrain_.index(b);
    });
    // Prefer a cell whose occupation does not cut the agent's free region.
    const int before = reachable_free_cells();
    Cell chosen = candidates.front();
    for (Cell c : candidates) {
      w_.occupant_[c] = held_id;
      const int after = reachable_free_cells();
      w_.occupant_[c] = -1;
      if (after >= before - 1) {
        chosen = c;
        break;
      }
    }
    h.held_by_agent = false;
    h.footprint = {chosen};
    h.parent = recep_id;
    w_.occupy(held_id);
    w_.held_.reset();
    return StepOutcome::Ok;
  }

  StepOutcome set_open(int id, bool open) {
    auto& o = obj(id);
    if (!info(o).openable || !o.placed() || !within_reach(w_, id) || o.flags.open == open)
      return StepOutcome::InteractionFailure;
    o.flags.open = open;
    return StepOutcome::Ok;
  }

  StepOutcome toggle(int id, bool on) {
    auto& o = obj(id);
    if (!info(o).toggleable || !o.placed() || !within_reach(w_, id) || o.flags.toggled_on == on)
      return StepOutcome::InteractionFailure;
    o.flags.toggled_on = on;
    if (on) apply_effect(id);
    return StepOutcome::Ok;
  }

  // Appliance effect reaches objects resting on/in the activated receptacle:
  // the appliance itself, or an adjacent instance of the activated class.
  void apply_effect(int appliance_id) {
    const auto& a = obj(appliance_id);
    const auto& ai = info(a);
    if (ai.effect == ApplianceEffect::None || ai.effect == ApplianceEffect::Light) return;
    const ClassId target_cls = w_.catalog().require(ai.activates);
    std::vector<int> receptacles;
    for (const auto& r : w_.objects_) {
      if (r.class_id != target_cls || !r.placed()) continue;
      if (r.id == appliance_id) {
        receptacles.push_back(r.id);
        continue;
      }
      bool adjacent = false;
      for (Cell rc : r.footprint)
        for (Cell ac : a.footprint) adjacent = adjacent || chebyshev(rc, ac) <= 1;
      if (adjacent) receptacles.push_back(r.id);
    }
    for (auto& o : w_.objects_) {
      if (o.parent < 0 || std::find(receptacles.begin(), receptacles.end(), o.parent) ==
                              receptacles.end())
        continue;
      switch (ai.effect) {
        case ApplianceEffect::Clean: o.flags.clean = true; break;
        case ApplianceEffect::Heat: o.flags.heated = true; break;
        case ApplianceEffect::Cool: o.flags.cooled = true; break;
        default: break;
      }
    }
  }

  StepOutcome slice(int id) {
    if (!w_.held_ || !info(obj(*w_.held_)).cutter) return StepOutcome::InteractionFailure;
    auto& o = obj(id);
    if (!info(o).sliceable || !o.placed() || !within_reach(w_, id))
      return StepOutcome::InteractionFailure;
    o.flags.sliced = true;
    return StepOutcome::Ok;
  }

  GridWorld& w_;
};

StepOutcome apply_action(GridWorld& world, const Action& action) {
  return WorldMutator(world).apply(action);
}

StepResult step(const GridWorld& world, const Action& action) {
  StepResult r{world, StepOutcome::Ok};
  r.outcome = apply_action(r.world, action);
  return r;
}

}  // namespace ecl
