#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecl/common/grid.hpp"
#include "ecl/world/catalog.hpp"

namespace ecl {

enum class Heading { N, E, S, W };

Cell heading_vector(Heading h);
Heading rotate_left(Heading h);
Heading rotate_right(Heading h);
char heading_char(Heading h);
Heading parse_heading(char c);

struct AgentPose {
  Cell cell;
  Heading heading = Heading::E;

  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

struct StateFlags {
  bool sliced = false;
  bool clean = false;
  bool heated = false;
  bool cooled = false;
  bool toggled_on = false;
  bool open = false;

  friend bool operator==(const StateFlags&, const StateFlags&) = default;
};

struct ObjectInstance {
  int id = -1;
  ClassId class_id = -1;
  std::vector<Cell> footprint;  // sorted; empty while held or contained
  bool pickupable = false;
  bool is_receptacle = false;
  StateFlags flags;
  bool held_by_agent = false;
  bool contained = false;  // inside a movable receptacle (parent)
  int parent = -1;         // receptacle this object rests on or in

  bool placed() const { return !held_by_agent && !contained; }

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

enum class Terrain : unsigned char { Free, Wall };
enum class CellKind { Free, Wall, Object };

enum class ActionType {
  MoveAhead,
  RotateLeft,
  RotateRight,
  Pickup,
  Put,
  Open,
  Close,
  ToggleOn,
  ToggleOff,
  Slice,
  Stop,
};

const char* action_name(ActionType t);
std::optional<ActionType> parse_action_type(const std::string& name);
bool is_interaction(ActionType t);

struct Action {
  ActionType type = ActionType::Stop;
  int target = -1;  // object id for interaction actions, -1 otherwise

  static Action move_ahead() { return {ActionType::MoveAhead, -1}; }
  static Action rotate_left() { return {ActionType::RotateLeft, -1}; }
  static Action rotate_right() { return {ActionType::RotateRight, -1}; }
  static Action stop() { return {ActionType::Stop, -1}; }
  static Action interact(ActionType t, int id) { return {t, id}; }

  std::string to_string() const;
  static Action parse(const std::string& text);

  friend bool operator==(const Action&, const Action&) = default;
};

enum class StepOutcome { Ok, Collision, InteractionFailure };
const char* outcome_name(StepOutcome o);
StepOutcome parse_outcome(const std::string& name);

// Ground-truth scene: terrain, typed object instances and the agent pose.
class GridWorld {
 public:
  GridWorld() = default;
  GridWorld(std::shared_ptr<const Catalog> catalog, int width, int height, uint64_t rng_seed);

  int width() const { return terrain_.width(); }
  int height() const { return terrain_.height(); }
  bool in_bounds(Cell c) const { return terrain_.in_bounds(c); }
  const Catalog& catalog() const { return *catalog_; }
  const std::shared_ptr<const Catalog>& catalog_ptr() const { return catalog_; }
  uint64_t rng_seed() const { return rng_seed_; }
  long step_count() const { return step_count_; }
  double interaction_range() const { return interaction_range_; }
  void set_interaction_range(double r) { interaction_range_ = r; }

  CellKind cell_kind(Cell c) const;
  // Walls and object footprints block motion and rays.
  bool blocked(Cell c) const { return cell_kind(c) != CellKind::Free; }
  // Object id whose footprint covers c, or -1.
  int occupant(Cell c) const { return occupant_[c]; }
  const Grid<Terrain>& terrain() const { return terrain_; }

  const std::vector<ObjectInstance>& objects() const { return objects_; }
  const ObjectInstance& object(int id) const;
  bool has_object(int id) const { return id >= 0 && id < static_cast<int>(objects_.size()); }
  std::optional<int> held_object() const { return held_; }

  const AgentPose& agent() const { return agent_; }

  // Scene construction.
  void set_wall(Cell c);
  int add_object(ClassId cls, std::vector<Cell> footprint);
  void set_agent(AgentPose pose);

  // Throws InputError when any structural invariant is violated.
  void validate() const;

  friend bool operator==(const GridWorld& a, const GridWorld& b);

 private:
  friend class WorldMutator;
  friend class WorldCodec;
  void occupy(int id);
  void vacate(int id);

  std::shared_ptr<const Catalog> catalog_;
  Grid<Terrain> terrain_;
  Grid<int> occupant_;
  std::vector<ObjectInstance> objects_;
  AgentPose agent_;
  std::optional<int> held_;
  uint64_t rng_seed_ = 0;
  long step_count_ = 0;
  double interaction_range_ = 1.5;
};

struct StepResult {
  GridWorld world;
  StepOutcome outcome = StepOutcome::Ok;
};

// Pure transition. Malformed target ids throw InputError; every in-world
// failure is reported through the outcome.
StepResult step(const GridWorld& world, const Action& action);

// In-place variant of step().
StepOutcome apply_action(GridWorld& world, const Action& action);

// Chebyshev distance from the agent cell to the nearest footprint cell.
double distance_to_object(const GridWorld& world, int object_id);
bool within_reach(const GridWorld& world, int object_id);

}  // namespace ecl
