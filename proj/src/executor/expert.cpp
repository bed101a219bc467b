#include "ecl/executor/expert.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/executor/navigation.hpp"

namespace ecl {

namespace {

constexpr std::string_view kDemoHeader = "# ecl-demo v1";

std::vector<Cell> object_cells(const GridWorld& w, int id) {
  const auto& o = w.object(id);
  if (o.contained) return object_cells(w, o.parent);
  if (o.held_by_agent) return {w.agent().cell};
  return o.footprint;
}

CostField ground_truth_field(const GridWorld& w) {
  Grid<uint8_t> obstacles(w.width(), w.height(), 0);
  for (int y = 0; y < w.height(); ++y)
    for (int x = 0; x < w.width(); ++x) obstacles[{x, y}] = w.blocked({x, y}) ? 1 : 0;
  CostField f(obstacles, 0);
  f.clear(w.agent().cell);
  return f;
}

class Expert {
 public:
  Expert(const GridWorld& world, const Program& program) : w_(world), program_(program) {}

  ExpertPlan run() {
    const auto& subs = program_.subtasks;
    for (size_t i = 0; i < subs.size(); ++i) {
      const Subtask& s = subs[i];
      const ClassId held_class = w_.held_object() ? w_.object(*w_.held_object()).class_id : -1;
      const std::vector<ClassId> mentioned = mentioned_classes(s, held_class, w_.catalog());
      const std::optional<SubtaskAction> next =
          i + 1 < subs.size() ? std::optional(subs[i + 1].action) : std::nullopt;
      switch (s.action) {
        case SubtaskAction::GotoLocation: {
          const int id = bind(s.target_class, next.value_or(SubtaskAction::GotoLocation));
          go_to(id);
          break;
        }
        case SubtaskAction::PickupObject: {
          const int id = bind(s.target_class, SubtaskAction::PickupObject);
          interact(ActionType::Pickup, id);
          plan_.held.push_back({static_cast<long>(plan_.actions.size()), -1, s.target_class});
          break;
        }
        case SubtaskAction::PutObject: {
          const int held = *w_.held_object();
          const int id = bind(s.target_class, SubtaskAction::PutObject);
          interact(ActionType::Put, id);
          close_held();
          if (held == bound_obj_ && program_.task_type == TaskType::PickTwoAndPlace &&
              s.target_class == program_.args.recep) {
            delivered_.insert(held);
            bound_obj_ = -1;
          }
          break;
        }
        case SubtaskAction::SliceObject:
          interact(ActionType::Slice, bind(s.target_class, SubtaskAction::SliceObject));
          break;
        case SubtaskAction::ToggleObject:
          interact(s.toggle_on ? ActionType::ToggleOn : ActionType::ToggleOff,
                   bind(s.target_class, SubtaskAction::ToggleObject));
          break;
      }
      plan_.completions.push_back({static_cast<long>(plan_.actions.size()), mentioned});
    }
    plan_.final_world = w_;
    return plan_;
  }

 private:
  bool suitable(const ObjectInstance& o, SubtaskAction use) const {
    if (delivered_.count(o.id)) return false;
    switch (use) {
      case SubtaskAction::PickupObject: return o.pickupable && o.placed();
      case SubtaskAction::PutObject: return o.is_receptacle && o.placed() && !o.held_by_agent;
      case SubtaskAction::SliceObject: return o.placed() && w_.catalog()[o.class_id].sliceable;
      case SubtaskAction::ToggleObject: return o.placed() && w_.catalog()[o.class_id].toggleable;
      case SubtaskAction::GotoLocation: return !o.held_by_agent;
    }
    return false;
  }

  // Instance used for a class: keep the current binding while it remains
  // usable, otherwise take the suitable instance nearest by arrival time.
  int bind(ClassId cls, SubtaskAction use) {
    auto it = bindings_.find(cls);
    if (it != bindings_.end() && (w_.object(it->second).held_by_agent || suitable(w_.object(it->second), use))) {
      if (!w_.object(it->second).held_by_agent || use != SubtaskAction::PickupObject) return it->second;
    }
    const CostField field = ground_truth_field(w_);
    const ArrivalField arrival = solve_eikonal(field, w_.agent().cell);
    int best = -1;
    double best_t = kInf;
    for (const auto& o : w_.objects()) {
      if (o.class_id != cls || !suitable(o, use)) continue;
      double t = kInf;
      for (Cell c : arrival_region(field, object_cells(w_, o.id), w_.interaction_range()))
        t = std::min(t, arrival.time[c]);
      if (t < best_t) {
        best_t = t;
        best = o.id;
      }
    }
    if (best < 0)
      throw UnreachableError("no reachable " + w_.catalog()[cls].name + " for the expert");
    bindings_[cls] = best;
    if (cls == program_.args.obj) bound_obj_ = best;
    return best;
  }

  void act(const Action& a) {
    const StepOutcome out = apply_action(w_, a);
    plan_.actions.push_back(a);
    if (a.type == ActionType::MoveAhead || is_interaction(a.type)) ++plan_.path_length;
    if (out != StepOutcome::Ok)
      throw UnreachableError("expert action " + a.to_string() + " failed: " + outcome_name(out));
  }

  void go_to(int id) {
    const size_t limit = static_cast<size_t>(w_.width()) * w_.height() * 4;
    for (size_t guard = 0;; ++guard) {
      if (guard > limit) throw UnreachableError("expert navigation did not converge");
      const CostField field = ground_truth_field(w_);
      const auto cells = object_cells(w_, id);
      const NavStep step = plan_step(field, w_.agent(), arrival_region(field, cells, w_.interaction_range()));
      if (!step.reachable) throw UnreachableError("object " + std::to_string(id) + " is not accessible");
      if (step.arrived) break;
      for (const auto& a : step.actions) act(a);
    }
    face(id);
  }

  void face(int id) {
    const auto cells = object_cells(w_, id);
    Cell nearest = cells.front();
    for (Cell c : cells)
      if (chebyshev(c, w_.agent().cell) < chebyshev(nearest, w_.agent().cell)) nearest = c;
    if (const auto h = facing_heading(w_.agent().cell, nearest))
      for (const auto& a : turn_actions(w_.agent().heading, *h)) act(a);
  }

  void interact(ActionType type, int id) {
    if (!within_reach(w_, id))
      go_to(id);
    else
      face(id);
    act(Action::interact(type, id));
  }

  void close_held() {
    for (auto& h : plan_.held)
      if (h.end < 0) h.end = static_cast<long>(plan_.actions.size());
  }

  GridWorld w_;
  const Program& program_;
  ExpertPlan plan_;
  std::map<ClassId, int> bindings_;
  std::set<int> delivered_;
  int bound_obj_ = -1;
};

std::string join_classes(const std::vector<ClassId>& ids, const Catalog& catalog) {
  std::string s;
  for (ClassId c : ids) s += (s.empty() ? "" : ",") + catalog[c].name;
  return s;
}

}  // namespace

std::vector<ClassId> mentioned_classes(const Subtask& subtask, ClassId held_class, const Catalog& catalog) {
  std::vector<ClassId> out{subtask.target_class};
  if (subtask.action == SubtaskAction::PutObject && held_class >= 0 && held_class != subtask.target_class)
    out.insert(out.begin(), held_class);
  if (subtask.action == SubtaskAction::SliceObject && held_class >= 0 && catalog[held_class].cutter)
    out.push_back(held_class);
  return out;
}

ExpertPlan plan_expert(const GridWorld& world, const Program& program) {
  validate_program(program, world.catalog());
  ExpertPlan plan = Expert(world, program).run();
  for (auto& h : plan.held)
    if (h.end < 0) h.end = static_cast<long>(plan.actions.size()) + 1;
  return plan;
}

Demonstration record_demonstration(const GridWorld& world, const ExpertPlan& plan, const FeatureModel& features,
                                   const SensorConfig& sensor, std::string scene, std::string instruction) {
  Demonstration d;
  d.scene = std::move(scene);
  d.instruction = std::move(instruction);
  GridWorld w = world;
  d.initial_digest = observation_digest(observe(w, features, sensor));
  for (const auto& a : plan.actions) {
    const StepOutcome out = apply_action(w, a);
    d.steps.push_back({a, out, observation_digest(observe(w, features, sensor))});
  }
  d.completions = plan.completions;
  d.held = plan.held;
  return d;
}

DemoTrace replay(const GridWorld& world, const Demonstration& demo, const FeatureModel& features,
                 const SensorConfig& sensor, GridWorld* final_world) {
  DemoTrace trace;
  GridWorld w = world;
  trace.frames.push_back(observe(w, features, sensor));
  if (observation_digest(trace.frames.back()) != demo.initial_digest)
    throw FormatError("demo replay diverged at the initial observation");
  for (size_t i = 0; i < demo.steps.size(); ++i) {
    const auto& s = demo.steps[i];
    const StepOutcome out = apply_action(w, s.action);
    if (out != s.outcome)
      throw FormatError("demo replay diverged at step " + std::to_string(i + 1) + ": outcome " + outcome_name(out));
    trace.frames.push_back(observe(w, features, sensor));
    if (observation_digest(trace.frames.back()) != s.digest)
      throw FormatError("demo replay diverged at step " + std::to_string(i + 1) + ": observation digest");
  }
  trace.completions = demo.completions;
  trace.held = demo.held;
  if (final_world) *final_world = std::move(w);
  return trace;
}

std::string Demonstration::serialize(const Catalog& catalog) const {
  std::ostringstream out;
  out << kDemoHeader << '\n';
  out << "scene " << scene << '\n';
  out << "instruction " << instruction << '\n';
  out << "initial " << initial_digest << '\n';
  out << "steps " << steps.size() << '\n';
  for (const auto& s : steps)
    out << "step " << s.action.to_string() << ' ' << outcome_name(s.outcome) << ' ' << s.digest << '\n';
  out << "completions " << completions.size() << '\n';
  for (const auto& c : completions) out << "completion " << c.frame << ' ' << join_classes(c.mentioned, catalog) << '\n';
  out << "held " << held.size() << '\n';
  for (const auto& h : held) out << "interval " << h.begin << ' ' << h.end << ' ' << catalog[h.cls].name << '\n';
  return out.str();
}

Demonstration Demonstration::parse(std::string_view text, const Catalog& catalog) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next = [&](std::string_view key) {
    if (!std::getline(in, line)) throw FormatError("demo: unexpected end, expected " + std::string(key));
    if (line.rfind(std::string(key) + " ", 0) != 0 && line != key)
      throw FormatError("demo: expected '" + std::string(key) + "', got '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };
  auto count = [&](std::string_view key) {
    const std::string v = next(key);
    try {
      return std::stoul(v);
    } catch (const std::exception&) {
      throw FormatError("demo: bad count '" + v + "'");
    }
  };
  if (!std::getline(in, line) || line != kDemoHeader) throw FormatError("demo: bad header");
  Demonstration d;
  d.scene = next("scene");
  d.instruction = next("instruction");
  d.initial_digest = next("initial");
  const size_t n = count("steps");
  for (size_t i = 0; i < n; ++i) {
    std::istringstream ls(next("step"));
    std::string action, outcome;
    DemoStep s;
    ls >> action >> outcome >> s.digest;
    s.action = Action::parse(action);
    s.outcome = parse_outcome(outcome);
    d.steps.push_back(s);
  }
  const size_t m = count("completions");
  for (size_t i = 0; i < m; ++i) {
    std::istringstream ls(next("completion"));
    DemoTrace::Completion c;
    std::string names;
    ls >> c.frame >> names;
    std::istringstream ns(names);
    std::string name;
    while (std::getline(ns, name, ',')) c.mentioned.push_back(catalog.require(name));
    d.completions.push_back(c);
  }
  const size_t k = count("held");
  for (size_t i = 0; i < k; ++i) {
    std::istringstream ls(next("interval"));
    DemoTrace::HeldInterval h;
    std::string name;
    ls >> h.begin >> h.end >> name;
    h.cls = catalog.require(name);
    d.held.push_back(h);
  }
  std::string rest;
  while (std::getline(in, rest))
    if (!rest.empty()) throw FormatError("demo: trailing content");
  return d;
}

}  // namespace ecl
