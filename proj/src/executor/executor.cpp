#include "ecl/executor/executor.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ecl/common/error.hpp"
#include "ecl/common/rng.hpp"
#include "ecl/executor/navigation.hpp"

namespace ecl {

namespace {

constexpr const char* kErrorModeNames[] = {"GroundingOrTargetNotFound", "InteractionFailure", "Collision",
                                           "BlockingOrNotAccessible", "Other"};

struct Terminate {
  ErrorMode mode;
  std::string detail;
};

struct BudgetSpent {};

class Agent {
 public:
  Agent(const GridWorld& world, const Perception& perception, const SemanticPolicy& policy,
        const ExecutorConfig& config)
      : world_(world), perception_(perception), policy_(policy), config_(config),
        map_(world.width(), world.height(), world.catalog().size(), world.catalog().background(), config.map),
        goal_rng_(derive_seed(config.seed, "goal")) {
    if (!perception.features) throw ConfigError("executor needs a feature model");
    if (!config.oracle_semantics) {
      if (!perception.projection || !perception.embeddings) throw ConfigError("learned semantics need a projection");
      if (perception.projection->in_dim() != perception.features->dim())
        throw ConfigError("projection input dimension does not match the feature model");
      if (perception.projection->out_dim() != perception.embeddings->dim())
        throw ConfigError("projection output dimension does not match the embeddings");
      if (static_cast<int>(perception.embeddings->embeddings.size()) != world.catalog().size())
        throw ConfigError("embedding set does not cover the catalog");
    }
    if (policy.num_classes() != world.catalog().size() || policy.width() != world.width() ||
        policy.height() != world.height())
      throw ConfigError("semantic policy does not match the scene frame");
    run_.poses.push_back(world_.agent());
  }

  EpisodeRun run(const Program& program) {
    for (const auto& s : program.subtasks) run_.subtasks.push_back({s.to_string(world_.catalog()), false, 0});
    try {
      if (config_.budget <= 0) throw Terminate{ErrorMode::Other, "no step budget"};
      perceive();
      if (config_.initial_scan) scan();
      for (size_t i = 0; i < program.subtasks.size(); ++i) {
        current_class_ = program.subtasks[i].target_class;
        execute(program, program.subtasks[i]);
        run_.subtasks[i].completed = true;
        run_.subtasks[i].step = run_.steps;
      }
      completed_ = true;
    } catch (const Terminate& t) {
      run_.error = t.mode;
      run_.error_detail = t.detail;
    } catch (const BudgetSpent&) {
      const bool labelled = ever_labelled_.count(current_class_) > 0;
      run_.error = labelled || run_.steps == 0 ? ErrorMode::Other : ErrorMode::GroundingOrTargetNotFound;
      run_.error_detail = "step budget exhausted";
    }
    run_.goals = evaluate_goal_conditions(world_, program);
    run_.success = completed_ && run_.goals.satisfied();
    if (completed_ && !run_.success) {
      run_.error = ErrorMode::Other;
      run_.error_detail = "program finished with goal conditions unmet";
    }
    run_.map = map_;
    run_.final_world = world_;
    return run_;
  }

  SemanticMap explore() {
    try {
      if (config_.budget <= 0) return map_;
      perceive();
      scan();
      std::set<Cell> visited{world_.agent().cell};
      for (int guard = 0; guard < config_.budget * 4; ++guard) {
        const CostField field = map_field();
        const ArrivalField arrival = solve_eikonal(field, world_.agent().cell);
        std::optional<Cell> best;
        for (size_t i = 0; i < arrival.time.size(); ++i) {
          const Cell c = arrival.time.cell(i);
          if (!arrival.reachable(c) || visited.count(c) || !is_frontier(c)) continue;
          if (!best || arrival.time[c] < arrival.time[*best]) best = c;
        }
        if (!best) break;
        const NavStep step = plan_step(field, world_.agent(), {*best});
        if (step.arrived) {
          visited.insert(*best);
          scan();
          continue;
        }
        for (const auto& a : step.actions)
          if (act(a) != StepOutcome::Ok) break;
        visited.insert(world_.agent().cell);
      }
    } catch (const BudgetSpent&) {
    } catch (const Terminate&) {
    }
    return map_;
  }

 private:
  // ----- perception -----

  void perceive() {
    Observation obs = observe(world_, *perception_.features, config_.sensor);
    std::vector<SoftLabel> labels = label_observation(obs, world_, perception_, config_);
    if (config_.corruption_prob > 0) {
      Rng rng(derive_seed(config_.seed, "corruption", static_cast<uint64_t>(run_.steps)));
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < config_.corruption_prob) {
        const auto classes = world_.catalog().object_classes();
        for (size_t i = 0; i < labels.size(); ++i) {
          const ClassId truth = world_.object(obs.proposals[i].object_id).class_id;
          ClassId wrong = truth;
          while (wrong == truth)
            wrong = classes[std::uniform_int_distribution<size_t>(0, classes.size() - 1)(rng)];
          labels[i] = one_hot_label(wrong, world_.catalog().size());
        }
        for (auto& r : obs.rays) r.depth_variance *= config_.corruption_variance_scale;
      }
    }
    const PointCloudFrame frame = project_observation(obs, world_.agent(), labels, map_);
    if (config_.fusion == FusionMode::Bayes)
      fuse(map_, frame);
    else
      fuse_max(map_, frame);
    for (const auto& [cell, blocked] : collisions_)
      if (blocked) map_.occupancy(cell) = config_.map.logodds_clamp;
    for (size_t i = 0; i < labels.size(); ++i) {
      ever_labelled_.insert(labels[i].hard_label);
      last_seen_[obs.proposals[i].object_id] = obs.proposals[i].visible_cells;
    }
    last_obs_ = std::move(obs);
    last_labels_ = std::move(labels);
  }

  // ----- acting -----

  StepOutcome act(const Action& a) {
    if (run_.steps >= config_.budget) throw BudgetSpent{};
    const AgentPose before = world_.agent();
    const StepOutcome out = apply_action(world_, a);
    ++run_.steps;
    if (a.type == ActionType::MoveAhead || is_interaction(a.type)) ++run_.path_length;
    run_.actions.push_back(a);
    run_.poses.push_back(world_.agent());
    if (out == StepOutcome::Collision) {
      const Cell d = heading_vector(before.heading);
      const Cell ahead{before.cell.x + d.x, before.cell.y + d.y};
      if (map_.in_bounds(ahead)) collisions_[ahead] = true;
      ++collisions_total_;
      if (collisions_total_ >= config_.collision_limit)
        throw Terminate{ErrorMode::Collision, "collision limit reached"};
    }
    perceive();
    return out;
  }

  void scan() {
    for (int i = 0; i < 4; ++i) act(Action::rotate_left());
  }

  void face(Cell target) {
    if (const auto h = facing_heading(world_.agent().cell, target))
      for (const auto& a : turn_actions(world_.agent().heading, *h)) act(a);
  }

  // ----- planning -----

  CostField map_field() const {
    Grid<uint8_t> obstacles(map_.width(), map_.height(), 0);
    for (int y = 0; y < map_.height(); ++y)
      for (int x = 0; x < map_.width(); ++x) obstacles[{x, y}] = map_.likely_occupied({x, y}) ? 1 : 0;
    CostField f(obstacles, config_.inflation_radius);
    f.clear(world_.agent().cell);
    return f;
  }

  bool is_frontier(Cell c) const {
    if (map_.likely_occupied(c) || !map_.known(c)) return false;
    for (Cell d : kNeighbors4) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (map_.in_bounds(n) && !map_.known(n)) return true;
    }
    return false;
  }

  GoalQuery query(ClassId cls) const {
    GoalQuery q;
    q.cls = cls;
    q.reach = world_.interaction_range();
    q.resamples = config_.goal_resamples;
    if (auto it = excluded_.find(cls); it != excluded_.end()) q.excluded = it->second;
    q.ignore_map = config_.goal_policy == GoalPolicyMode::Uniform;
    return q;
  }

  void guard() {
    if (++iterations_ > config_.budget * 8 + 64) throw Terminate{ErrorMode::Other, "executor made no progress"};
  }

  // Map cells of the class within interaction range of the agent.
  std::vector<Cell> labelled_cells_in_reach(ClassId cls) const {
    std::vector<Cell> out;
    const auto& excl = excluded_.count(cls) ? excluded_.at(cls) : std::set<Cell>{};
    for (const auto& [c, p] : query_class_cells(map_, cls))
      if (!excl.count(c) && chebyshev(c, world_.agent().cell) <= world_.interaction_range()) out.push_back(c);
    return out;
  }

  // Walks to a standpoint next to g (skipping standpoints that already
  // failed for it) and faces it. False when no standpoint is reachable.
  bool approach(Cell g) {
    for (;;) {
      guard();
      const CostField field = map_field();
      std::vector<Cell> region = arrival_region(field, {g}, world_.interaction_range());
      if (auto it = bad_standpoints_.find(g); it != bad_standpoints_.end())
        std::erase_if(region, [&](Cell c) { return it->second.count(c) > 0; });
      if (region.empty()) return false;
      const NavStep step = plan_step(field, world_.agent(), region);
      if (!step.reachable) return false;
      if (step.arrived) {
        face(g);
        return true;
      }
      for (const auto& a : step.actions)
        if (act(a) != StepOutcome::Ok) break;
    }
  }

  // Last seen cell of the instance the agent already handled for this
  // class, if it is not in hand.
  std::optional<Cell> tracked_cell(ClassId cls) const {
    const auto t = tracked_.find(cls);
    if (t == tracked_.end() || world_.held_object() == t->second) return std::nullopt;
    const auto seen = last_seen_.find(t->second);
    if (seen == last_seen_.end()) return std::nullopt;
    const auto excl = excluded_.find(cls);
    for (Cell c : seen->second)
      if (excl == excluded_.end() || !excl->second.count(c)) return c;
    return std::nullopt;
  }

  // Ends next to and facing a map cell labelled with the class.
  void navigate_to(ClassId cls) {
    if (config_.goal_policy == GoalPolicyMode::Uniform && uniform_.grids.empty())
      uniform_ = uniform_policy(map_.width(), map_.height(), map_.num_classes());
    const SemanticPolicy& goals = config_.goal_policy == GoalPolicyMode::Uniform ? uniform_ : policy_;
    for (;;) {
      guard();
      if (const auto t = tracked_cell(cls)) {
        if (approach(*t)) {
          goal_ = *t;
          return;
        }
        excluded_[cls].insert(*t);
        continue;
      }
      const CostField field = map_field();
      const ArrivalField arrival = solve_eikonal(field, world_.agent().cell);
      GoalQuery q = query(cls);
      if (q.ignore_map) {
        // The baseline still notices a target right next to it.
        const auto near = labelled_cells_in_reach(cls);
        if (!near.empty()) {
          goal_ = near.front();
          face(*goal_);
          return;
        }
      } else if (const auto g = best_map_goal(map_, field, arrival, q)) {
        explore_goal_.reset();
        if (approach(*g)) {
          goal_ = *g;
          return;
        }
        excluded_[cls].insert(*g);
        continue;
      }
      if (explore_goal_) {
        const NavStep step = plan_step(field, world_.agent(), arrival_region(field, {*explore_goal_}, q.reach));
        if (!step.reachable) {
          excluded_[cls].insert(*explore_goal_);
          explore_goal_.reset();
        } else if (step.arrived) {
          excluded_[cls].insert(*explore_goal_);
          explore_goal_.reset();
          scan();
        } else {
          for (const auto& a : step.actions)
            if (act(a) != StepOutcome::Ok) break;
        }
        continue;
      }
      try {
        explore_goal_ = sample_policy_goal(goals, field, arrival, q, goal_rng_);
      } catch (const UnreachableError& e) {
        throw Terminate{ErrorMode::BlockingOrNotAccessible, e.what()};
      }
    }
  }

  // Turns through the headings that can bring g into view until a proposal
  // labelled with the class shows up in reach.
  int look_for(ClassId cls, Cell g, SubtaskAction use) {
    const Cell here = world_.agent().cell;
    std::vector<Heading> headings;
    if (const auto h = facing_heading(here, g)) headings.push_back(*h);
    if (g.x != here.x) headings.push_back(g.x > here.x ? Heading::E : Heading::W);
    if (g.y != here.y) headings.push_back(g.y > here.y ? Heading::S : Heading::N);
    std::vector<Heading> tried;
    for (Heading h : headings) {
      if (std::find(tried.begin(), tried.end(), h) != tried.end()) continue;
      tried.push_back(h);
      for (const auto& a : turn_actions(world_.agent().heading, h)) act(a);
      const int id = resolve_target(cls, use);
      if (id >= 0) return id;
    }
    return -1;
  }

  // Proposal in the latest observation labelled with the class and within
  // reach, or -1.
  int resolve_target(ClassId cls, SubtaskAction use) const {
    int best = -1;
    int best_rank = 0;
    double best_p = -1;
    for (size_t i = 0; i < last_obs_.proposals.size(); ++i) {
      const auto& p = last_obs_.proposals[i];
      if (last_labels_[i].hard_label != cls) continue;
      if (use == SubtaskAction::PickupObject && delivered_.count(p.object_id)) continue;
      bool in_reach = false;
      for (Cell c : p.visible_cells)
        if (chebyshev(c, world_.agent().cell) <= world_.interaction_range()) in_reach = true;
      if (!in_reach) continue;
      const auto tracked = tracked_.find(cls);
      const int rank = (tracked != tracked_.end() && tracked->second == p.object_id) ? 1 : 0;
      const double prob = last_labels_[i].probabilities[static_cast<size_t>(cls)];
      if (best < 0 || rank > best_rank || (rank == best_rank && prob > best_p)) {
        best = p.object_id;
        best_rank = rank;
        best_p = prob;
      }
    }
    return best;
  }

  static ActionType interaction_type(const Subtask& s) {
    switch (s.action) {
      case SubtaskAction::PickupObject: return ActionType::Pickup;
      case SubtaskAction::PutObject: return ActionType::Put;
      case SubtaskAction::SliceObject: return ActionType::Slice;
      case SubtaskAction::ToggleObject: return s.toggle_on ? ActionType::ToggleOn : ActionType::ToggleOff;
      case SubtaskAction::GotoLocation: break;
    }
    throw InputError("goto has no interaction");
  }

  void execute(const Program& program, const Subtask& s) {
    const ClassId cls = s.target_class;
    if (s.action == SubtaskAction::GotoLocation) {
      navigate_to(cls);
      goal_class_ = cls;
      return;
    }
    for (;;) {
      guard();
      if (!goal_ || goal_class_ != cls || chebyshev(*goal_, world_.agent().cell) > world_.interaction_range()) {
        const auto tracked = tracked_cell(cls);
        const auto near = labelled_cells_in_reach(cls);
        if (tracked && chebyshev(*tracked, world_.agent().cell) <= world_.interaction_range())
          goal_ = *tracked;
        else if (!near.empty() && !tracked)
          goal_ = near.front();
        else
          navigate_to(cls);
        goal_class_ = cls;
      }
      const int id = look_for(cls, *goal_, s.action);
      if (id < 0) {
        bad_standpoints_[*goal_].insert(world_.agent().cell);
        if (!approach(*goal_)) {
          excluded_[cls].insert(*goal_);
          goal_.reset();
        }
        continue;
      }
      const std::optional<int> held_before = world_.held_object();
      const StepOutcome out = act(Action::interact(interaction_type(s), id));
      if (out == StepOutcome::Ok) {
        if (s.action == SubtaskAction::PickupObject || s.action == SubtaskAction::SliceObject) tracked_[cls] = id;
        if (s.action == SubtaskAction::PickupObject) last_seen_.erase(id);
        // A put object rests next to the receptacle; its old sighting is stale.
        if (s.action == SubtaskAction::PutObject && held_before) last_seen_[*held_before] = {*goal_};
        if (s.action == SubtaskAction::PutObject && held_before && program.task_type == TaskType::PickTwoAndPlace &&
            cls == program.args.recep) {
          delivered_.insert(*held_before);
          tracked_.erase(program.args.obj);
        }
        return;
      }
      if (++interaction_failures_ >= config_.max_interaction_failures)
        throw Terminate{ErrorMode::InteractionFailure,
                        "interaction " + Action::interact(interaction_type(s), id).to_string() + " failed"};
      excluded_[cls].insert(*goal_);
      goal_.reset();
    }
  }

  GridWorld world_;
  const Perception& perception_;
  const SemanticPolicy& policy_;
  SemanticPolicy uniform_;
  const ExecutorConfig& config_;
  SemanticMap map_;
  Rng goal_rng_;
  EpisodeRun run_;
  Observation last_obs_;
  std::vector<SoftLabel> last_labels_;
  std::map<Cell, bool> collisions_;
  std::map<ClassId, std::set<Cell>> excluded_;
  std::map<ClassId, int> tracked_;
  std::map<int, std::vector<Cell>> last_seen_;
  std::map<Cell, std::set<Cell>> bad_standpoints_;
  std::set<int> delivered_;
  std::set<ClassId> ever_labelled_;
  std::optional<Cell> goal_;
  ClassId goal_class_ = -1;
  std::optional<Cell> explore_goal_;
  ClassId current_class_ = -1;
  int collisions_total_ = 0;
  int interaction_failures_ = 0;
  int iterations_ = 0;
  bool completed_ = false;
};

}  // namespace

const char* error_mode_name(ErrorMode m) { return kErrorModeNames[static_cast<int>(m)]; }

ErrorMode parse_error_mode(const std::string& name) {
  for (ErrorMode m : kAllErrorModes)
    if (name == error_mode_name(m)) return m;
  throw FormatError("unknown error mode '" + name + "'");
}

const char* fusion_mode_name(FusionMode m) { return m == FusionMode::Bayes ? "bayes" : "max"; }

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "bayes") return FusionMode::Bayes;
  if (name == "max") return FusionMode::Max;
  throw ConfigError("unknown fusion mode '" + name + "' (expected bayes|max)");
}

std::vector<SoftLabel> label_observation(const Observation& obs, const GridWorld& world,
                                         const Perception& perception, const ExecutorConfig& config) {
  const int nc = world.catalog().size();
  std::vector<SoftLabel> labels;
  if (config.oracle_semantics) {
    for (const auto& p : obs.proposals) labels.push_back(one_hot_label(world.object(p.object_id).class_id, nc));
    return labels;
  }
  if (obs.proposals.empty()) return labels;
  std::vector<Eigen::VectorXd> features;
  for (const auto& p : obs.proposals) features.push_back(p.feature);
  return label(features, *perception.projection, perception.embeddings->object_embeddings(world.catalog()), nc,
               config.temperature);
}

EpisodeRun run_episode(const GridWorld& world, const Program& program, const Perception& perception,
                       const SemanticPolicy& policy, const ExecutorConfig& config) {
  return Agent(world, perception, policy, config).run(program);
}

SemanticMap explore_scene(const GridWorld& world, const Perception& perception, const ExecutorConfig& config) {
  const SemanticPolicy policy = uniform_policy(world.width(), world.height(), world.catalog().size());
  return Agent(world, perception, policy, config).explore();
}

}  // namespace ecl
