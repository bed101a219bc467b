#include "ecl/executor/policy.hpp"

#include <nlohmann/json.hpp>

#include "ecl/common/error.hpp"
#include "ecl/executor/navigation.hpp"

namespace ecl {

SemanticPolicy build_semantic_policy(const std::vector<SemanticMap>& demo_maps, double epsilon) {
  if (demo_maps.empty()) throw InputError("semantic policy needs at least one demonstration map");
  const int w = demo_maps.front().width(), h = demo_maps.front().height();
  const int nc = demo_maps.front().num_classes();
  for (const auto& m : demo_maps)
    if (m.width() != w || m.height() != h || m.num_classes() != nc)
      throw InputError("demonstration maps are not registered to one frame");
  SemanticPolicy policy;
  policy.grids.assign(static_cast<size_t>(nc), Grid<double>(w, h, 0.0));
  Grid<int> seen(w, h, 0);
  for (const auto& m : demo_maps) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Cell c{x, y};
        if (!m.cell(c).observed) continue;
        ++seen[c];
        const Eigen::VectorXd p = m.class_probabilities(c);
        for (int k = 0; k < nc; ++k) policy.grids[static_cast<size_t>(k)][c] += p[k];
      }
  }
  for (auto& g : policy.grids) {
    double total = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const int n = seen.data()[i];
      g.data()[i] = n ? g.data()[i] / n : epsilon;
      total += g.data()[i];
    }
    for (auto& v : g.data()) v /= total;
  }
  return policy;
}

SemanticPolicy uniform_policy(int width, int height, int num_classes) {
  SemanticPolicy p;
  p.grids.assign(static_cast<size_t>(num_classes), Grid<double>(width, height, 1.0 / (width * height)));
  return p;
}

std::string SemanticPolicy::to_json() const {
  nlohmann::json j;
  j["format"] = "ecl-policy v1";
  j["width"] = width();
  j["height"] = height();
  j["grids"] = nlohmann::json::array();
  for (const auto& g : grids) j["grids"].push_back(g.data());
  return j.dump() + "\n";
}

SemanticPolicy SemanticPolicy::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "ecl-policy v1") throw FormatError("not an ecl policy file");
    const int w = j.at("width"), h = j.at("height");
    SemanticPolicy p;
    for (const auto& g : j.at("grids")) {
      Grid<double> grid(w, h);
      grid.data() = g.get<std::vector<double>>();
      if (grid.data().size() != static_cast<size_t>(w) * h) throw FormatError("policy grid size mismatch");
      p.grids.push_back(std::move(grid));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("policy file: ") + e.what());
  }
}

namespace {

double region_time(const CostField& field, const ArrivalField& arrival, Cell c, double reach) {
  double best = kInf;
  for (Cell r : arrival_region(field, {c}, reach))
    if (arrival.time.in_bounds(r)) best = std::min(best, arrival.time[r]);
  return best;
}

}  // namespace

std::optional<Cell> best_map_goal(const SemanticMap& map, const CostField& field, const ArrivalField& arrival,
                                  const GoalQuery& query) {
  struct Candidate {
    Cell cell;
    double prob;
    double time;
    size_t index;
  };
  std::optional<Candidate> best;
  for (const auto& [c, p] : query_class_cells(map, query.cls)) {
    if (query.excluded.count(c)) continue;
    const double t = region_time(field, arrival, c, query.reach);
    if (t == kInf) continue;
    const Candidate cand{c, p, t, map.cells().index(c)};
    if (!best || cand.prob > best->prob ||
        (cand.prob == best->prob && (cand.time < best->time || (cand.time == best->time && cand.index < best->index))))
      best = cand;
  }
  if (!best) return std::nullopt;
  return best->cell;
}

Cell sample_policy_goal(const SemanticPolicy& policy, const CostField& field, const ArrivalField& arrival,
                        const GoalQuery& query, Rng& rng) {
  if (query.cls < 0 || query.cls >= policy.num_classes()) throw InputError("policy has no grid for class");
  const auto& grid = policy.grids[static_cast<size_t>(query.cls)];
  std::vector<double> weights = grid.data();
  for (Cell c : query.excluded)
    if (grid.in_bounds(c)) weights[grid.index(c)] = 0.0;
  for (int k = 0; k < query.resamples; ++k) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0)) break;
    std::discrete_distribution<size_t> dist(weights.begin(), weights.end());
    const size_t idx = dist(rng);
    const Cell c = grid.cell(idx);
    if (region_time(field, arrival, c, query.reach) < kInf) return c;
    weights[idx] = 0.0;
  }
  throw UnreachableError("no reachable goal for class " + std::to_string(query.cls));
}

GoalChoice select_goal(const SemanticMap& map, const SemanticPolicy& policy, const CostField& field,
                       const ArrivalField& arrival, const GoalQuery& query, Rng& rng) {
  if (!query.ignore_map)
    if (const auto c = best_map_goal(map, field, arrival, query)) return {*c, GoalSource::Map};
  return {sample_policy_goal(policy, field, arrival, query, rng), GoalSource::Policy};
}

}  // namespace ecl
