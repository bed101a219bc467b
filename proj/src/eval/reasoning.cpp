#include "ecl/eval/reasoning.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ecl/common/error.hpp"

namespace ecl {

using nlohmann::ordered_json;

const char* query_kind_name(QueryKind k) { return k == QueryKind::Exist ? "exist" : "count"; }

QueryKind parse_query_kind(const std::string& name) {
  if (name == "exist") return QueryKind::Exist;
  if (name == "count") return QueryKind::Count;
  throw FormatError("unknown query kind '" + name + "'");
}

int count_components(const SemanticMap& map, ClassId cls, int min_component) {
  Grid<uint8_t> member(map.width(), map.height(), 0);
  for (const auto& [c, p] : query_class_cells(map, cls)) member[c] = 1;
  Grid<uint8_t> seen(map.width(), map.height(), 0);
  int components = 0;
  std::vector<Cell> stack;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!member[{x, y}] || seen[{x, y}]) continue;
      int size = 0;
      stack.push_back({x, y});
      seen[{x, y}] = 1;
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++size;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell n{c.x + dx, c.y + dy};
            if (!map.in_bounds(n) || !member[n] || seen[n]) continue;
            seen[n] = 1;
            stack.push_back(n);
          }
      }
      if (size >= min_component) ++components;
    }
  return components;
}

int reason(const SemanticMap& map, const ReasoningQuery& query, int min_component) {
  if (query.kind == QueryKind::Exist) return query_class_cells(map, query.cls).empty() ? 0 : 1;
  return count_components(map, query.cls, min_component);
}

int true_answer(const GridWorld& world, QueryKind kind, ClassId cls) {
  const int n = static_cast<int>(
      std::count_if(world.objects().begin(), world.objects().end(), [&](const auto& o) { return o.class_id == cls; }));
  return kind == QueryKind::Exist ? (n > 0 ? 1 : 0) : n;
}

std::vector<ReasoningQuery> sample_queries(const GridWorld& world, const std::string& scene,
                                           const std::vector<ClassId>& pool, int exist_queries, int count_queries,
                                           int max_count, Rng& rng) {
  std::vector<ClassId> present, absent, countable;
  for (ClassId c : pool) {
    const int n = true_answer(world, QueryKind::Count, c);
    (n > 0 ? present : absent).push_back(c);
    if (n <= max_count) countable.push_back(c);
  }
  auto draw = [&](const std::vector<ClassId>& v) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<ReasoningQuery> out;
  for (int i = 0; i < exist_queries; ++i) {
    const bool want_present = i % 2 == 0;
    const auto& from = (want_present && !present.empty()) || absent.empty() ? present : absent;
    if (from.empty()) break;
    const ClassId c = draw(from);
    out.push_back({QueryKind::Exist, c, scene, true_answer(world, QueryKind::Exist, c)});
  }
  for (int i = 0; i < count_queries && !countable.empty(); ++i) {
    const ClassId c = draw(countable);
    out.push_back({QueryKind::Count, c, scene, true_answer(world, QueryKind::Count, c)});
  }
  return out;
}

namespace {

ordered_json query_json(const ReasoningQuery& q, const Catalog& catalog) {
  ordered_json j;
  j["scene"] = q.scene;
  j["kind"] = query_kind_name(q.kind);
  j["class"] = catalog[q.cls].name;
  j["truth"] = q.truth;
  return j;
}

}  // namespace

std::string queries_to_jsonl(const std::vector<ReasoningQuery>& queries, const Catalog& catalog) {
  std::string out;
  for (const auto& q : queries) out += query_json(q, catalog).dump() + "\n";
  return out;
}

std::vector<ReasoningQuery> queries_from_jsonl(std::string_view text, const Catalog& catalog) {
  std::vector<ReasoningQuery> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ReasoningQuery q;
      q.scene = j.at("scene").get<std::string>();
      q.kind = parse_query_kind(j.at("kind").get<std::string>());
      q.cls = catalog.require(j.at("class").get<std::string>());
      q.truth = j.at("truth").get<int>();
      if (q.truth < 0) throw InputError("negative answer");
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("query line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError("query line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string reasoning_to_jsonl(const std::vector<ReasoningRecord>& records, const Catalog& catalog) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j = query_json(r.query, catalog);
    j["answer"] = r.answer;
    j["correct"] = r.correct();
    out += j.dump() + "\n";
  }
  return out;
}

ReasoningSummary summarize(const std::vector<ReasoningRecord>& records) {
  ReasoningSummary s;
  for (const auto& r : records) {
    if (r.query.kind == QueryKind::Exist) {
      ++s.exist_total;
      s.exist_correct += r.correct();
    } else {
      ++s.count_total;
      s.count_correct += r.correct();
    }
  }
  return s;
}

std::string ReasoningSummary::to_json() const {
  ordered_json j;
  j["format"] = "ecl-reasoning v1";
  j["exist"] = {{"total", exist_total}, {"correct", exist_correct}, {"accuracy", exist_accuracy()}};
  j["count"] = {{"total", count_total}, {"correct", count_correct}, {"accuracy", count_accuracy()}};
  return j.dump(2) + "\n";
}

}  // namespace ecl
