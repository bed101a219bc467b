#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ecl/common/rng.hpp"
#include "ecl/map/semantic_map.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

enum class QueryKind { Exist, Count };
const char* query_kind_name(QueryKind k);
QueryKind parse_query_kind(const std::string& name);

struct ReasoningQuery {
  QueryKind kind = QueryKind::Exist;
  ClassId cls = -1;
  std::string scene;
  int truth = 0;  // 0/1 for Exist, instance count for Count

  friend bool operator==(const ReasoningQuery&, const ReasoningQuery&) = default;
};

// Exist: some observed cell has the class as argmax. Count: 8-connected
// components of such cells with at least min_component cells.
int reason(const SemanticMap& map, const ReasoningQuery& query, int min_component = 1);
int count_components(const SemanticMap& map, ClassId cls, int min_component = 1);

// Ground truth from the scene inventory (placed and held instances).
int true_answer(const GridWorld& world, QueryKind kind, ClassId cls);

// Exist queries alternate between a present and an absent class; Count
// queries draw classes whose true count lies in [0, max_count]. Classes come
// from `pool`.
std::vector<ReasoningQuery> sample_queries(const GridWorld& world, const std::string& scene,
                                           const std::vector<ClassId>& pool, int exist_queries, int count_queries,
                                           int max_count, Rng& rng);

struct ReasoningRecord {
  ReasoningQuery query;
  int answer = 0;
  bool correct() const { return answer == query.truth; }
};

std::string queries_to_jsonl(const std::vector<ReasoningQuery>& queries, const Catalog& catalog);
std::vector<ReasoningQuery> queries_from_jsonl(std::string_view text, const Catalog& catalog);
std::string reasoning_to_jsonl(const std::vector<ReasoningRecord>& records, const Catalog& catalog);

struct ReasoningSummary {
  int exist_total = 0, exist_correct = 0;
  int count_total = 0, count_correct = 0;
  double exist_accuracy() const { return exist_total ? static_cast<double>(exist_correct) / exist_total : 0.0; }
  double count_accuracy() const { return count_total ? static_cast<double>(count_correct) / count_total : 0.0; }
  std::string to_json() const;
};

ReasoningSummary summarize(const std::vector<ReasoningRecord>& records);

}  // namespace ecl
