#include "ecl/instruct/embedding.hpp"

#include <map>
#include <nlohmann/json.hpp>

#include "ecl/common/error.hpp"
#include "ecl/common/rng.hpp"

namespace ecl {

const char* embedding_structure_name(EmbeddingStructure s) {
  return s == EmbeddingStructure::Hierarchical ? "hierarchical" : "random";
}

EmbeddingStructure parse_embedding_structure(const std::string& name) {
  if (name == "hierarchical") return EmbeddingStructure::Hierarchical;
  if (name == "random") return EmbeddingStructure::Random;
  throw ConfigError("unknown embedding structure '" + name + "'");
}

EmbeddingSet embed_classes(const Catalog& catalog, uint64_t seed, EmbeddingStructure structure,
                           int dim) {
  if (catalog.size() == 0) throw ConfigError("cannot embed an empty catalog");
  if (dim < 2) throw ConfigError("embedding dimension must be at least 2");
  Rng rng(derive_seed(seed, "embeddings"));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&] {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    return v;
  };
  EmbeddingSet set;
  set.seed = seed;
  set.structure = structure;
  std::map<std::string, Eigen::VectorXd> groups;
  for (ClassId c = 0; c < catalog.size(); ++c) {
    Eigen::VectorXd v = gaussian();
    const auto& group = catalog[c].group;
    if (structure == EmbeddingStructure::Hierarchical && !group.empty()) {
      auto it = groups.find(group);
      if (it == groups.end()) it = groups.emplace(group, gaussian()).first;
      v = std::sqrt(kGroupShare) * it->second + std::sqrt(1.0 - kGroupShare) * v;
    }
    set.embeddings.push_back({c, v.normalized()});
  }
  return set;
}

std::vector<WordEmbedding> EmbeddingSet::object_embeddings(const Catalog& catalog) const {
  std::vector<WordEmbedding> out;
  for (const auto& e : embeddings)
    if (e.class_id != catalog.background()) out.push_back(e);
  return out;
}

std::string EmbeddingSet::to_json(const Catalog& catalog) const {
  nlohmann::ordered_json j;
  j["format"] = "ecl-embeddings v1";
  j["seed"] = seed;
  j["structure"] = embedding_structure_name(structure);
  j["dim"] = dim();
  auto& arr = j["classes"] = nlohmann::ordered_json::array();
  for (const auto& e : embeddings) {
    nlohmann::ordered_json entry;
    entry["class"] = catalog[e.class_id].name;
    entry["vector"] = std::vector<double>(e.vector.data(), e.vector.data() + e.vector.size());
    arr.push_back(entry);
  }
  return j.dump(1) + "\n";
}

EmbeddingSet EmbeddingSet::from_json(const std::string& text, const Catalog& catalog) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format") != "ecl-embeddings v1") throw FormatError("embeddings: bad format tag");
  EmbeddingSet set;
  set.seed = j.at("seed").get<uint64_t>();
  set.structure = parse_embedding_structure(j.at("structure").get<std::string>());
  for (const auto& entry : j.at("classes")) {
    const auto v = entry.at("vector").get<std::vector<double>>();
    set.embeddings.push_back({catalog.require(entry.at("class").get<std::string>()),
                              Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))});
  }
  return set;
}

}  // namespace ecl
