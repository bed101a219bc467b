#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ecl/world/catalog.hpp"

namespace ecl {

// Hierarchical: classes of one semantic group share a component, so that
// their vectors are closer than unrelated ones. Random: independent draws.
enum class EmbeddingStructure { Hierarchical, Random };

const char* embedding_structure_name(EmbeddingStructure s);
EmbeddingStructure parse_embedding_structure(const std::string& name);

struct WordEmbedding {
  ClassId class_id = -1;
  Eigen::VectorXd vector;  // unit norm
};

struct EmbeddingSet {
  uint64_t seed = 0;
  EmbeddingStructure structure = EmbeddingStructure::Hierarchical;
  std::vector<WordEmbedding> embeddings;  // one per catalog class, by class id

  int dim() const { return embeddings.empty() ? 0 : static_cast<int>(embeddings.front().vector.size()); }

  // Embeddings of the non-background classes.
  std::vector<WordEmbedding> object_embeddings(const Catalog& catalog) const;

  std::string to_json(const Catalog& catalog) const;
  static EmbeddingSet from_json(const std::string& text, const Catalog& catalog);
};

// Share of a class vector's variance owned by its group under Hierarchical.
inline constexpr double kGroupShare = 0.5;

EmbeddingSet embed_classes(const Catalog& catalog, uint64_t seed, EmbeddingStructure structure,
                           int dim = 32);

}  // namespace ecl
