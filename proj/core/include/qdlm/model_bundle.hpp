#pragma once

#include <set>
#include <vector>

#include "qdlm/classifier.hpp"
#include "qdlm/cluster_lm.hpp"
#include "qdlm/knowledge_base.hpp"
#include "qdlm/quantizer.hpp"

namespace qdlm {

inline constexpr int kBundleFormatVersion = 1;

// Everything a trained policy needs at runtime. `entity_types` is the slot
// layout the quantizer was fitted with; evaluation against a KB with extra
// entity types keeps this layout for utterance vectors and lets the extra
// types flow only into the dialog state and api_call construction.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::vector<EntityType> entity_types;
  Lexicon lexicon;
  ClusterModel clusters;
  NGramModel lm;
  LinearClassifier dubious_clf = LinearClassifier::constant("not_dubious");
  LinearClassifier disambiguation_clf = LinearClassifier::constant("ENTITY_1");
  // Clusters of user turns that accept a proposed restaurant, harvested from
  // training dialogs.
  std::set<ClusterId> affirmation_clusters;
};

}  // namespace qdlm
