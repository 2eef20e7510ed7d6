#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "qdlm/delexicalizer.hpp"
#include "qdlm/tokens.hpp"

namespace qdlm {

using ClusterId = std::int32_t;

// Reserved identifiers outside the dense learned range [0, cluster_count).
inline constexpr ClusterId kUnkCluster = -1;
inline constexpr ClusterId kBosCluster = -2;

// Bag-of-words multiset of an utterance's tokens. Equality (and the string
// key) is order-insensitive by construction.
class BowVector {
 public:
  static BowVector from_tokens(const TokenList& tokens);

  const std::vector<std::pair<std::string, int>>& counts() const { return counts_; }
  // Embeds tokens and counts into a flat string usable as a hash key.
  const std::string& key() const { return key_; }
  bool empty() const { return counts_.empty(); }

  bool operator==(const BowVector& other) const { return key_ == other.key_; }

 private:
  std::vector<std::pair<std::string, int>> counts_;  // sorted by token
  std::string key_;
};

BowVector encode(const DelexUtterance& utterance);

// One cluster per distinct bag-of-words vector, identifiers dense from 0 in
// first-occurrence order. The canonical representative of a cluster is the
// first utterance observed for its vector.
class ClusterModel {
 public:
  static ClusterModel fit(const std::vector<std::vector<DelexUtterance>>& dialogs);

  ClusterId assign(const DelexUtterance& utterance) const;  // kUnkCluster when unseen
  ClusterId assign(const BowVector& vector) const;

  std::size_t cluster_count() const { return canonical_.size(); }
  const TokenList& canonical(ClusterId id) const { return canonical_.at(static_cast<std::size_t>(id)); }
  // True for clusters whose canonical utterance starts with `api_call`;
  // false for reserved ids.
  bool is_api_call(ClusterId id) const;

  const std::vector<TokenList>& canonicals() const { return canonical_; }
  // Rebuilds the vector table from canonical utterances (deserialization).
  static ClusterModel from_canonicals(std::vector<TokenList> canonicals);

 private:
  void insert_cluster(TokenList tokens);

  std::unordered_map<std::string, ClusterId> table_;  // BowVector key -> id
  std::vector<TokenList> canonical_;
  std::vector<bool> api_call_;
};

}  // namespace qdlm
