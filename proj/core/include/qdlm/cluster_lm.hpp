#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "qdlm/quantizer.hpp"

namespace qdlm {

// Raw-count n-gram model over cluster-id sequences with longest-matching-
// suffix backoff and no discounting. Dialog starts are padded with n-1 BOS
// sentinels so the first turn is conditioned on a well-defined context.
class NGramModel {
 public:
  struct ContextCounts {
    std::map<ClusterId, std::int64_t> next;
    std::int64_t total = 0;
  };

  // `sequences` are raw per-dialog cluster sequences (no sentinels); padding
  // is applied internally. Counts are tallied for every context length
  // 0..n-1 at every real position. Throws on an empty sequence list.
  static NGramModel train(const std::vector<std::vector<ClusterId>>& sequences, int order);

  int order() const { return order_; }

  // Relative frequency of `next` under the longest suffix of `context`
  // (capped at n-1) that was observed in training. Reserved ids are never
  // continuations, so their probability is 0.
  double prob(std::span<const ClusterId> context, ClusterId next) const;

  // Full conditional distribution under the resolved context.
  std::map<ClusterId, double> predict_distribution(std::span<const ClusterId> context) const;

  // Longest observed suffix of `context`; nullptr only before training.
  const ContextCounts* resolve(std::span<const ClusterId> context) const;

  // Observed-context lookup for serialization and tests.
  const ContextCounts* counts_for(std::span<const ClusterId> context) const;
  std::vector<std::pair<std::vector<ClusterId>, const ContextCounts*>> all_contexts() const;

  void add_count(std::vector<ClusterId> context, ClusterId next, std::int64_t count);
  void set_order(int order) { order_ = order; }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<ClusterId>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (ClusterId id : v) {
        h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(id));
        h *= 1099511628211ull;
      }
      return h;
    }
  };

  int order_ = 2;
  std::unordered_map<std::vector<ClusterId>, ContextCounts, VecHash> counts_;
};

}  // namespace qdlm
