#include "qdlm/cluster_lm.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdlm {

NGramModel NGramModel::train(const std::vector<std::vector<ClusterId>>& sequences, int order) {
  if (order < 2) throw std::invalid_argument("n-gram order must be >= 2");
  if (sequences.empty()) throw std::invalid_argument("no sequences to train on");

  NGramModel model;
  model.order_ = order;
  const std::size_t pad = static_cast<std::size_t>(order) - 1;
  std::vector<ClusterId> padded;
  for (const std::vector<ClusterId>& seq : sequences) {
    padded.assign(pad, kBosCluster);
    padded.insert(padded.end(), seq.begin(), seq.end());
    for (std::size_t i = pad; i < padded.size(); ++i) {
      ClusterId next = padded[i];
      for (std::size_t k = 0; k <= pad; ++k) {
        std::vector<ClusterId> context(padded.begin() + static_cast<std::ptrdiff_t>(i - k),
                                       padded.begin() + static_cast<std::ptrdiff_t>(i));
        ContextCounts& cc = model.counts_[std::move(context)];
        cc.next[next] += 1;
        cc.total += 1;
      }
    }
  }
  return model;
}

const NGramModel::ContextCounts* NGramModel::resolve(std::span<const ClusterId> context) const {
  std::size_t max_len = std::min(context.size(), static_cast<std::size_t>(order_) - 1);
  for (std::size_t len = max_len + 1; len-- > 0;) {
    std::vector<ClusterId> suffix(context.end() - static_cast<std::ptrdiff_t>(len),
                                  context.end());
    auto it = counts_.find(suffix);
    if (it != counts_.end() && it->second.total > 0) return &it->second;
  }
  return nullptr;
}

double NGramModel::prob(std::span<const ClusterId> context, ClusterId next) const {
  if (next == kUnkCluster || next == kBosCluster) return 0.0;
  const ContextCounts* cc = resolve(context);
  if (!cc) return 0.0;
  auto it = cc->next.find(next);
  if (it == cc->next.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(cc->total);
}

std::map<ClusterId, double> NGramModel::predict_distribution(
    std::span<const ClusterId> context) const {
  std::map<ClusterId, double> dist;
  const ContextCounts* cc = resolve(context);
  if (!cc) return dist;
  for (const auto& [next, count] : cc->next) {
    dist[next] = static_cast<double>(count) / static_cast<double>(cc->total);
  }
  return dist;
}

const NGramModel::ContextCounts* NGramModel::counts_for(
    std::span<const ClusterId> context) const {
  std::vector<ClusterId> key(context.begin(), context.end());
  auto it = counts_.find(key);
  return it == counts_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::vector<ClusterId>, const NGramModel::ContextCounts*>>
NGramModel::all_contexts() const {
  std::vector<std::pair<std::vector<ClusterId>, const ContextCounts*>> out;
  out.reserve(counts_.size());
  for (const auto& [context, cc] : counts_) out.emplace_back(context, &cc);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void NGramModel::add_count(std::vector<ClusterId> context, ClusterId next,
                           std::int64_t count) {
  ContextCounts& cc = counts_[std::move(context)];
  cc.next[next] += count;
  cc.total += count;
}

}  // namespace qdlm
