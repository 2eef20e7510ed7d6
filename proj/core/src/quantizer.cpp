#include "qdlm/quantizer.hpp"

#include <algorithm>

namespace qdlm {

BowVector BowVector::from_tokens(const TokenList& tokens) {
  BowVector v;
  std::map<std::string, int> acc;
  for (const std::string& tok : tokens) acc[tok] += 1;
  v.counts_.assign(acc.begin(), acc.end());
  for (const auto& [tok, count] : v.counts_) {
    v.key_ += tok;
    v.key_.push_back('\x01');
    v.key_ += std::to_string(count);
    v.key_.push_back('\x02');
  }
  return v;
}

BowVector encode(const DelexUtterance& utterance) {
  return BowVector::from_tokens(utterance.tokens);
}

void ClusterModel::insert_cluster(TokenList tokens) {
  BowVector v = BowVector::from_tokens(tokens);
  auto [it, inserted] = table_.emplace(v.key(), static_cast<ClusterId>(canonical_.size()));
  if (!inserted) return;
  api_call_.push_back(!tokens.empty() && tokens.front() == "api_call");
  canonical_.push_back(std::move(tokens));
}

ClusterModel ClusterModel::fit(const std::vector<std::vector<DelexUtterance>>& dialogs) {
  ClusterModel model;
  for (const std::vector<DelexUtterance>& dialog : dialogs) {
    for (const DelexUtterance& utt : dialog) {
      model.insert_cluster(utt.tokens);
    }
  }
  return model;
}

ClusterId ClusterModel::assign(const DelexUtterance& utterance) const {
  return assign(encode(utterance));
}

ClusterId ClusterModel::assign(const BowVector& vector) const {
  auto it = table_.find(vector.key());
  return it == table_.end() ? kUnkCluster : it->second;
}

bool ClusterModel::is_api_call(ClusterId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= api_call_.size()) return false;
  return api_call_[static_cast<std::size_t>(id)];
}

ClusterModel ClusterModel::from_canonicals(std::vector<TokenList> canonicals) {
  ClusterModel model;
  for (TokenList& tokens : canonicals) model.insert_cluster(std::move(tokens));
  return model;
}

}  // namespace qdlm
