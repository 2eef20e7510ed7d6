#include "qdlm/classifier.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qdlm {

namespace {

std::vector<std::pair<std::size_t, double>> sparse_counts(
    const TokenList& tokens, const std::map<std::string, std::size_t>& vocab) {
  std::map<std::size_t, double> acc;
  for (const std::string& tok : tokens) {
    auto it = vocab.find(tok);
    if (it != vocab.end()) acc[it->second] += 1.0;
  }
  return {acc.begin(), acc.end()};
}

}  // namespace

LinearClassifier LinearClassifier::train(const std::vector<LabeledExample>& examples,
                                         TrainOptions options) {
  std::set<std::string> label_set;
  for (const LabeledExample& ex : examples) label_set.insert(ex.label);
  if (label_set.size() < 2) {
    throw std::invalid_argument("classifier training needs at least two classes");
  }

  LinearClassifier clf;
  clf.labels_.assign(label_set.begin(), label_set.end());
  const std::size_t n_labels = clf.labels_.size();

  std::map<std::string, std::size_t> vocab;
  std::vector<std::string> vocab_tokens;
  std::vector<std::pair<std::vector<std::pair<std::size_t, double>>, std::size_t>> data;
  data.reserve(examples.size());
  for (const LabeledExample& ex : examples) {
    TokenList toks = tokenize(ex.text);
    for (const std::string& tok : toks) {
      if (!vocab.count(tok)) {
        vocab[tok] = vocab_tokens.size();
        vocab_tokens.push_back(tok);
      }
    }
    std::size_t label_idx = static_cast<std::size_t>(
        std::lower_bound(clf.labels_.begin(), clf.labels_.end(), ex.label) -
        clf.labels_.begin());
    data.emplace_back(sparse_counts(toks, vocab), label_idx);
  }

  const std::size_t dim = vocab_tokens.size() + 1;  // + bias
  std::vector<std::vector<double>> w(n_labels, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> u(n_labels, std::vector<double>(dim, 0.0));
  double counter = 1.0;

  auto predict = [&](const std::vector<std::pair<std::size_t, double>>& x) {
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t l = 0; l < n_labels; ++l) {
      double s = w[l][dim - 1];
      for (const auto& [fi, fv] : x) s += w[l][fi] * fv;
      if (l == 0 || s > best_score) {
        best = l;
        best_score = s;
      }
    }
    return best;
  };

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    int mistakes = 0;
    for (const auto& [x, gold] : data) {
      std::size_t pred = predict(x);
      if (pred != gold) {
        ++mistakes;
        for (const auto& [fi, fv] : x) {
          w[gold][fi] += fv;
          u[gold][fi] += counter * fv;
          w[pred][fi] -= fv;
          u[pred][fi] -= counter * fv;
        }
        w[gold][dim - 1] += 1.0;
        u[gold][dim - 1] += counter;
        w[pred][dim - 1] -= 1.0;
        u[pred][dim - 1] -= counter;
      }
      counter += 1.0;
    }
    if (mistakes == 0) break;
  }

  // Averaged weights: w_avg = w - u / counter.
  clf.bias_.resize(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) {
    clf.bias_[l] = w[l][dim - 1] - u[l][dim - 1] / counter;
    for (std::size_t f = 0; f + 1 < dim; ++f) {
      double avg = w[l][f] - u[l][f] / counter;
      if (avg != 0.0) {
        auto& vec = clf.weights_[vocab_tokens[f]];
        if (vec.empty()) vec.resize(n_labels, 0.0);
        vec[l] = avg;
      }
    }
  }
  return clf;
}

LinearClassifier LinearClassifier::constant(std::string label) {
  LinearClassifier clf;
  clf.labels_.push_back(std::move(label));
  clf.bias_.push_back(0.0);
  return clf;
}

std::vector<double> LinearClassifier::scores(const TokenList& tokens) const {
  std::vector<double> s = bias_;
  for (const std::string& tok : tokens) {
    auto it = weights_.find(tok);
    if (it == weights_.end()) continue;
    for (std::size_t l = 0; l < s.size(); ++l) s[l] += it->second[l];
  }
  return s;
}

const std::string& LinearClassifier::classify(const TokenList& tokens) const {
  std::vector<double> s = scores(tokens);
  std::size_t best = 0;
  for (std::size_t l = 1; l < s.size(); ++l) {
    if (s[l] > s[best]) best = l;  // ties keep the smaller (lexicographic) label
  }
  return labels_[best];
}

const std::string& LinearClassifier::classify_text(const std::string& text) const {
  TokenList toks = tokenize(text);
  return classify(toks);
}

double LinearClassifier::training_accuracy(const std::vector<LabeledExample>& examples) const {
  if (examples.empty()) return 1.0;
  std::size_t correct = 0;
  for (const LabeledExample& ex : examples) {
    if (classify_text(ex.text) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

LinearClassifier LinearClassifier::from_parts(
    std::vector<std::string> labels, std::map<std::string, std::vector<double>> weights,
    std::vector<double> bias) {
  LinearClassifier clf;
  clf.labels_ = std::move(labels);
  clf.weights_ = std::move(weights);
  clf.bias_ = std::move(bias);
  return clf;
}

}  // namespace qdlm
