#pragma once

#include <map>
#include <string>
#include <vector>

#include "qdlm/tokens.hpp"

namespace qdlm {

struct LabeledExample {
  std::string text;
  std::string label;
  bool operator==(const LabeledExample&) const = default;
};

struct ClassifierTrainOptions {
  int max_epochs = 30;
};

// Multiclass linear bag-of-words classifier trained with the averaged
// perceptron. Scoring is deterministic; argmax ties break toward the
// lexicographically smallest label.
class LinearClassifier {
 public:
  using TrainOptions = ClassifierTrainOptions;

  // Throws std::invalid_argument when fewer than two labels are present.
  static LinearClassifier train(const std::vector<LabeledExample>& examples,
                                TrainOptions options = {});

  // Degenerate classifier that always answers `label`; used when a corpus
  // yields no training data for one of the subtasks.
  static LinearClassifier constant(std::string label);

  const std::string& classify(const TokenList& tokens) const;
  const std::string& classify_text(const std::string& text) const;

  std::vector<double> scores(const TokenList& tokens) const;

  double training_accuracy(const std::vector<LabeledExample>& examples) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, std::vector<double>>& feature_weights() const {
    return weights_;
  }
  const std::vector<double>& bias() const { return bias_; }

  static LinearClassifier from_parts(std::vector<std::string> labels,
                                     std::map<std::string, std::vector<double>> weights,
                                     std::vector<double> bias);

 private:
  std::vector<std::string> labels_;  // sorted
  std::map<std::string, std::vector<double>> weights_;  // token -> per-label weight
  std::vector<double> bias_;
};

}  // namespace qdlm
