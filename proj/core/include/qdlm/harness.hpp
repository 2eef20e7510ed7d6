#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qdlm/corpus.hpp"
#include "qdlm/model_bundle.hpp"
#include "qdlm/predictor.hpp"

namespace qdlm {

struct TrainConfig {
  int ngram_order = 8;  // 7-cluster context
  int classifier_epochs = 30;
};

// Full training pass: auto-label and train the two classifiers, delexicalize
// the corpus with a replayed state tracker, fit the quantizer, train the
// n-gram model and harvest affirmation clusters. Deterministic given the
// inputs.
ModelBundle train_pipeline(const std::vector<Dialog>& corpus, const KnowledgeBase& kb,
                           const TrainConfig& config = {});

// Delexicalized view of one dialog under a replayed state tracker: user
// turns, system turns and KB result rows in turn order. Exposed for the
// quantizer's corpus-level contract and for tests.
std::vector<DelexUtterance> delexicalize_dialog(
    const Dialog& dialog, const Lexicon& lexicon, std::span<const EntityType> layout,
    const LinearClassifier& dubious_clf, const LinearClassifier& disambiguation_clf);

struct TaskStats {
  long long records = 0;
  long long correct = 0;
  long long api_records = 0;
  long long api_correct = 0;
  double accuracy() const {
    return records == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(records);
  }
  double api_accuracy() const {
    return api_records == 0
               ? 0.0
               : static_cast<double>(api_correct) / static_cast<double>(api_records);
  }
};

struct Report {
  std::map<TaskId, TaskStats> per_task;

  long long total_records() const;
  // Arithmetic mean of the per-task accuracies (tasks with records).
  double average() const;
  // Aggregate accuracy over records whose gold candidate is an api_call.
  double api_call_accuracy() const;
  long long api_call_records() const;
};

struct EvalOptions {
  bool teacher_forced = false;
  // Knowledge base the eval set was produced against; when set, its lexicon
  // is merged with the bundle's so entity values unseen in training still
  // match. The bundle's slot layout is unaffected.
  const KnowledgeBase* eval_kb = nullptr;
};

// Runs every conversation (records grouped by dialog_id, file order
// preserved; id -1 records stand alone) and tallies per-task accuracy.
Report evaluate(const ModelBundle& bundle, std::span<const EvalRecord> records,
                const EvalOptions& options = {});

// Per-record chosen indices in record order, same grouping as evaluate().
std::vector<TurnChoice> predict_choices(const ModelBundle& bundle,
                                        std::span<const EvalRecord> records,
                                        const EvalOptions& options = {});

// Fixed-width accuracy table, three decimals, one row per task plus an
// Average row.
std::string report_render(const Report& report);

// Versioned single-file JSON serialization.
void save_bundle(const ModelBundle& bundle, std::ostream& out);
void save_bundle_file(const ModelBundle& bundle, const std::string& path);
std::string bundle_to_string(const ModelBundle& bundle);
ModelBundle load_bundle(std::istream& in);
ModelBundle load_bundle_file(const std::string& path);

}  // namespace qdlm
