#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdlm/corpus.hpp"
#include "qdlm/dialog_state.hpp"
#include "qdlm/model_bundle.hpp"
#include "qdlm/state_tracker.hpp"

namespace qdlm {

struct ApiCall {
  TokenList tokens;  // "api_call" followed by slot values in canonical rank order
  std::string text() const { return join_tokens(tokens); }
};

// Fills an api_call from the state's key-value pairs, one slot per pair,
// ordered by entity-type rank. Throws when the state has no slots.
ApiCall build_api_call(const DialogState& state, std::span<const EntityType> registry);

// Minimum insertions + deletions + substitutions between token sequences.
int word_levenshtein(std::span<const std::string> a, std::span<const std::string> b);

struct ScoredCandidate {
  int index = 0;
  double score = 0.0;
};

struct RankedCandidates {
  std::vector<ScoredCandidate> ranking;  // score descending, ties by index
  int chosen = 0;
};

// Shared evaluation context: the trained bundle plus the effective lexicon
// and entity-type registry (the bundle's own, optionally merged with the
// current knowledge base's).
struct Runtime {
  const ModelBundle* bundle = nullptr;
  Lexicon lexicon;
  std::vector<EntityType> registry;
  bool teacher_forced = false;
};

Runtime make_runtime(const ModelBundle& bundle, const KnowledgeBase* eval_kb = nullptr,
                     bool teacher_forced = false);

// Scores candidates against the next-cluster distribution. When the argmax
// cluster is an api_call cluster, api_call candidates are ranked by negated
// word-level edit distance to the call constructed from the state and all
// other candidates drop to -inf; otherwise each candidate is delexicalized,
// assigned a cluster and scored by that cluster's probability, with
// state-inconsistent candidates demoted to 0. Ties break toward the
// smallest candidate index.
RankedCandidates select(const Runtime& rt, const DialogState& state,
                        std::span<const ClusterId> history,
                        std::span<const std::string> candidates);

struct TurnChoice {
  int chosen = 0;
  double score = 0.0;
};

struct DialogRunResult {
  std::vector<TurnChoice> choices;  // one per record, in order
};

// Threads the dialog state and cluster history through one conversation's
// records. The history grows with the system's own chosen candidates
// (closed loop) unless the runtime asks for teacher forcing.
DialogRunResult run_dialog(const Runtime& rt, std::span<const EvalRecord> conversation);

}  // namespace qdlm
