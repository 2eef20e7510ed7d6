#include "qdlm/predictor.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

#include "qdlm/delexicalizer.hpp"

namespace qdlm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_api_call_tokens(const TokenList& tokens) {
  return !tokens.empty() && tokens.front() == "api_call";
}

// A candidate contradicts the state when it references a restaurant slot
// other than the accepted one, or a presentation index that does not exist.
bool inconsistent_with_state(const DelexUtterance& utterance, const DialogState& state) {
  int selected_index = 0;
  if (state.selected_restaurant) {
    for (std::size_t i = 0; i < state.presented.size(); ++i) {
      if (state.presented[i] == *state.selected_restaurant) {
        selected_index = static_cast<int>(i) + 1;
        break;
      }
    }
  }
  for (const std::string& token : utterance.tokens) {
    int index = placeholder_index(token);
    if (index == 0) continue;
    if (index > static_cast<int>(state.presented.size())) return true;
    if (selected_index > 0 && index != selected_index) return true;
  }
  return false;
}

ClusterId argmax_cluster(const std::map<ClusterId, double>& dist) {
  ClusterId best = kUnkCluster;
  double best_p = -1.0;
  for (const auto& [cid, p] : dist) {
    if (p > best_p) {  // map order makes ties resolve to the smallest id
      best = cid;
      best_p = p;
    }
  }
  return best;
}

}  // namespace

ApiCall build_api_call(const DialogState& state, std::span<const EntityType> registry) {
  if (state.slots.empty()) throw std::invalid_argument("no slots to fill");
  ApiCall call;
  call.tokens.push_back("api_call");
  std::map<std::string, std::string> remaining = state.slots;
  for (const EntityType& type : registry) {
    auto it = remaining.find(type.name);
    if (it == remaining.end()) continue;
    for (std::string& tok : tokenize(it->second)) call.tokens.push_back(std::move(tok));
    remaining.erase(it);
  }
  for (const auto& [name, value] : remaining) {  // unknown types, name order
    for (std::string& tok : tokenize(value)) call.tokens.push_back(std::move(tok));
  }
  return call;
}

int word_levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

Runtime make_runtime(const ModelBundle& bundle, const KnowledgeBase* eval_kb,
                     bool teacher_forced) {
  Runtime rt;
  rt.bundle = &bundle;
  rt.lexicon = eval_kb ? bundle.lexicon.merged_with(Lexicon::from_kb(*eval_kb))
                       : bundle.lexicon;
  rt.registry = rt.lexicon.types();
  rt.teacher_forced = teacher_forced;
  return rt;
}

RankedCandidates select(const Runtime& rt, const DialogState& state,
                        std::span<const ClusterId> history,
                        std::span<const std::string> candidates) {
  if (candidates.empty()) throw std::invalid_argument("empty candidate list");
  const ModelBundle& bundle = *rt.bundle;

  std::map<ClusterId, double> dist = bundle.lm.predict_distribution(history);
  ClusterId top = argmax_cluster(dist);

  bool api_mode = bundle.clusters.is_api_call(top);
  bool api_possible = !state.slots.empty();
  if (api_mode && !api_possible) {
    std::cerr << "qdlm: api_call cluster predicted with an empty state; "
                 "falling back to non-api candidates\n";
  }

  std::vector<ScoredCandidate> scored(candidates.size());
  if (api_mode && api_possible) {
    ApiCall target = build_api_call(state, rt.registry);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      TokenList toks = tokenize(candidates[i]);
      double score = is_api_call_tokens(toks)
                         ? -static_cast<double>(word_levenshtein(toks, target.tokens))
                         : kNegInf;
      scored[i] = {static_cast<int>(i), score};
    }
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      DelexUtterance du = delex_candidate(candidates[i], state, state.placeholders);
      double score;
      if (api_mode && is_api_call_tokens(du.tokens)) {
        score = kNegInf;  // fallback path: prefer any non-api candidate
      } else {
        ClusterId cid = bundle.clusters.assign(du);
        score = cid == kUnkCluster ? 0.0 : (dist.count(cid) ? dist.at(cid) : 0.0);
        if (inconsistent_with_state(du, state)) score = 0.0;
      }
      scored[i] = {static_cast<int>(i), score};
    }
  }

  RankedCandidates out;
  out.ranking = std::move(scored);
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) {
                     return a.score > b.score;
                   });
  out.chosen = out.ranking.front().index;
  return out;
}

DialogRunResult run_dialog(const Runtime& rt, std::span<const EvalRecord> conversation) {
  DialogRunResult result;
  if (conversation.empty()) return result;
  const ModelBundle& bundle = *rt.bundle;

  DialogState state;
  std::vector<ClusterId> history(static_cast<std::size_t>(bundle.lm.order()) - 1,
                                 kBosCluster);
  std::size_t consumed = 0;       // context turns fully processed so far
  bool system_pending = false;    // turn at `consumed` already completed by us
  std::vector<KbResultLine> result_block;

  auto flush_results = [&] {
    if (result_block.empty()) return;
    std::map<std::string, std::size_t> order;
    std::vector<KbRecord> records;
    for (const KbResultLine& row : result_block) {
      auto it = order.find(row.restaurant);
      if (it == order.end()) {
        order[row.restaurant] = records.size();
        records.push_back(KbRecord{row.restaurant, {}});
        it = order.find(row.restaurant);
      }
      records[it->second].properties[row.property] = row.value;
    }
    state = on_results(state, records);
    for (const KbResultLine& row : result_block) {
      DelexUtterance du;
      du.tokens = delex_result_tokens(row, state.placeholders);
      history.push_back(bundle.clusters.assign(du));
    }
    result_block.clear();
  };

  auto process_user = [&](const std::string& user) {
    DelexUtterance du = delex_user(user, state, rt.lexicon, bundle.dubious_clf,
                                   bundle.entity_types);
    ClusterId cid = bundle.clusters.assign(du);
    if (!du.entity_vector && state.last_proposed > 0 &&
        bundle.affirmation_clusters.count(cid)) {
      state = select_restaurant(state, state.last_proposed);
    }
    state = update_state(state, user, rt.lexicon, bundle.dubious_clf,
                         bundle.disambiguation_clf);
    history.push_back(cid);
  };

  auto append_system = [&](const std::string& system) {
    DelexUtterance du = delex_system_turn(system, state, state.placeholders);
    history.push_back(bundle.clusters.assign(du));
    int proposed = proposed_restaurant_index(du.tokens);
    if (proposed > 0) state.last_proposed = proposed;
  };

  for (const EvalRecord& record : conversation) {
    if (record.context.size() < consumed + (system_pending ? 1 : 0)) {
      throw std::invalid_argument("eval records of one conversation must extend each other");
    }
    std::size_t choices_before = result.choices.size();
    for (std::size_t t = consumed; t < record.context.size(); ++t) {
      const Turn& turn = record.context[t];
      bool last = (t + 1 == record.context.size());
      if (system_pending) {
        // This exchange's system side was already filled in by selection.
        system_pending = false;
        continue;
      }
      if (turn.kind == TurnKind::kKbResult) {
        result_block.push_back(turn.result);
        continue;
      }
      flush_results();
      process_user(turn.user);
      if (!last) {
        append_system(turn.system);  // gold context replay
      } else {
        RankedCandidates ranked = select(rt, state, history, record.candidates);
        int follow = rt.teacher_forced ? record.answer_index : ranked.chosen;
        append_system(record.candidates[static_cast<std::size_t>(follow)]);
        result.choices.push_back(
            TurnChoice{ranked.chosen, ranked.ranking.front().score});
        system_pending = true;
      }
    }
    if (result.choices.size() != choices_before + 1) {
      throw std::invalid_argument("eval record context must end with a user turn");
    }
    consumed = record.context.size() - 1;
  }
  return result;
}

}  // namespace qdlm
