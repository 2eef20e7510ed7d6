#include "qdlm/state_tracker.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace qdlm {

namespace {

constexpr const char* kDubiousLabel = "dubious";
constexpr const char* kNotDubiousLabel = "not_dubious";

std::vector<EntityMatch> matches_of_type(std::span<const EntityMatch> matches,
                                         std::string_view type_name) {
  std::vector<EntityMatch> out;
  for (const EntityMatch& m : matches) {
    if (m.type_name == type_name) out.push_back(m);
  }
  return out;
}

// Type names with at least one match, in canonical rank order.
std::vector<std::string> matched_type_names(std::span<const EntityMatch> matches) {
  std::vector<std::pair<int, std::string>> ranked;
  for (const EntityMatch& m : matches) {
    std::pair<int, std::string> entry{m.rank, m.type_name};
    if (std::find(ranked.begin(), ranked.end(), entry) == ranked.end()) {
      ranked.push_back(std::move(entry));
    }
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (auto& [rank, name] : ranked) out.push_back(std::move(name));
  return out;
}

// True when `phrase` occurs as a consecutive token run in `tokens`.
bool contains_phrase(const TokenList& tokens, const TokenList& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
      return true;
    }
  }
  return false;
}

const Turn* next_api_call_turn(const Dialog& dialog, std::size_t after) {
  for (std::size_t i = after; i < dialog.turns.size(); ++i) {
    const Turn& t = dialog.turns[i];
    if (t.kind != TurnKind::kExchange) continue;
    TokenList toks = tokenize(t.system);
    if (!toks.empty() && toks.front() == "api_call") return &t;
  }
  return nullptr;
}

}  // namespace

std::vector<LabeledExample> label_dubious(std::span<const Dialog> corpus,
                                          const Lexicon& lexicon) {
  std::vector<LabeledExample> out;
  for (const Dialog& dialog : corpus) {
    for (const Turn& turn : dialog.turns) {
      if (turn.kind != TurnKind::kExchange) continue;
      TokenList toks = tokenize(turn.user);
      std::vector<EntityMatch> matches = match_entities(toks, lexicon);
      if (matches.empty()) continue;
      bool ready = normalize(turn.system) == kReadyUtterance;
      out.push_back(LabeledExample{join_tokens(mask_entity_types(toks, matches)),
                                   ready ? kDubiousLabel : kNotDubiousLabel});
    }
  }
  return out;
}

std::vector<LabeledExample> label_disambiguation(std::span<const Dialog> corpus,
                                                 const Lexicon& lexicon) {
  std::vector<LabeledExample> out;
  for (const Dialog& dialog : corpus) {
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      const Turn& turn = dialog.turns[t];
      if (turn.kind != TurnKind::kExchange) continue;
      TokenList toks = tokenize(turn.user);
      std::vector<EntityMatch> matches = match_entities(toks, lexicon);
      for (const std::string& type_name : matched_type_names(matches)) {
        std::vector<EntityMatch> same = matches_of_type(matches, type_name);
        if (same.size() < 2) continue;
        const Turn* api_call = next_api_call_turn(dialog, t + 1);
        if (!api_call) continue;
        TokenList call_tokens = tokenize(api_call->system);
        int hit_index = 0;
        int hits = 0;
        for (std::size_t v = 0; v < same.size(); ++v) {
          if (contains_phrase(call_tokens, tokenize(same[v].value))) {
            hit_index = static_cast<int>(v) + 1;
            ++hits;
          }
        }
        if (hits != 1) continue;  // none of the mentions (or several) made the call
        out.push_back(LabeledExample{
            join_tokens(mask_same_type_entities(toks, matches, type_name)),
            "ENTITY_" + std::to_string(hit_index)});
      }
    }
  }
  return out;
}

void write_labeled_tsv(std::span<const LabeledExample> examples, std::ostream& out) {
  for (const LabeledExample& ex : examples) {
    out << ex.text << '\t' << ex.label << '\n';
  }
}

DialogState update_state(DialogState state, const std::string& user_utterance,
                         const Lexicon& lexicon, const LinearClassifier& dubious_clf,
                         const LinearClassifier& disambiguation_clf) {
  TokenList toks = tokenize(user_utterance);
  std::vector<EntityMatch> matches = match_entities(toks, lexicon);
  if (matches.empty()) return state;

  TokenList masked = mask_entity_types(toks, matches);
  if (dubious_clf.classify(masked) == kDubiousLabel) return state;

  for (const std::string& type_name : matched_type_names(matches)) {
    std::vector<EntityMatch> same = matches_of_type(matches, type_name);
    std::string value;
    if (same.size() == 1) {
      value = same[0].value;
    } else {
      const std::string& label =
          disambiguation_clf.classify(mask_same_type_entities(toks, matches, type_name));
      int index = 1;
      constexpr std::string_view kPrefix = "ENTITY_";
      if (label.size() > kPrefix.size() && label.compare(0, kPrefix.size(), kPrefix) == 0) {
        index = std::stoi(label.substr(kPrefix.size()));
      }
      if (index < 1 || index > static_cast<int>(same.size())) index = 1;
      value = same[static_cast<std::size_t>(index - 1)].value;
    }
    state.slots[type_name] = std::move(value);  // confirmed updates may overwrite
  }
  return state;
}

DialogState on_results(DialogState state, const std::vector<KbRecord>& results) {
  DelexResults delexed = delex_results(results);  // throws on empty results
  state.placeholders = std::move(delexed.placeholders);
  state.presented.clear();
  for (const KbRecord& rec : sort_for_presentation(results)) {
    state.presented.push_back(rec.name);
  }
  state.last_proposed = 0;
  state.selected_restaurant.reset();
  return state;
}

DialogState select_restaurant(DialogState state, int index) {
  if (index >= 1 && index <= static_cast<int>(state.presented.size())) {
    state.selected_restaurant = state.presented[static_cast<std::size_t>(index - 1)];
  }
  return state;
}

}  // namespace qdlm
