#include "qdlm/delexicalizer.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace qdlm {

namespace {

// Ratings are numeric and collide across restaurants, so they never enter
// the placeholder map; the rows still rewrite them positionally.
bool property_bindable(std::string_view property) { return property != "R_rating"; }

struct SubstitutionRule {
  TokenList phrase;
  std::string replacement;
};

TokenList substitute_spans(const TokenList& tokens, std::vector<SubstitutionRule> rules) {
  std::sort(rules.begin(), rules.end(), [](const SubstitutionRule& a, const SubstitutionRule& b) {
    if (a.phrase.size() != b.phrase.size()) return a.phrase.size() > b.phrase.size();
    return a.phrase < b.phrase;
  });
  TokenList out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool replaced = false;
    for (const SubstitutionRule& rule : rules) {
      std::size_t len = rule.phrase.size();
      if (len == 0 || i + len > tokens.size()) continue;
      if (std::equal(rule.phrase.begin(), rule.phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        out.push_back(rule.replacement);
        i += len;
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

std::vector<SubstitutionRule> state_value_rules(const DialogState& state) {
  std::vector<SubstitutionRule> rules;
  for (const auto& [type_name, value] : state.slots) {
    rules.push_back({tokenize(value), type_marker(type_name)});
  }
  return rules;
}

std::vector<SubstitutionRule> placeholder_rules(const PlaceholderMap& placeholders) {
  std::vector<SubstitutionRule> rules;
  for (const auto& [placeholder, surface] : placeholders.bindings()) {
    rules.push_back({tokenize(surface), placeholder});
  }
  return rules;
}

DelexUtterance delex_with_rules(const std::string& utterance, const DialogState& state,
                                const PlaceholderMap& placeholders, bool substitute_api_call) {
  DelexUtterance out;
  out.tokens = tokenize(utterance);
  bool is_api_call = !out.tokens.empty() && out.tokens.front() == "api_call";
  if (is_api_call && !substitute_api_call) return out;
  std::vector<SubstitutionRule> rules = placeholder_rules(placeholders);
  for (SubstitutionRule& rule : state_value_rules(state)) rules.push_back(std::move(rule));
  out.tokens = substitute_spans(out.tokens, std::move(rules));
  return out;
}

}  // namespace

std::string type_marker(const std::string& type_name) {
  for (const EntityType& t : known_entity_types()) {
    if (t.name == type_name) return t.marker;
  }
  std::string marker = type_name;
  for (char& c : marker) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return marker;
}

DelexUtterance delex_user(const std::string& utterance, const DialogState& state,
                          const Lexicon& lexicon, const LinearClassifier& dubious_clf,
                          std::span<const EntityType> layout) {
  DelexUtterance out;
  out.tokens = tokenize(utterance);
  std::vector<EntityMatch> matches = match_entities(out.tokens, lexicon);
  if (matches.empty()) return out;

  TokenList masked = mask_entity_types(out.tokens, matches);
  bool dubious = dubious_clf.classify(masked) == "dubious";

  out.entity_vector = true;
  out.tokens.clear();
  out.markers.reserve(layout.size());
  for (const EntityType& type : layout) {
    SlotMarker marker = SlotMarker::kNone;
    if (state.slots.count(type.name)) {
      marker = SlotMarker::kTypePresent;
    } else {
      bool matched_here = std::any_of(matches.begin(), matches.end(), [&](const EntityMatch& m) {
        return m.type_name == type.name;
      });
      if (matched_here) marker = dubious ? SlotMarker::kDubious : SlotMarker::kTypePresent;
    }
    out.markers.push_back(marker);
    switch (marker) {
      case SlotMarker::kTypePresent: out.tokens.push_back(type.marker); break;
      case SlotMarker::kDubious: out.tokens.push_back(kDubiousMarkerToken); break;
      case SlotMarker::kNone: out.tokens.push_back(kNoneMarkerToken); break;
    }
  }
  return out;
}

DelexResults delex_results(std::vector<KbRecord> results) {
  if (results.empty()) throw std::invalid_argument("no results to delexicalize");
  std::vector<KbRecord> sorted = sort_for_presentation(std::move(results));

  DelexResults out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    int index = static_cast<int>(i) + 1;
    const KbRecord& rec = sorted[i];
    out.placeholders.bind(make_placeholder(index, "NAME"), normalize(rec.name));
    for (std::string_view prop : kb_presentation_properties()) {
      auto it = rec.properties.find(std::string(prop));
      if (it == rec.properties.end()) continue;
      if (property_bindable(prop)) {
        out.placeholders.bind(make_placeholder(index, placeholder_suffix_for_property(prop)),
                              normalize(it->second));
      }
    }
  }
  for (const KbRecord& rec : sorted) {
    for (std::string_view prop : kb_presentation_properties()) {
      auto it = rec.properties.find(std::string(prop));
      if (it == rec.properties.end()) continue;
      out.lines.push_back(delex_result_tokens(
          KbResultLine{rec.name, std::string(prop), it->second}, out.placeholders));
    }
  }
  return out;
}

TokenList delex_result_tokens(const KbResultLine& row, const PlaceholderMap& placeholders) {
  TokenList out;
  std::optional<std::string> name_placeholder = placeholders.placeholder_for(normalize(row.restaurant));
  int index = 0;
  if (name_placeholder) {
    index = placeholder_index(*name_placeholder);
    out.push_back(*name_placeholder);
  } else {
    for (std::string& tok : tokenize(row.restaurant)) out.push_back(std::move(tok));
  }
  out.push_back(row.property);
  std::string suffix = placeholder_suffix_for_property(row.property);
  if (index > 0 && !suffix.empty()) {
    out.push_back(make_placeholder(index, suffix));
  } else {
    for (std::string& tok : tokenize(row.value)) out.push_back(std::move(tok));
  }
  return out;
}

DelexUtterance delex_candidate(const std::string& candidate, const DialogState& state,
                               const PlaceholderMap& placeholders) {
  return delex_with_rules(candidate, state, placeholders, /*substitute_api_call=*/false);
}

DelexUtterance delex_system_turn(const std::string& utterance, const DialogState& state,
                                 const PlaceholderMap& placeholders) {
  return delex_with_rules(utterance, state, placeholders, /*substitute_api_call=*/true);
}

TokenList mask_entity_types(const TokenList& tokens, std::span<const EntityMatch> matches) {
  TokenList out;
  std::size_t i = 0;
  std::size_t m = 0;
  while (i < tokens.size()) {
    if (m < matches.size() && matches[m].begin == i) {
      out.push_back(matches[m].marker);
      i = matches[m].end;
      ++m;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

int proposed_restaurant_index(const TokenList& tokens) {
  for (const std::string& token : tokens) {
    std::string suffix;
    int index = placeholder_index(token, &suffix);
    if (index > 0 && suffix == "NAME") return index;
  }
  return 0;
}

TokenList mask_same_type_entities(const TokenList& tokens,
                                  std::span<const EntityMatch> matches,
                                  std::string_view type_name) {
  TokenList out;
  std::size_t i = 0;
  std::size_t m = 0;
  int entity_counter = 0;
  while (i < tokens.size()) {
    if (m < matches.size() && matches[m].begin == i) {
      if (matches[m].type_name == type_name) {
        out.push_back("ENTITY_" + std::to_string(++entity_counter));
      } else {
        out.push_back(matches[m].marker);
      }
      i = matches[m].end;
      ++m;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace qdlm
