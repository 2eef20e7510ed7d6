#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdlm/classifier.hpp"
#include "qdlm/dialog_state.hpp"
#include "qdlm/knowledge_base.hpp"
#include "qdlm/tokens.hpp"

namespace qdlm {

enum class SlotMarker { kNone, kTypePresent, kDubious };

inline constexpr const char* kNoneMarkerToken = "NONE";
inline constexpr const char* kDubiousMarkerToken = "DUBIOUS";

// A preprocessed utterance: either the (placeholder-rewritten, lowercased)
// token sequence, or an entity-type vector rendered as marker tokens in
// canonical slot order.
struct DelexUtterance {
  TokenList tokens;
  bool entity_vector = false;
  std::vector<SlotMarker> markers;  // aligned with the layout when entity_vector

  std::string text() const { return join_tokens(tokens); }
  bool operator==(const DelexUtterance&) const = default;
};

// Uppercase marker token for an entity type name.
std::string type_marker(const std::string& type_name);

// User-utterance preprocessing. An utterance is turned into an entity-type
// vector iff the matcher finds at least one entity in it; otherwise it stays
// verbatim. Vector slots follow `layout` order: a slot is TYPE_PRESENT when
// the type is already in the state or confirmed by this utterance, DUBIOUS
// when the type was detected here but the utterance is classified as hedged,
// NONE otherwise. Types matched in the utterance but absent from `layout`
// do not appear in the vector.
DelexUtterance delex_user(const std::string& utterance, const DialogState& state,
                          const Lexicon& lexicon, const LinearClassifier& dubious_clf,
                          std::span<const EntityType> layout);

struct DelexResults {
  std::vector<TokenList> lines;  // one per (restaurant, property) row
  PlaceholderMap placeholders;
};

// Rewrites api_call results for presentation: the i-th restaurant by rating
// (descending, names ascending on ties) becomes RESTAURANT_<i>_NAME and each
// property value RESTAURANT_<i>_<PROPERTY>. Ratings are rewritten in the
// rows but excluded from the placeholder map; surfaces that collide with an
// earlier binding keep the earlier one.
DelexResults delex_results(std::vector<KbRecord> results);

// Delexicalizes one KB result row using an existing placeholder map.
TokenList delex_result_tokens(const KbResultLine& row, const PlaceholderMap& placeholders);

// Candidate preprocessing: placeholder-map surfaces become placeholders and
// state values become type markers. api_call candidates are returned
// verbatim; they are ranked by edit distance, not cluster probability.
DelexUtterance delex_candidate(const std::string& candidate, const DialogState& state,
                               const PlaceholderMap& placeholders);

// System-turn preprocessing for history and training sequences. Same as
// delex_candidate except api_call utterances also get their slot values
// rewritten to type markers, which keeps api_call turns in a closed
// vocabulary regardless of the entity values in play.
DelexUtterance delex_system_turn(const std::string& utterance, const DialogState& state,
                                 const PlaceholderMap& placeholders);

// Replaces matched entity spans with their type markers.
TokenList mask_entity_types(const TokenList& tokens, std::span<const EntityMatch> matches);

// Replaces spans of `type_name` with ENTITY_1..ENTITY_k left to right and
// spans of other types with their type markers.
TokenList mask_same_type_entities(const TokenList& tokens,
                                  std::span<const EntityMatch> matches,
                                  std::string_view type_name);

// Index i when the tokens reference RESTAURANT_<i>_NAME (a proposal), else 0.
int proposed_restaurant_index(const TokenList& tokens);

}  // namespace qdlm
