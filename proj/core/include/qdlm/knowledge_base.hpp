#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdlm/corpus.hpp"
#include "qdlm/tokens.hpp"

namespace qdlm {

// A user-requirement slot type. `marker` is the uppercase token used in
// delexicalized utterances; `kb_property` is the KB column the values of this
// type come from. The first five ranks are fixed; additional types get ranks
// >= 5 in lexicographic order of name.
struct EntityType {
  std::string name;
  std::string marker;
  std::string kb_property;
  int rank = 0;
  bool operator==(const EntityType&) const = default;
};

// The slot types this domain knows how to map to KB properties.
const std::vector<EntityType>& known_entity_types();

// KB properties in presentation order for result rows.
std::span<const std::string_view> kb_presentation_properties();

// Placeholder suffix for a KB property (R_cuisine -> CUISINE); empty if the
// property has no placeholder.
std::string placeholder_suffix_for_property(std::string_view kb_property);

// Entity value inventories per type, with values tokenized as phrases.
// Lookup is over lowercase tokens; multi-token values match as phrases.
class Lexicon {
 public:
  // Builds a lexicon from every KB value whose property maps to a known
  // entity type.
  static Lexicon from_kb(const KnowledgeBase& kb);

  void add_type(const EntityType& type);
  void add_phrase(const std::string& type_name, TokenList phrase);

  // Union of two lexicons; extra types are re-ranked lexicographically.
  Lexicon merged_with(const Lexicon& other) const;

  const std::vector<EntityType>& types() const { return types_; }
  const EntityType* type_named(std::string_view name) const;
  const std::set<TokenList>& phrases(std::size_t type_index) const {
    return phrases_[type_index];
  }
  bool empty() const { return types_.empty(); }
  std::size_t max_phrase_length() const { return max_phrase_len_; }

 private:
  std::vector<EntityType> types_;  // rank order
  std::vector<std::set<TokenList>> phrases_;
  std::size_t max_phrase_len_ = 0;
};

struct EntityMatch {
  std::size_t begin = 0;  // token span [begin, end)
  std::size_t end = 0;
  std::string type_name;
  std::string marker;
  std::string value;  // matched phrase, tokens joined by spaces
  int rank = 0;
};

// All non-overlapping lexicon matches, longest-match-first, left to right.
// Expects a lowercased token list.
std::vector<EntityMatch> match_entities(const TokenList& utterance, const Lexicon& lexicon);

// Records satisfying every slot (entity type name -> value), ordered by
// rating descending, name ascending. Unknown slot types match nothing.
std::vector<KbRecord> query(const KnowledgeBase& kb,
                            const std::map<std::string, std::string>& slots);

// Rating-descending, name-ascending presentation order.
std::vector<KbRecord> sort_for_presentation(std::vector<KbRecord> records);

int record_rating(const KbRecord& record);  // 0 when absent or malformed

}  // namespace qdlm
