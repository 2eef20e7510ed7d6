#include "qdlm/knowledge_base.hpp"

#include <algorithm>
#include <array>

namespace qdlm {

const std::vector<EntityType>& known_entity_types() {
  static const std::vector<EntityType> kTypes = {
      {"cuisine_type", "CUISINE_TYPE", "R_cuisine", 0},
      {"location", "LOCATION", "R_location", 1},
      {"num_people", "NUM_PEOPLE", "R_number", 2},
      {"price_range", "PRICE_RANGE", "R_price", 3},
      {"atmosphere", "ATMOSPHERE", "R_atmosphere", 4},
      {"dietary_restriction", "DIETARY_RESTRICTION", "R_dietary", 5},
  };
  return kTypes;
}

std::span<const std::string_view> kb_presentation_properties() {
  static const std::array<std::string_view, 8> kProps = {
      "R_cuisine", "R_location", "R_number",  "R_price",
      "R_atmosphere", "R_rating", "R_address", "R_phone"};
  return kProps;
}

std::string placeholder_suffix_for_property(std::string_view kb_property) {
  static const std::map<std::string_view, std::string_view> kSuffix = {
      {"R_cuisine", "CUISINE"},   {"R_location", "LOCATION"}, {"R_number", "NUMBER"},
      {"R_price", "PRICE"},       {"R_atmosphere", "ATMOSPHERE"}, {"R_rating", "RATING"},
      {"R_address", "ADDRESS"},   {"R_phone", "PHONE"}};
  auto it = kSuffix.find(kb_property);
  return it == kSuffix.end() ? std::string() : std::string(it->second);
}

namespace {

const EntityType* type_for_property(std::string_view property) {
  for (const EntityType& t : known_entity_types()) {
    if (t.kb_property == property) return &t;
  }
  return nullptr;
}

bool is_canonical_type(const EntityType& t) {
  static const std::array<std::string_view, 5> kCanonical = {
      "cuisine_type", "location", "num_people", "price_range", "atmosphere"};
  return std::find(kCanonical.begin(), kCanonical.end(), t.name) != kCanonical.end();
}

// Canonical five keep their pinned ranks; everything else is re-ranked
// lexicographically from 5 up.
void rerank(std::vector<EntityType>& types) {
  std::vector<EntityType> canonical, extra;
  for (EntityType& t : types) {
    if (is_canonical_type(t)) {
      canonical.push_back(t);
    } else {
      extra.push_back(t);
    }
  }
  std::sort(canonical.begin(), canonical.end(),
            [](const EntityType& a, const EntityType& b) { return a.rank < b.rank; });
  std::sort(extra.begin(), extra.end(),
            [](const EntityType& a, const EntityType& b) { return a.name < b.name; });
  types.clear();
  for (EntityType& t : canonical) types.push_back(std::move(t));
  int rank = 5;
  for (EntityType& t : extra) {
    t.rank = rank++;
    types.push_back(std::move(t));
  }
}

}  // namespace

Lexicon Lexicon::from_kb(const KnowledgeBase& kb) {
  Lexicon lex;
  for (const KbRecord& rec : kb.records()) {
    for (const auto& [prop, value] : rec.properties) {
      const EntityType* type = type_for_property(prop);
      if (!type) continue;
      if (!lex.type_named(type->name)) lex.add_type(*type);
      lex.add_phrase(type->name, tokenize(value));
    }
  }
  return lex;
}

void Lexicon::add_type(const EntityType& type) {
  if (type_named(type.name)) return;
  types_.push_back(type);
  phrases_.emplace_back();
  std::vector<EntityType> reordered = types_;
  rerank(reordered);
  // Keep phrases_ aligned with the reordered type list.
  std::vector<std::set<TokenList>> phrases(reordered.size());
  for (std::size_t i = 0; i < reordered.size(); ++i) {
    for (std::size_t j = 0; j < types_.size(); ++j) {
      if (types_[j].name == reordered[i].name) phrases[i] = std::move(phrases_[j]);
    }
  }
  types_ = std::move(reordered);
  phrases_ = std::move(phrases);
}

void Lexicon::add_phrase(const std::string& type_name, TokenList phrase) {
  if (phrase.empty()) throw std::invalid_argument("empty lexicon phrase");
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i].name == type_name) {
      max_phrase_len_ = std::max(max_phrase_len_, phrase.size());
      phrases_[i].insert(std::move(phrase));
      return;
    }
  }
  throw std::invalid_argument("unknown entity type '" + type_name + "'");
}

Lexicon Lexicon::merged_with(const Lexicon& other) const {
  Lexicon out = *this;
  for (std::size_t i = 0; i < other.types_.size(); ++i) {
    if (!out.type_named(other.types_[i].name)) out.add_type(other.types_[i]);
    for (const TokenList& phrase : other.phrases_[i]) {
      out.add_phrase(other.types_[i].name, phrase);
    }
  }
  return out;
}

const EntityType* Lexicon::type_named(std::string_view name) const {
  for (const EntityType& t : types_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<EntityMatch> match_entities(const TokenList& utterance, const Lexicon& lexicon) {
  std::vector<EntityMatch> matches;
  if (lexicon.empty()) return matches;
  std::size_t i = 0;
  while (i < utterance.size()) {
    std::size_t max_len = std::min(lexicon.max_phrase_length(), utterance.size() - i);
    bool matched = false;
    for (std::size_t len = max_len; len >= 1 && !matched; --len) {
      TokenList span(utterance.begin() + static_cast<std::ptrdiff_t>(i),
                     utterance.begin() + static_cast<std::ptrdiff_t>(i + len));
      for (std::size_t t = 0; t < lexicon.types().size(); ++t) {
        if (!lexicon.phrases(t).count(span)) continue;
        const EntityType& type = lexicon.types()[t];
        matches.push_back(EntityMatch{i, i + len, type.name, type.marker,
                                      join_tokens(span), type.rank});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return matches;
}

int record_rating(const KbRecord& record) {
  auto it = record.properties.find("R_rating");
  if (it == record.properties.end()) return 0;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    return 0;
  }
}

std::vector<KbRecord> sort_for_presentation(std::vector<KbRecord> records) {
  std::sort(records.begin(), records.end(), [](const KbRecord& a, const KbRecord& b) {
    int ra = record_rating(a), rb = record_rating(b);
    if (ra != rb) return ra > rb;
    return a.name < b.name;
  });
  return records;
}

std::vector<KbRecord> query(const KnowledgeBase& kb,
                            const std::map<std::string, std::string>& slots) {
  std::vector<KbRecord> out;
  for (const KbRecord& rec : kb.records()) {
    bool ok = true;
    for (const auto& [type_name, value] : slots) {
      const EntityType* type = nullptr;
      for (const EntityType& t : known_entity_types()) {
        if (t.name == type_name) {
          type = &t;
          break;
        }
      }
      if (!type) {
        ok = false;
        break;
      }
      auto it = rec.properties.find(type->kb_property);
      if (it == rec.properties.end() || normalize(it->second) != normalize(value)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(rec);
  }
  return sort_for_presentation(std::move(out));
}

}  // namespace qdlm
