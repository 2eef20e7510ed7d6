#include "qdlm/synthgen.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "qdlm/dialog_state.hpp"
#include "qdlm/predictor.hpp"
#include "qdlm/rng.hpp"
#include "qdlm/tokens.hpp"

namespace qdlm {

namespace {

using Combo = std::map<std::string, std::string>;
using Inventories = std::map<std::string, std::vector<std::string>>;

// ---------------------------------------------------------------------------
// Phrase inventory. The oov inventories are disjoint from the base ones so a
// model trained on the base variant never sees these surface forms.
// ---------------------------------------------------------------------------

Inventories base_inventories() {
  return {
      {"cuisine_type", {"spanish", "italian", "indian", "french", "thai", "korean",
                        "british", "japanese"}},
      {"location", {"bombay", "paris", "london", "madrid", "rome", "seoul", "tokyo",
                    "berlin"}},
      {"num_people", {"two", "four", "six", "eight"}},
      {"price_range", {"cheap", "moderate", "expensive"}},
      {"atmosphere", {"business", "casual", "romantic", "festive"}},
      {"dietary_restriction", {"vegan", "vegetarian", "kosher", "halal"}},
  };
}

Inventories oov_inventories() {
  return {
      {"cuisine_type", {"lebanese", "persian", "ethiopian", "basque", "middle eastern",
                        "peruvian", "malaysian", "georgian"}},
      {"location", {"oslo", "cairo", "lima", "dublin", "athens", "prague", "dakar",
                    "quito"}},
      {"num_people", {"three", "five", "seven", "nine"}},
      {"price_range", {"budget", "premium", "lavish"}},
      {"atmosphere", {"cozy", "lively", "quiet", "elegant"}},
      {"dietary_restriction", {"pescatarian", "gluten free", "paleo", "organic"}},
  };
}

bool variant_has_dietary(Variant v) {
  return v == Variant::kExtraEntity || v == Variant::kOovAndExtra;
}

bool variant_is_oov(Variant v) {
  return v == Variant::kOovKb || v == Variant::kOovAndExtra;
}

// ---------------------------------------------------------------------------
// Templates. {} / {1} / {2} are value slots. Wordings are chosen so that the
// hedging and disambiguation labels stay linearly separable over bags of
// words: each template family carries cue words of its own.
// ---------------------------------------------------------------------------

const std::vector<std::string>& greet_users() {
  static const std::vector<std::string> v = {"hello", "good morning", "hi"};
  return v;
}

constexpr const char* kGreetReply = "hello what can i help you with today";
constexpr const char* kOnIt = "i am on it";
constexpr const char* kOkLet = "ok let me look into some options";
constexpr const char* kReady = "whenever you're ready";
constexpr const char* kSureElse = "sure is there anything else to update";
constexpr const char* kFindOther = "sure let me find an other option for you";
constexpr const char* kGreat = "great let me do the reservation";
constexpr const char* kAnythingElse = "is there anything i can help you with";
constexpr const char* kWelcome = "you're welcome";

const std::vector<std::string>& opening_bases() {
  static const std::vector<std::string> v = {"may i have a table",
                                             "i'd like to book a table"};
  return v;
}

const std::map<std::string, std::string>& opening_parts() {
  static const std::map<std::string, std::string> m = {
      {"cuisine_type", "with {} cuisine"},
      {"location", "in {}"},
      {"num_people", "for {} people"},
      {"price_range", "in a {} price range"},
      {"atmosphere", "with a {} atmosphere"},
      {"dietary_restriction", "for a {} friendly dinner"},
  };
  return m;
}

const std::map<std::string, std::string>& questions() {
  static const std::map<std::string, std::string> m = {
      {"cuisine_type", "any preference on a type of cuisine"},
      {"location", "where should it be"},
      {"num_people", "how many people would be in your party"},
      {"price_range", "which price range are you looking for"},
      {"atmosphere", "what kind of atmosphere do you prefer"},
      {"dietary_restriction", "do you have any dietary restrictions"},
  };
  return m;
}

const std::map<std::string, std::vector<std::string>>& single_answers() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"cuisine_type",
       {"with {} cuisine", "i love {} food", "{} cuisine please",
        "wait, i am asking my friend and she wants {}, let's do that"}},
      {"location", {"somewhere in {}", "in {} please", "{} would be great"}},
      {"num_people", {"for {} people please", "we will be {}"}},
      {"price_range", {"in a {} price range", "{} price range please"}},
      {"atmosphere", {"with a {} atmosphere", "a {} atmosphere would be nice"}},
      {"dietary_restriction", {"{} please", "it should be {} friendly", "make it {}"}},
  };
  return m;
}

const std::map<std::string, std::string>& revision_templates() {
  static const std::map<std::string, std::string> m = {
      {"cuisine_type", "instead could it be with {} cuisine"},
      {"location", "instead could it be in {}"},
      {"num_people", "instead could it be for {} people"},
      {"price_range", "instead could it be in a {} price range"},
      {"atmosphere", "instead could it be with a {} atmosphere"},
      {"dietary_restriction", "instead could it be {} friendly"},
  };
  return m;
}

// Two same-type mentions where the first one is the request.
const std::map<std::string, std::string>& multi_first_templates() {
  static const std::map<std::string, std::string> m = {
      {"cuisine_type", "let's do {1} cuisine, and keep {2} cuisine for another day"},
      {"location", "find me one in {1}, {2} will be too complicated"},
      {"num_people", "we will be {1} people, {2} was a mistake"},
      {"price_range", "let's do {1} price range, and keep {2} price range for another day"},
      {"atmosphere", "a {1} atmosphere sounds better than a {2} one"},
  };
  return m;
}

constexpr const char* kGenericMultiFirst = "let's settle on {1}, drop the {2} idea";
constexpr const char* kGenericMultiSecond = "forget about {1}, make it {2}";

const std::vector<std::string>& dubious_pair_templates() {
  static const std::vector<std::string> v = {
      "{1} is tempting but {2} may be more reasonable"};
  return v;
}

const std::vector<std::string>& dubious_single_templates() {
  static const std::vector<std::string> v = {
      "one minute, i am asking my friend if she wants to do {}, let's see",
      "maybe {}, i am not quite sure yet"};
  return v;
}

const std::vector<std::string>& revision_closers() {
  static const std::vector<std::string> v = {"no", "that's all", "nothing else"};
  return v;
}

const std::vector<std::string>& rejects() {
  static const std::vector<std::string> v = {"no this does not work for me",
                                             "do you have something else"};
  return v;
}

const std::vector<std::string>& accepts() {
  static const std::vector<std::string> v = {"let's do it", "that looks great"};
  return v;
}

const std::vector<std::string>& address_questions() {
  static const std::vector<std::string> v = {"can you provide the address",
                                             "what is the address"};
  return v;
}

const std::vector<std::string>& phone_questions() {
  static const std::vector<std::string> v = {"can you provide the phone number",
                                             "do you have their phone number"};
  return v;
}

const std::vector<std::string>& closing_users() {
  static const std::vector<std::string> v = {"no thank you", "no thanks"};
  return v;
}

std::string fill(std::string tmpl, const std::string& value) {
  std::size_t pos = tmpl.find("{}");
  if (pos != std::string::npos) tmpl.replace(pos, 2, value);
  return tmpl;
}

std::string fill2(std::string tmpl, const std::string& first, const std::string& second) {
  std::size_t pos = tmpl.find("{1}");
  if (pos != std::string::npos) tmpl.replace(pos, 3, first);
  pos = tmpl.find("{2}");
  if (pos != std::string::npos) tmpl.replace(pos, 3, second);
  return tmpl;
}

// Every fixed template word, for validating that entity values never collide
// with template vocabulary (a collision would corrupt the keyword matcher).
std::set<std::string> template_vocabulary() {
  std::vector<std::string> all;
  auto add = [&](const std::string& s) { all.push_back(s); };
  for (const auto& s : greet_users()) add(s);
  add(kGreetReply); add(kOnIt); add(kOkLet); add(kReady); add(kSureElse);
  add(kFindOther); add(kGreat); add(kAnythingElse); add(kWelcome);
  for (const auto& s : opening_bases()) add(s);
  for (const auto& [t, s] : opening_parts()) add(s);
  for (const auto& [t, s] : questions()) add(s);
  for (const auto& [t, v] : single_answers()) for (const auto& s : v) add(s);
  for (const auto& [t, s] : revision_templates()) add(s);
  for (const auto& [t, s] : multi_first_templates()) add(s);
  add(kGenericMultiFirst); add(kGenericMultiSecond);
  for (const auto& s : dubious_pair_templates()) add(s);
  for (const auto& s : dubious_single_templates()) add(s);
  for (const auto& s : revision_closers()) add(s);
  for (const auto& s : rejects()) add(s);
  for (const auto& s : accepts()) add(s);
  for (const auto& s : address_questions()) add(s);
  for (const auto& s : phone_questions()) add(s);
  for (const auto& s : closing_users()) add(s);
  add("thank you");
  add("what do you think of this option:");
  add("here it is");

  std::set<std::string> vocab;
  for (std::string s : all) {
    for (std::size_t pos; (pos = s.find('{')) != std::string::npos;) {
      std::size_t close = s.find('}', pos);
      if (close == std::string::npos) break;
      s.replace(pos, close - pos + 1, " ");
    }
    for (const std::string& tok : tokenize(s)) vocab.insert(tok);
  }
  return vocab;
}

// ---------------------------------------------------------------------------
// Generation context
// ---------------------------------------------------------------------------

struct GenContext {
  GenConfig config;
  Inventories inv;
  std::vector<EntityType> types;  // active types, rank order
  KnowledgeBase kb;
  std::vector<Combo> combos;  // every dialog request is drawn from these
};

struct DialogBuilder {
  Dialog dialog;
  int next_index = 1;

  void exchange(std::string user, std::string system) {
    dialog.turns.push_back(Turn::exchange(next_index++, std::move(user), std::move(system)));
  }
  void result_row(const std::string& name, const std::string& prop, const std::string& value) {
    dialog.turns.push_back(Turn::kb_result(next_index++, name, prop, value));
  }
};

std::string underscored(std::string value) {
  for (char& c : value) {
    if (c == ' ') c = '_';
  }
  return value;
}

std::string pick_other(Rng& rng, const std::vector<std::string>& values,
                       const std::string& excluded) {
  std::vector<std::string> options;
  for (const std::string& v : values) {
    if (v != excluded) options.push_back(v);
  }
  if (options.empty()) return excluded;
  return rng.pick(options);
}

std::string api_call_text(const GenContext& ctx, const Combo& combo) {
  DialogState state;
  state.slots = combo;
  return build_api_call(state, ctx.types).text();
}

// ---------------------------------------------------------------------------
// Dialog sections
// ---------------------------------------------------------------------------

// One user answer for `type`; either a plain value, or a two-mention turn
// that exercises the disambiguation classifier.
std::string answer_text(Rng& rng, const GenContext& ctx, const std::string& type,
                        const std::string& correct) {
  if (rng.chance(ctx.config.multi_entity_rate)) {
    std::string other = pick_other(rng, ctx.inv.at(type), correct);
    if (other != correct) {
      auto it = multi_first_templates().find(type);
      bool first = rng.chance(0.5);
      if (first) {
        const std::string& tmpl =
            it != multi_first_templates().end() ? it->second : std::string(kGenericMultiFirst);
        return fill2(tmpl, correct, other);
      }
      return fill2(kGenericMultiSecond, other, correct);
    }
  }
  return fill(rng.pick(single_answers().at(type)), correct);
}

// Hedged mention of values that will *not* appear in the next api_call, so
// the auto-labelers stay consistent.
std::string dubious_text(Rng& rng, const GenContext& ctx, const std::string& type,
                         const std::string& upcoming_value) {
  std::vector<std::string> options;
  for (const std::string& v : ctx.inv.at(type)) {
    if (v != upcoming_value) options.push_back(v);
  }
  if (options.size() >= 2 && rng.chance(0.6)) {
    std::string first = rng.pick(options);
    std::string second = pick_other(rng, options, first);
    return fill2(rng.pick(dubious_pair_templates()), first, second);
  }
  return fill(rng.pick(dubious_single_templates()), rng.pick(options));
}

// greet + opening + slot questions + "ok let me look" + api_call.
void build_request_section(DialogBuilder& b, Rng& rng, const GenContext& ctx,
                           const Combo& combo, bool compact) {
  b.exchange(rng.pick(greet_users()), kGreetReply);

  std::vector<std::string> order;  // active types present in the combo, rank order
  for (const EntityType& t : ctx.types) {
    if (combo.count(t.name)) order.push_back(t.name);
  }

  std::set<std::string> volunteered;
  if (compact) {
    volunteered.insert(order.begin(), order.end());
  } else {
    std::vector<std::string> base_types;
    for (const std::string& t : order) {
      if (t != "dietary_restriction") base_types.push_back(t);
    }
    int k = rng.below(4);  // 0..3 slots volunteered up front
    std::vector<std::string> shuffled = base_types;
    rng.shuffle(shuffled);
    for (int i = 0; i < k && i < static_cast<int>(shuffled.size()); ++i) {
      volunteered.insert(shuffled[static_cast<std::size_t>(i)]);
    }
    if (combo.count("dietary_restriction") && rng.chance(0.5)) {
      volunteered.insert("dietary_restriction");
    }
  }

  std::string opening;
  bool table_style = volunteered.size() == 2 && volunteered.count("cuisine_type") &&
                     volunteered.count("atmosphere") && rng.chance(0.5);
  if (table_style) {
    opening = "i'd like to book a table with a " + combo.at("atmosphere") +
              " atmosphere with " + combo.at("cuisine_type") + " cuisine";
  } else {
    opening = rng.pick(opening_bases());
    for (const std::string& t : order) {
      if (volunteered.count(t)) {
        opening += " " + fill(opening_parts().at(t), combo.at(t));
      }
    }
  }
  b.exchange(opening, kOnIt);

  std::vector<std::string> missing;
  for (const std::string& t : order) {
    if (!volunteered.count(t)) missing.push_back(t);
  }

  if (missing.empty()) {
    b.exchange(std::string(kSilenceMarker), kOkLet);
  } else {
    b.exchange(std::string(kSilenceMarker), questions().at(missing.front()));
    for (std::size_t i = 0; i < missing.size(); ++i) {
      const std::string& type = missing[i];
      if (rng.chance(ctx.config.dubious_rate)) {
        b.exchange(dubious_text(rng, ctx, type, combo.at(type)), kReady);
      }
      std::string next_system = (i + 1 < missing.size()) ? questions().at(missing[i + 1])
                                                         : std::string(kOkLet);
      b.exchange(answer_text(rng, ctx, type, combo.at(type)), std::move(next_system));
    }
  }
  b.exchange(std::string(kSilenceMarker), api_call_text(ctx, combo));
}

// "instead could it be ..." cycles, each ending in an updated api_call.
// Each step revises exactly one slot.
void build_revision_cycles(DialogBuilder& b, Rng& rng, const GenContext& ctx, Combo& combo,
                           const std::vector<std::pair<std::string, std::string>>& steps) {
  for (const auto& [type, value] : steps) {
    combo[type] = value;
    b.exchange(fill(revision_templates().at(type), value), kSureElse);
    b.exchange(rng.pick(revision_closers()), kOkLet);
    b.exchange(std::string(kSilenceMarker), api_call_text(ctx, combo));
  }
}

std::vector<KbRecord> build_results(DialogBuilder& b, const GenContext& ctx,
                                    const Combo& combo) {
  std::vector<KbRecord> records = query(ctx.kb, combo);
  if (records.size() < 3) {
    throw std::logic_error("generator invariant violated: request with fewer than 3 matches");
  }
  for (const KbRecord& rec : records) {
    for (std::string_view prop : kb_presentation_properties()) {
      auto it = rec.properties.find(std::string(prop));
      if (it != rec.properties.end()) b.result_row(rec.name, std::string(prop), it->second);
    }
  }
  return records;
}

const KbRecord& build_proposals(DialogBuilder& b, Rng& rng,
                                const std::vector<KbRecord>& records) {
  int max_rejects = std::min(2, static_cast<int>(records.size()) - 1);
  int n_rejects = rng.below(max_rejects + 1);
  b.exchange(std::string(kSilenceMarker),
             "what do you think of this option: " + records[0].name);
  for (int r = 1; r <= n_rejects; ++r) {
    b.exchange(rng.pick(rejects()), kFindOther);
    b.exchange(std::string(kSilenceMarker),
               "what do you think of this option: " + records[static_cast<std::size_t>(r)].name);
  }
  b.exchange(rng.pick(accepts()), kGreat);
  return records[static_cast<std::size_t>(n_rejects)];
}

void build_extra_info(DialogBuilder& b, Rng& rng, const KbRecord& accepted) {
  int which = rng.below(3);  // 0 = address, 1 = phone, 2 = both
  if (which == 0 || which == 2) {
    b.exchange(rng.pick(address_questions()),
               "here it is " + accepted.properties.at("R_address"));
  }
  if (which == 1 || which == 2) {
    b.exchange(rng.pick(phone_questions()),
               "here it is " + accepted.properties.at("R_phone"));
  }
  b.exchange("thank you", kAnythingElse);
  b.exchange(rng.pick(closing_users()), kWelcome);
}

std::vector<std::pair<std::string, std::string>> revision_plan(Rng& rng,
                                                               const GenContext& ctx,
                                                               const Combo& final_combo,
                                                               int cycles, Combo& initial) {
  std::vector<std::string> names;
  for (const EntityType& t : ctx.types) {
    if (final_combo.count(t.name)) names.push_back(t.name);
  }
  rng.shuffle(names);
  std::vector<std::pair<std::string, std::string>> steps;
  initial = final_combo;
  for (int c = 0; c < cycles && c < static_cast<int>(names.size()); ++c) {
    const std::string& type = names[static_cast<std::size_t>(c)];
    std::string decoy = pick_other(rng, ctx.inv.at(type), final_combo.at(type));
    if (decoy == final_combo.at(type)) continue;
    initial[type] = decoy;
    steps.emplace_back(type, final_combo.at(type));
  }
  return steps;
}

Dialog gen_dialog(const GenContext& ctx, TaskId task, Rng& rng) {
  DialogBuilder b;
  b.dialog.task = task;
  Combo combo = rng.pick(ctx.combos);

  switch (task) {
    case TaskId::kT1: {
      build_request_section(b, rng, ctx, combo, /*compact=*/false);
      break;
    }
    case TaskId::kT2: {
      build_request_section(b, rng, ctx, combo, /*compact=*/false);
      int cycles = 1 + rng.below(3);
      std::vector<std::pair<std::string, std::string>> steps;
      std::vector<std::string> names;
      for (const EntityType& t : ctx.types) {
        if (combo.count(t.name)) names.push_back(t.name);
      }
      Combo working = combo;
      for (int c = 0; c < cycles; ++c) {
        const std::string& type = rng.pick(names);
        std::string value = pick_other(rng, ctx.inv.at(type), working.at(type));
        if (value == working.at(type)) continue;
        steps.emplace_back(type, value);
        working[type] = value;
      }
      Combo replay = combo;
      build_revision_cycles(b, rng, ctx, replay, steps);
      break;
    }
    case TaskId::kT3:
    case TaskId::kT4: {
      build_request_section(b, rng, ctx, combo, /*compact=*/true);
      std::vector<KbRecord> records = build_results(b, ctx, combo);
      const KbRecord& accepted = build_proposals(b, rng, records);
      if (task == TaskId::kT4) build_extra_info(b, rng, accepted);
      break;
    }
    case TaskId::kT5: {
      std::vector<std::pair<std::string, std::string>> steps;
      Combo initial = combo;
      if (rng.chance(0.5)) {
        int cycles = 1 + rng.below(2);
        steps = revision_plan(rng, ctx, combo, cycles, initial);
      }
      build_request_section(b, rng, ctx, initial, /*compact=*/false);
      Combo working = initial;
      build_revision_cycles(b, rng, ctx, working, steps);
      std::vector<KbRecord> records = build_results(b, ctx, working);
      const KbRecord& accepted = build_proposals(b, rng, records);
      build_extra_info(b, rng, accepted);
      break;
    }
  }
  return b.dialog;
}

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

void build_kb(GenContext& ctx, Rng& rng) {
  int n_combos = std::max(1, ctx.config.kb_size / 3);
  std::set<std::vector<std::string>> seen;
  int attempts = 0;
  while (static_cast<int>(ctx.combos.size()) < n_combos) {
    if (++attempts > n_combos * 1000) {
      throw std::invalid_argument("inventories too small for the requested kb_size");
    }
    Combo combo;
    std::vector<std::string> key;
    for (const EntityType& t : ctx.types) {
      const std::string& v = rng.pick(ctx.inv.at(t.name));
      combo[t.name] = v;
      key.push_back(v);
    }
    if (seen.insert(key).second) ctx.combos.push_back(std::move(combo));
  }

  std::vector<int> counts(ctx.combos.size(), 3);
  int remainder = ctx.config.kb_size - 3 * n_combos;
  for (int i = 0; i < remainder; ++i) counts[static_cast<std::size_t>(i % n_combos)] += 1;

  int counter = 0;
  for (std::size_t j = 0; j < ctx.combos.size(); ++j) {
    const Combo& combo = ctx.combos[j];
    for (int k = 0; k < counts[j]; ++k) {
      ++counter;
      std::string name = "resto_" + underscored(combo.at("location")) + "_" +
                         underscored(combo.at("cuisine_type")) + "_" +
                         std::to_string(counter);
      KbRecord rec;
      rec.name = name;
      for (const EntityType& t : ctx.types) {
        rec.properties[t.kb_property] = combo.at(t.name);
      }
      rec.properties["R_rating"] = std::to_string(1 + rng.below(8));
      rec.properties["R_address"] = name + "_address";
      rec.properties["R_phone"] = name + "_phone";
      ctx.kb.add(std::move(rec));
    }
  }
}

void validate_config(const GenContext& ctx) {
  const GenConfig& cfg = ctx.config;
  if (cfg.pool_size < 2) throw std::invalid_argument("pool_size must be >= 2");
  if (cfg.kb_size < 3) {
    throw std::invalid_argument(
        "kb_size too small to yield >= 3 matches for some slot combination");
  }
  if (cfg.tasks.empty()) throw std::invalid_argument("no tasks requested");
  if (cfg.dialogs_per_task < 0 || cfg.test_dialogs_per_task < 0) {
    throw std::invalid_argument("dialog counts must be non-negative");
  }

  std::set<std::string> all_value_tokens;
  for (const EntityType& t : ctx.types) {
    auto it = ctx.inv.find(t.name);
    if (it == ctx.inv.end() || it->second.empty()) {
      throw std::invalid_argument("empty inventory for entity type '" + t.name + "'");
    }
    for (const std::string& v : it->second) {
      for (const std::string& tok : tokenize(v)) {
        if (!all_value_tokens.insert(tok).second) {
          throw std::invalid_argument("entity value token '" + tok +
                                      "' appears in two inventories");
        }
      }
    }
  }
  std::set<std::string> vocab = template_vocabulary();
  for (const std::string& tok : all_value_tokens) {
    if (vocab.count(tok)) {
      throw std::invalid_argument("entity value '" + tok + "' collides with template text");
    }
  }
  if (variant_is_oov(ctx.config.variant)) {
    Inventories base = base_inventories();
    for (const auto& [type, values] : base) {
      for (const std::string& v : values) {
        if (all_value_tokens.count(v)) {
          throw std::invalid_argument("oov inventory shares value '" + v +
                                      "' with the base variant");
        }
      }
    }
  }
}

}  // namespace

std::string variant_to_string(Variant variant) {
  switch (variant) {
    case Variant::kBase: return "base";
    case Variant::kOovKb: return "oov_kb";
    case Variant::kExtraEntity: return "extra_entity";
    case Variant::kOovAndExtra: return "oov_and_extra";
  }
  return "base";
}

std::optional<Variant> variant_from_string(const std::string& name) {
  for (Variant v : {Variant::kBase, Variant::kOovKb, Variant::kExtraEntity,
                    Variant::kOovAndExtra}) {
    if (variant_to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::vector<EvalRecord> make_eval_records(const std::vector<Dialog>& dialogs,
                                          int pool_size, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, const std::string*>> pool;
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    for (const Turn& turn : dialogs[d].turns) {
      if (turn.kind == TurnKind::kExchange) pool.emplace_back(d, &turn.system);
    }
  }

  Rng rng(mix_seed(seed, 0x65762d7265637321ULL));
  std::vector<EvalRecord> out;
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    const Dialog& dialog = dialogs[d];
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      if (dialog.turns[t].kind != TurnKind::kExchange) continue;
      EvalRecord rec;
      rec.task = dialog.task;
      rec.dialog_id = static_cast<long long>(d);
      rec.context.assign(dialog.turns.begin(),
                         dialog.turns.begin() + static_cast<std::ptrdiff_t>(t + 1));
      rec.context.back().system.clear();

      const std::string& gold = dialog.turns[t].system;
      std::vector<std::string> candidates = {gold};
      std::set<std::string> used = {gold};
      int attempts = 0;
      while (static_cast<int>(candidates.size()) < pool_size &&
             attempts < pool_size * 200) {
        ++attempts;
        const auto& [pd, text] = pool[static_cast<std::size_t>(
            rng.below(static_cast<int>(pool.size())))];
        if (pd == d) continue;
        if (used.count(*text)) continue;
        if (normalize(*text) == normalize(gold)) continue;
        used.insert(*text);
        candidates.push_back(*text);
      }
      if (candidates.size() < 2) {
        throw std::runtime_error("could not assemble a candidate pool of size >= 2");
      }
      rng.shuffle(candidates);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] == gold) rec.answer_index = static_cast<int>(i);
      }
      rec.candidates = std::move(candidates);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

GeneratedData generate(const GenConfig& config) {
  GenContext ctx;
  ctx.config = config;
  if (config.inventories.empty()) {
    ctx.inv = variant_is_oov(config.variant) ? oov_inventories() : base_inventories();
  } else {
    ctx.inv = config.inventories;
  }
  for (const EntityType& t : known_entity_types()) {
    if (t.name == "dietary_restriction" && !variant_has_dietary(config.variant)) continue;
    ctx.types.push_back(t);
  }
  if (!variant_has_dietary(config.variant)) ctx.inv.erase("dietary_restriction");
  validate_config(ctx);

  Rng kb_rng(mix_seed(config.seed, 0x6b6e6f776c656467ULL));
  build_kb(ctx, kb_rng);

  GeneratedData data;
  data.kb = ctx.kb;
  int task_index = 0;
  for (TaskId task : config.tasks) {
    ++task_index;
    int total = config.dialogs_per_task + config.test_dialogs_per_task;
    for (int i = 0; i < total; ++i) {
      Rng rng(mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(task_index)),
                       static_cast<std::uint64_t>(i)));
      Dialog dialog = gen_dialog(ctx, task, rng);
      if (i < config.dialogs_per_task) {
        data.train.push_back(std::move(dialog));
      } else {
        data.test.push_back(std::move(dialog));
      }
    }
  }
  data.eval_records =
      make_eval_records(data.test, config.pool_size, mix_seed(config.seed, 0x6576616cULL));
  return data;
}

}  // namespace qdlm
