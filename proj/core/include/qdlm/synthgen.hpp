#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdlm/corpus.hpp"
#include "qdlm/knowledge_base.hpp"

namespace qdlm {

enum class Variant { kBase, kOovKb, kExtraEntity, kOovAndExtra };

std::string variant_to_string(Variant variant);
std::optional<Variant> variant_from_string(const std::string& name);

// Configuration for the deterministic corpus generator. The oov variants
// share no entity values and no restaurant names with the base variant; the
// extra variants add a dietary_restriction requirement on top of the five
// base slot types.
struct GenConfig {
  std::uint64_t seed = 42;
  std::vector<TaskId> tasks = {kAllTasks, kAllTasks + 5};
  int dialogs_per_task = 100;       // training dialogs
  int test_dialogs_per_task = 0;    // dialogs backing the eval records
  int kb_size = 50;
  int pool_size = 10;
  Variant variant = Variant::kBase;
  double dubious_rate = 0.15;
  double multi_entity_rate = 0.15;
  // Optional override; empty means the variant's built-in inventories.
  std::map<std::string, std::vector<std::string>> inventories;
};

struct GeneratedData {
  KnowledgeBase kb;
  std::vector<Dialog> train;
  std::vector<Dialog> test;
  std::vector<EvalRecord> eval_records;  // one per system turn of each test dialog
};

// Deterministic given the config: same seed, same bytes.
GeneratedData generate(const GenConfig& config);

// Builds selection problems for every system turn of `dialogs`: the gold
// utterance plus seeded distractors drawn from other dialogs' system turns.
std::vector<EvalRecord> make_eval_records(const std::vector<Dialog>& dialogs,
                                          int pool_size, std::uint64_t seed);

}  // namespace qdlm
