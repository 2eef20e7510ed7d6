#include "qdlm/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qdlm/delexicalizer.hpp"
#include "qdlm/state_tracker.hpp"

namespace qdlm {

namespace {

using nlohmann::json;

enum class ElementKind { kUser, kSystem, kResult };

struct DelexedElement {
  DelexUtterance utterance;
  ElementKind kind = ElementKind::kUser;
};

std::vector<DelexedElement> delexicalize_annotated(const Dialog& dialog,
                                                   const Lexicon& lexicon,
                                                   std::span<const EntityType> layout,
                                                   const LinearClassifier& dubious_clf,
                                                   const LinearClassifier& disambiguation_clf) {
  std::vector<DelexedElement> out;
  DialogState state;
  std::vector<KbResultLine> block;

  auto flush = [&] {
    if (block.empty()) return;
    std::map<std::string, std::size_t> order;
    std::vector<KbRecord> records;
    for (const KbResultLine& row : block) {
      auto it = order.find(row.restaurant);
      if (it == order.end()) {
        order[row.restaurant] = records.size();
        records.push_back(KbRecord{row.restaurant, {}});
        it = order.find(row.restaurant);
      }
      records[it->second].properties[row.property] = row.value;
    }
    state = on_results(state, records);
    for (const KbResultLine& row : block) {
      DelexUtterance du;
      du.tokens = delex_result_tokens(row, state.placeholders);
      out.push_back(DelexedElement{std::move(du), ElementKind::kResult});
    }
    block.clear();
  };

  for (const Turn& turn : dialog.turns) {
    if (turn.kind == TurnKind::kKbResult) {
      block.push_back(turn.result);
      continue;
    }
    flush();
    out.push_back(DelexedElement{
        delex_user(turn.user, state, lexicon, dubious_clf, layout), ElementKind::kUser});
    state = update_state(state, turn.user, lexicon, dubious_clf, disambiguation_clf);
    out.push_back(DelexedElement{
        delex_system_turn(turn.system, state, state.placeholders), ElementKind::kSystem});
  }
  flush();
  return out;
}

// Accepting user turns: entity-free, directly after a proposal, with no
// later proposal in the dialog.
std::vector<std::size_t> affirmation_positions(const std::vector<DelexedElement>& elements) {
  std::vector<std::size_t> out;
  std::size_t last_proposal = elements.size();
  for (std::size_t i = elements.size(); i-- > 0;) {
    if (elements[i].kind == ElementKind::kSystem &&
        proposed_restaurant_index(elements[i].utterance.tokens) > 0) {
      last_proposal = i;
      break;
    }
  }
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i].kind != ElementKind::kUser) continue;
    if (elements[i].utterance.entity_vector) continue;
    const DelexedElement& prev = elements[i - 1];
    if (prev.kind != ElementKind::kSystem) continue;
    if (proposed_restaurant_index(prev.utterance.tokens) == 0) continue;
    if (last_proposal != elements.size() && i - 1 < last_proposal) continue;  // later proposal exists
    out.push_back(i);
  }
  return out;
}

template <class Fn>
void for_each_conversation(std::span<const EvalRecord> records, Fn&& fn) {
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin + 1;
    if (records[begin].dialog_id >= 0) {
      while (end < records.size() && records[end].dialog_id == records[begin].dialog_id) {
        ++end;
      }
    }
    fn(records.subspan(begin, end - begin));
    begin = end;
  }
}

bool gold_is_api_call(const EvalRecord& record) {
  TokenList toks = tokenize(record.candidates[static_cast<std::size_t>(record.answer_index)]);
  return !toks.empty() && toks.front() == "api_call";
}

std::string format_accuracy(double value, bool have_records) {
  if (!have_records) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

}  // namespace

std::vector<DelexUtterance> delexicalize_dialog(
    const Dialog& dialog, const Lexicon& lexicon, std::span<const EntityType> layout,
    const LinearClassifier& dubious_clf, const LinearClassifier& disambiguation_clf) {
  std::vector<DelexUtterance> out;
  for (DelexedElement& e :
       delexicalize_annotated(dialog, lexicon, layout, dubious_clf, disambiguation_clf)) {
    out.push_back(std::move(e.utterance));
  }
  return out;
}

ModelBundle train_pipeline(const std::vector<Dialog>& corpus, const KnowledgeBase& kb,
                           const TrainConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");
  if (kb.empty()) throw std::invalid_argument("empty knowledge base");

  ModelBundle bundle;
  bundle.lexicon = Lexicon::from_kb(kb);
  bundle.entity_types = bundle.lexicon.types();

  std::vector<LabeledExample> dubious_data = label_dubious(corpus, bundle.lexicon);
  std::vector<LabeledExample> disamb_data = label_disambiguation(corpus, bundle.lexicon);

  auto distinct_labels = [](const std::vector<LabeledExample>& data) {
    std::set<std::string> labels;
    for (const LabeledExample& ex : data) labels.insert(ex.label);
    return labels.size();
  };
  LinearClassifier::TrainOptions clf_options{config.classifier_epochs};
  if (distinct_labels(dubious_data) >= 2) {
    bundle.dubious_clf = LinearClassifier::train(dubious_data, clf_options);
  }
  if (distinct_labels(disamb_data) >= 2) {
    bundle.disambiguation_clf = LinearClassifier::train(disamb_data, clf_options);
  }

  std::vector<std::vector<DelexedElement>> annotated;
  annotated.reserve(corpus.size());
  for (const Dialog& dialog : corpus) {
    annotated.push_back(delexicalize_annotated(dialog, bundle.lexicon, bundle.entity_types,
                                               bundle.dubious_clf,
                                               bundle.disambiguation_clf));
  }

  std::vector<std::vector<DelexUtterance>> delexed;
  delexed.reserve(annotated.size());
  for (const std::vector<DelexedElement>& dialog : annotated) {
    std::vector<DelexUtterance> utterances;
    utterances.reserve(dialog.size());
    for (const DelexedElement& e : dialog) utterances.push_back(e.utterance);
    delexed.push_back(std::move(utterances));
  }
  bundle.clusters = ClusterModel::fit(delexed);

  std::vector<std::vector<ClusterId>> sequences;
  sequences.reserve(delexed.size());
  for (const std::vector<DelexUtterance>& dialog : delexed) {
    std::vector<ClusterId> seq;
    seq.reserve(dialog.size());
    for (const DelexUtterance& utt : dialog) seq.push_back(bundle.clusters.assign(utt));
    sequences.push_back(std::move(seq));
  }
  bundle.lm = NGramModel::train(sequences, config.ngram_order);

  for (std::size_t d = 0; d < annotated.size(); ++d) {
    for (std::size_t pos : affirmation_positions(annotated[d])) {
      bundle.affirmation_clusters.insert(sequences[d][pos]);
    }
  }
  return bundle;
}

long long Report::total_records() const {
  long long total = 0;
  for (const auto& [task, stats] : per_task) total += stats.records;
  return total;
}

double Report::average() const {
  if (per_task.empty()) return 0.0;
  double sum = 0.0;
  int n = 0;
  for (const auto& [task, stats] : per_task) {
    if (stats.records == 0) continue;
    sum += stats.accuracy();
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

long long Report::api_call_records() const {
  long long total = 0;
  for (const auto& [task, stats] : per_task) total += stats.api_records;
  return total;
}

double Report::api_call_accuracy() const {
  long long total = 0, correct = 0;
  for (const auto& [task, stats] : per_task) {
    total += stats.api_records;
    correct += stats.api_correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

Report evaluate(const ModelBundle& bundle, std::span<const EvalRecord> records,
                const EvalOptions& options) {
  Runtime rt = make_runtime(bundle, options.eval_kb, options.teacher_forced);
  Report report;
  for_each_conversation(records, [&](std::span<const EvalRecord> conversation) {
    DialogRunResult result = run_dialog(rt, conversation);
    for (std::size_t i = 0; i < conversation.size(); ++i) {
      const EvalRecord& record = conversation[i];
      TaskStats& stats = report.per_task[record.task];
      bool correct = result.choices[i].chosen == record.answer_index;
      stats.records += 1;
      stats.correct += correct ? 1 : 0;
      if (gold_is_api_call(record)) {
        stats.api_records += 1;
        stats.api_correct += correct ? 1 : 0;
      }
    }
  });
  return report;
}

std::vector<TurnChoice> predict_choices(const ModelBundle& bundle,
                                        std::span<const EvalRecord> records,
                                        const EvalOptions& options) {
  Runtime rt = make_runtime(bundle, options.eval_kb, options.teacher_forced);
  std::vector<TurnChoice> out;
  out.reserve(records.size());
  for_each_conversation(records, [&](std::span<const EvalRecord> conversation) {
    DialogRunResult result = run_dialog(rt, conversation);
    for (const TurnChoice& choice : result.choices) out.push_back(choice);
  });
  return out;
}

std::string report_render(const Report& report) {
  std::ostringstream out;
  char buf[128];
  out << "Task       Records  Accuracy  ApiCallAcc\n";
  for (const auto& [task, stats] : report.per_task) {
    std::snprintf(buf, sizeof(buf), "%-8s%10lld%10s%12s\n", task_to_string(task).c_str(),
                  stats.records, format_accuracy(stats.accuracy(), stats.records > 0).c_str(),
                  format_accuracy(stats.api_accuracy(), stats.api_records > 0).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-8s%10lld%10s%12s\n", "Average", report.total_records(),
                format_accuracy(report.average(), !report.per_task.empty()).c_str(),
                format_accuracy(report.api_call_accuracy(), report.api_call_records() > 0)
                    .c_str());
  out << buf;
  return out.str();
}

namespace {

json lexicon_to_json(const Lexicon& lexicon) {
  json types = json::array();
  json phrases = json::object();
  for (std::size_t i = 0; i < lexicon.types().size(); ++i) {
    const EntityType& t = lexicon.types()[i];
    types.push_back({{"name", t.name},
                     {"marker", t.marker},
                     {"kb_property", t.kb_property},
                     {"rank", t.rank}});
    json values = json::array();
    for (const TokenList& phrase : lexicon.phrases(i)) values.push_back(join_tokens(phrase));
    phrases[t.name] = std::move(values);
  }
  return {{"types", std::move(types)}, {"phrases", std::move(phrases)}};
}

Lexicon lexicon_from_json(const json& obj) {
  Lexicon lexicon;
  for (const json& t : obj.at("types")) {
    lexicon.add_type(EntityType{t.at("name").get<std::string>(),
                                t.at("marker").get<std::string>(),
                                t.at("kb_property").get<std::string>(),
                                t.at("rank").get<int>()});
  }
  for (const auto& [name, values] : obj.at("phrases").items()) {
    for (const json& v : values) {
      lexicon.add_phrase(name, tokenize(v.get<std::string>()));
    }
  }
  return lexicon;
}

json classifier_to_json(const LinearClassifier& clf) {
  json weights = json::object();
  for (const auto& [token, vec] : clf.feature_weights()) weights[token] = vec;
  return {{"labels", clf.labels()}, {"bias", clf.bias()}, {"weights", std::move(weights)}};
}

LinearClassifier classifier_from_json(const json& obj) {
  std::map<std::string, std::vector<double>> weights;
  for (const auto& [token, vec] : obj.at("weights").items()) {
    weights[token] = vec.get<std::vector<double>>();
  }
  return LinearClassifier::from_parts(obj.at("labels").get<std::vector<std::string>>(),
                                      std::move(weights),
                                      obj.at("bias").get<std::vector<double>>());
}

}  // namespace

void save_bundle(const ModelBundle& bundle, std::ostream& out) {
  json obj;
  obj["format"] = "qdlm-model";
  obj["format_version"] = bundle.format_version;
  obj["ngram_order"] = bundle.lm.order();

  json types = json::array();
  for (const EntityType& t : bundle.entity_types) {
    types.push_back({{"name", t.name},
                     {"marker", t.marker},
                     {"kb_property", t.kb_property},
                     {"rank", t.rank}});
  }
  obj["entity_types"] = std::move(types);
  obj["lexicon"] = lexicon_to_json(bundle.lexicon);

  json clusters = json::array();
  for (const TokenList& canonical : bundle.clusters.canonicals()) clusters.push_back(canonical);
  obj["clusters"] = std::move(clusters);

  json lm = json::array();
  for (const auto& [context, counts] : bundle.lm.all_contexts()) {
    json row = json::array();
    row.push_back(context);
    json nexts = json::array();
    for (const auto& [next, count] : counts->next) {
      nexts.push_back(json::array({next, count}));
    }
    row.push_back(std::move(nexts));
    lm.push_back(std::move(row));
  }
  obj["lm"] = std::move(lm);

  obj["dubious_clf"] = classifier_to_json(bundle.dubious_clf);
  obj["disambiguation_clf"] = classifier_to_json(bundle.disambiguation_clf);
  obj["affirmation_clusters"] =
      std::vector<ClusterId>(bundle.affirmation_clusters.begin(),
                             bundle.affirmation_clusters.end());

  out << obj.dump() << '\n';
}

std::string bundle_to_string(const ModelBundle& bundle) {
  std::ostringstream out;
  save_bundle(bundle, out);
  return out.str();
}

void save_bundle_file(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_bundle(bundle, out);
}

ModelBundle load_bundle(std::istream& in) {
  json obj;
  try {
    in >> obj;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad model file: ") + e.what());
  }
  if (obj.value("format", std::string()) != "qdlm-model") {
    throw std::runtime_error("not a qdlm model file");
  }
  if (obj.at("format_version").get<int>() != kBundleFormatVersion) {
    throw std::runtime_error("unsupported model format version");
  }

  ModelBundle bundle;
  for (const json& t : obj.at("entity_types")) {
    bundle.entity_types.push_back(EntityType{t.at("name").get<std::string>(),
                                             t.at("marker").get<std::string>(),
                                             t.at("kb_property").get<std::string>(),
                                             t.at("rank").get<int>()});
  }
  bundle.lexicon = lexicon_from_json(obj.at("lexicon"));

  std::vector<TokenList> canonicals;
  for (const json& c : obj.at("clusters")) canonicals.push_back(c.get<TokenList>());
  bundle.clusters = ClusterModel::from_canonicals(std::move(canonicals));

  bundle.lm.set_order(obj.at("ngram_order").get<int>());
  for (const json& row : obj.at("lm")) {
    std::vector<ClusterId> context = row.at(0).get<std::vector<ClusterId>>();
    for (const json& next : row.at(1)) {
      bundle.lm.add_count(context, next.at(0).get<ClusterId>(),
                          next.at(1).get<std::int64_t>());
    }
  }

  bundle.dubious_clf = classifier_from_json(obj.at("dubious_clf"));
  bundle.disambiguation_clf = classifier_from_json(obj.at("disambiguation_clf"));
  for (const json& id : obj.at("affirmation_clusters")) {
    bundle.affirmation_clusters.insert(id.get<ClusterId>());
  }
  return bundle;
}

ModelBundle load_bundle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_bundle(in);
}

}  // namespace qdlm
