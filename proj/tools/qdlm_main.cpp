// qdlm command-line interface: corpus generation, training, evaluation,
// batch prediction and an interactive console.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdlm/harness.hpp"
#include "qdlm/state_tracker.hpp"
#include "qdlm/synthgen.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAccuracyGate = 3;

struct GenArgs {
  std::uint64_t seed = 42;
  std::string tasks = "T1,T2,T3,T4,T5";
  int n = 100;
  int n_test = 0;
  int kb_size = 50;
  int pool_size = 10;
  std::string variant = "base";
  double dubious_rate = 0.15;
  double multi_rate = 0.15;
  std::string out_dir;
};

struct TrainArgs {
  std::string corpus;
  std::string kb;
  std::string out;
  int order = 8;
  std::string export_labels;
};

struct EvalArgs {
  std::string model;
  std::string eval;
  std::string kb;
  std::string report;
  bool teacher_forced = false;
  double min_accuracy = -1.0;
};

struct PredictArgs {
  std::string model;
  std::string kb;
  bool teacher_forced = false;
};

struct ChatArgs {
  std::string model;
  std::string kb;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

std::vector<qdlm::TaskId> parse_tasks(const std::string& spec) {
  std::vector<qdlm::TaskId> tasks;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto task = qdlm::task_from_string(item);
    if (!task) throw std::runtime_error("unknown task '" + item + "'");
    tasks.push_back(*task);
  }
  if (tasks.empty()) throw std::runtime_error("no tasks given");
  return tasks;
}

int run_gen(const GenArgs& args) {
  qdlm::GenConfig config;
  config.seed = args.seed;
  config.tasks = parse_tasks(args.tasks);
  config.dialogs_per_task = args.n;
  config.test_dialogs_per_task = args.n_test;
  config.kb_size = args.kb_size;
  config.pool_size = args.pool_size;
  config.dubious_rate = args.dubious_rate;
  config.multi_entity_rate = args.multi_rate;
  auto variant = qdlm::variant_from_string(args.variant);
  if (!variant) throw std::runtime_error("unknown variant '" + args.variant + "'");
  config.variant = *variant;

  qdlm::GeneratedData data = qdlm::generate(config);

  std::filesystem::create_directories(args.out_dir);
  auto path = [&](const char* name) {
    return (std::filesystem::path(args.out_dir) / name).string();
  };
  {
    std::ofstream out(path("kb.txt"), std::ios::binary);
    qdlm::serialize_kb(data.kb, out);
  }
  if (!data.train.empty()) {
    std::ofstream out(path("train.txt"), std::ios::binary);
    qdlm::serialize_corpus(data.train, out);
  }
  if (!data.test.empty()) {
    std::ofstream out(path("test.txt"), std::ios::binary);
    qdlm::serialize_corpus(data.test, out);
    std::ofstream eval_out(path("eval.jsonl"), std::ios::binary);
    qdlm::serialize_eval_records(data.eval_records, eval_out);
  }
  std::cout << "wrote " << data.kb.size() << " restaurants, " << data.train.size()
            << " train dialogs, " << data.test.size() << " test dialogs, "
            << data.eval_records.size() << " eval records to " << args.out_dir << "\n";
  return 0;
}

int run_train(const TrainArgs& args) {
  std::vector<qdlm::Dialog> corpus = qdlm::parse_corpus(read_file(args.corpus));
  qdlm::KnowledgeBase kb = qdlm::parse_kb(read_file(args.kb));

  qdlm::TrainConfig config;
  config.ngram_order = args.order;
  qdlm::ModelBundle bundle = qdlm::train_pipeline(corpus, kb, config);
  qdlm::save_bundle_file(bundle, args.out);

  if (!args.export_labels.empty()) {
    std::filesystem::create_directories(args.export_labels);
    auto dir = std::filesystem::path(args.export_labels);
    std::ofstream dub((dir / "dubious.tsv").string(), std::ios::binary);
    qdlm::write_labeled_tsv(qdlm::label_dubious(corpus, bundle.lexicon), dub);
    std::ofstream dis((dir / "disambiguation.tsv").string(), std::ios::binary);
    qdlm::write_labeled_tsv(qdlm::label_disambiguation(corpus, bundle.lexicon), dis);
  }

  std::cout << "trained on " << corpus.size() << " dialogs: "
            << bundle.clusters.cluster_count() << " clusters, order "
            << bundle.lm.order() << "; model written to " << args.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& args) {
  qdlm::ModelBundle bundle = qdlm::load_bundle_file(args.model);
  std::vector<qdlm::EvalRecord> records = qdlm::parse_eval_records(read_file(args.eval));

  qdlm::KnowledgeBase kb;
  qdlm::EvalOptions options;
  options.teacher_forced = args.teacher_forced;
  if (!args.kb.empty()) {
    kb = qdlm::parse_kb(read_file(args.kb));
    options.eval_kb = &kb;
  }

  qdlm::Report report = qdlm::evaluate(bundle, records, options);
  std::string table = qdlm::report_render(report);
  std::cout << table;
  if (!args.report.empty()) write_file(args.report, table);

  if (args.min_accuracy >= 0.0 && report.average() < args.min_accuracy) {
    std::cerr << "accuracy gate failed: average " << report.average() << " < "
              << args.min_accuracy << "\n";
    return kExitAccuracyGate;
  }
  return 0;
}

int run_predict(const PredictArgs& args) {
  qdlm::ModelBundle bundle = qdlm::load_bundle_file(args.model);
  std::vector<qdlm::EvalRecord> records = qdlm::parse_eval_records(std::cin);

  qdlm::KnowledgeBase kb;
  qdlm::EvalOptions options;
  options.teacher_forced = args.teacher_forced;
  if (!args.kb.empty()) {
    kb = qdlm::parse_kb(read_file(args.kb));
    options.eval_kb = &kb;
  }

  for (const qdlm::TurnChoice& choice : qdlm::predict_choices(bundle, records, options)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\n", choice.chosen, choice.score);
    std::cout << buf;
  }
  return 0;
}

int run_chat(const ChatArgs& args) {
  qdlm::ModelBundle bundle = qdlm::load_bundle_file(args.model);
  qdlm::KnowledgeBase kb = qdlm::parse_kb(read_file(args.kb));
  qdlm::Runtime rt = qdlm::make_runtime(bundle, &kb);

  qdlm::DialogState state;
  std::vector<qdlm::ClusterId> history(static_cast<std::size_t>(bundle.lm.order()) - 1,
                                       qdlm::kBosCluster);

  std::cout << "type a user utterance per line (ctrl-d to exit)\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line == "quit" || line == "exit") break;
    if (line.empty()) line = std::string(qdlm::kSilenceMarker);

    qdlm::DelexUtterance du = qdlm::delex_user(line, state, rt.lexicon, bundle.dubious_clf,
                                               bundle.entity_types);
    qdlm::ClusterId cid = bundle.clusters.assign(du);
    if (!du.entity_vector && state.last_proposed > 0 &&
        bundle.affirmation_clusters.count(cid)) {
      state = qdlm::select_restaurant(state, state.last_proposed);
    }
    state = qdlm::update_state(state, line, rt.lexicon, bundle.dubious_clf,
                               bundle.disambiguation_clf);
    history.push_back(cid);

    auto dist = bundle.lm.predict_distribution(history);
    qdlm::ClusterId top = qdlm::kUnkCluster;
    double best = -1.0;
    for (const auto& [id, p] : dist) {
      if (p > best) {
        top = id;
        best = p;
      }
    }
    if (top == qdlm::kUnkCluster) {
      std::cout << "(no prediction)\n";
      continue;
    }

    std::string reply;
    if (bundle.clusters.is_api_call(top) && !state.slots.empty()) {
      qdlm::ApiCall call = qdlm::build_api_call(state, rt.registry);
      reply = call.text();
      std::cout << reply << "\n";
      std::vector<qdlm::KbRecord> results = qdlm::query(kb, state.slots);
      if (!results.empty()) {
        state = qdlm::on_results(state, results);
        for (const qdlm::KbRecord& rec : results) {
          for (std::string_view prop : qdlm::kb_presentation_properties()) {
            auto it = rec.properties.find(std::string(prop));
            if (it == rec.properties.end()) continue;
            std::cout << rec.name << ' ' << prop << ' ' << it->second << "\n";
            qdlm::DelexUtterance row;
            row.tokens = qdlm::delex_result_tokens(
                qdlm::KbResultLine{rec.name, std::string(prop), it->second},
                state.placeholders);
            // extend history with the rows the user just saw
            history.push_back(bundle.clusters.assign(row));
          }
        }
      } else {
        std::cout << "(no matching restaurants)\n";
      }
    } else {
      const qdlm::TokenList& canonical = bundle.clusters.canonical(top);
      qdlm::TokenList surfaced = canonical;
      for (std::string& tok : surfaced) {
        auto surface = state.placeholders.surface_for(tok);
        if (surface) tok = *surface;
      }
      reply = qdlm::join_tokens(surfaced);
      std::cout << reply << "\n";
    }
    qdlm::DelexUtterance sys = qdlm::delex_system_turn(reply, state, state.placeholders);
    history.push_back(bundle.clusters.assign(sys));
    int proposed = qdlm::proposed_restaurant_index(sys.tokens);
    if (proposed > 0) state.last_proposed = proposed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized-dialog language model toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--tasks", gen_args.tasks, "comma-separated task list (default all)");
  gen->add_option("--n", gen_args.n, "training dialogs per task");
  gen->add_option("--n-test", gen_args.n_test, "test dialogs per task (drives eval.jsonl)");
  gen->add_option("--kb-size", gen_args.kb_size, "number of restaurants");
  gen->add_option("--pool-size", gen_args.pool_size, "candidates per eval record");
  gen->add_option("--variant", gen_args.variant,
                  "base | oov_kb | extra_entity | oov_and_extra");
  gen->add_option("--dubious-rate", gen_args.dubious_rate, "hedged-turn rate");
  gen->add_option("--multi-rate", gen_args.multi_rate, "two-mention-turn rate");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a model from a corpus");
  train->add_option("--corpus", train_args.corpus, "transcript file")->required();
  train->add_option("--kb", train_args.kb, "knowledge base file")->required();
  train->add_option("--out", train_args.out, "output model file")->required();
  train->add_option("--order", train_args.order, "n-gram order (default 8)");
  train->add_option("--export-labels", train_args.export_labels,
                    "directory for the auto-labeled TSV datasets");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a model on eval records");
  eval->add_option("--model", eval_args.model, "model file")->required();
  eval->add_option("--eval", eval_args.eval, "eval records (JSON lines)")->required();
  eval->add_option("--kb", eval_args.kb, "knowledge base of the eval variant");
  eval->add_option("--report", eval_args.report, "write the accuracy table here");
  eval->add_flag("--teacher-forced", eval_args.teacher_forced,
                 "follow gold turns instead of the model's own choices");
  eval->add_option("--min-accuracy", eval_args.min_accuracy,
                   "exit 3 when the average accuracy is below this");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand(
      "predict", "read eval records on stdin, write 'chosen_index<TAB>score' lines");
  predict->add_option("--model", predict_args.model, "model file")->required();
  predict->add_option("--kb", predict_args.kb, "knowledge base of the eval variant");
  predict->add_flag("--teacher-forced", predict_args.teacher_forced,
                    "follow gold turns instead of the model's own choices");

  ChatArgs chat_args;
  CLI::App* chat = app.add_subcommand("chat", "interactive console");
  chat->add_option("--model", chat_args.model, "model file")->required();
  chat->add_option("--kb", chat_args.kb, "knowledge base file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (predict->parsed()) return run_predict(predict_args);
    if (chat->parsed()) return run_chat(chat_args);
  } catch (const std::exception& e) {
    std::cerr << "qdlm: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
