#include "qdlm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qdlm/tokens.hpp"

namespace qdlm {

namespace {

using nlohmann::json;

bool is_api_call_utterance(const std::string& system) {
  TokenList toks = tokenize(system);
  return !toks.empty() && toks.front() == "api_call";
}

// Strips a trailing '\r' so CRLF input parses like LF input.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Turn Turn::exchange(int index, std::string user, std::string system) {
  Turn t;
  t.index = index;
  t.kind = TurnKind::kExchange;
  t.user = std::move(user);
  t.system = std::move(system);
  return t;
}

Turn Turn::kb_result(int index, std::string restaurant, std::string property,
                     std::string value) {
  Turn t;
  t.index = index;
  t.kind = TurnKind::kKbResult;
  t.result = KbResultLine{std::move(restaurant), std::move(property), std::move(value)};
  return t;
}

std::string task_to_string(TaskId task) {
  switch (task) {
    case TaskId::kT1: return "T1";
    case TaskId::kT2: return "T2";
    case TaskId::kT3: return "T3";
    case TaskId::kT4: return "T4";
    case TaskId::kT5: return "T5";
  }
  return "T1";
}

std::optional<TaskId> task_from_string(const std::string& name) {
  for (TaskId t : kAllTasks) {
    if (task_to_string(t) == name) return t;
  }
  return std::nullopt;
}

void KnowledgeBase::add(KbRecord record) {
  auto it = by_name_.find(record.name);
  if (it == by_name_.end()) {
    by_name_[record.name] = records_.size();
    records_.push_back(std::move(record));
    return;
  }
  KbRecord& existing = records_[it->second];
  for (auto& [prop, value] : record.properties) {
    if (existing.properties.count(prop)) {
      throw std::runtime_error("duplicate property '" + prop + "' for restaurant '" +
                               record.name + "'");
    }
    existing.properties[prop] = value;
  }
}

const KbRecord* KnowledgeBase::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &records_[it->second];
}

std::vector<Dialog> parse_corpus(std::istream& in, TaskId task) {
  std::vector<Dialog> dialogs;
  Dialog current;
  current.task = task;
  bool in_dialog = false;
  std::size_t line_no = 0;
  std::string line;

  auto finish_dialog = [&](std::size_t at_line) {
    if (current.turns.empty()) throw ParseError(at_line, "empty dialog");
    dialogs.push_back(std::move(current));
    current = Dialog{};
    current.task = task;
    in_dialog = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) {
      if (!in_dialog) throw ParseError(line_no, "unexpected blank line");
      finish_dialog(line_no);
      continue;
    }

    std::size_t pos = 0;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == 0 || pos >= line.size() || line[pos] != ' ') {
      throw ParseError(line_no, "expected '<n> ' line prefix");
    }
    int index = std::stoi(line.substr(0, pos));
    int expected = static_cast<int>(current.turns.size()) + 1;
    if (index != expected) {
      throw ParseError(line_no, "non-contiguous turn index " + std::to_string(index) +
                                    " (expected " + std::to_string(expected) + ")");
    }
    std::string rest = line.substr(pos + 1);

    std::size_t tabs = static_cast<std::size_t>(std::count(rest.begin(), rest.end(), '\t'));
    if (tabs > 1) throw ParseError(line_no, "exchange line has more than one tab");
    if (tabs == 1) {
      std::size_t tab = rest.find('\t');
      std::string user = rest.substr(0, tab);
      std::string system = rest.substr(tab + 1);
      if (user.empty() || system.empty()) {
        throw ParseError(line_no, "exchange line with empty user or system utterance");
      }
      current.turns.push_back(Turn::exchange(index, user, system));
    } else {
      // KB result row: <restaurant> <property> <value...>
      std::istringstream fields(rest);
      std::string restaurant, property;
      if (!(fields >> restaurant >> property)) {
        throw ParseError(line_no, "kb result line needs '<restaurant> <property> <value>'");
      }
      std::string value;
      std::getline(fields, value);
      while (!value.empty() && value.front() == ' ') value.erase(value.begin());
      if (value.empty()) throw ParseError(line_no, "kb result line missing value");

      if (current.turns.empty()) {
        throw ParseError(line_no, "kb result before any api_call");
      }
      const Turn& prev = current.turns.back();
      bool ok = prev.kind == TurnKind::kKbResult ||
                (prev.kind == TurnKind::kExchange && is_api_call_utterance(prev.system));
      if (!ok) throw ParseError(line_no, "kb result not preceded by an api_call");
      current.turns.push_back(Turn::kb_result(index, restaurant, property, value));
    }
    in_dialog = true;
  }
  if (in_dialog) finish_dialog(line_no);
  return dialogs;
}

std::vector<Dialog> parse_corpus(const std::string& text, TaskId task) {
  std::istringstream in(text);
  return parse_corpus(in, task);
}

void serialize_corpus(const std::vector<Dialog>& dialogs, std::ostream& out) {
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    if (d) out << '\n';
    for (const Turn& t : dialogs[d].turns) {
      out << t.index << ' ';
      if (t.kind == TurnKind::kExchange) {
        out << t.user << '\t' << t.system;
      } else {
        out << t.result.restaurant << ' ' << t.result.property << ' ' << t.result.value;
      }
      out << '\n';
    }
  }
}

std::string serialize_corpus(const std::vector<Dialog>& dialogs) {
  std::ostringstream out;
  serialize_corpus(dialogs, out);
  return out.str();
}

KnowledgeBase parse_kb(std::istream& in) {
  KnowledgeBase kb;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string name, property;
    if (!(fields >> name >> property)) {
      throw ParseError(line_no, "kb line needs '<restaurant> <property> <value>'");
    }
    std::string value;
    std::getline(fields, value);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    if (value.empty()) throw ParseError(line_no, "kb line missing value");
    if (property == "R_rating") {
      try {
        if (std::stoi(value) <= 0) throw std::invalid_argument("nonpositive");
      } catch (const std::exception&) {
        throw ParseError(line_no, "R_rating must be a positive integer, got '" + value + "'");
      }
    }
    KbRecord rec;
    rec.name = name;
    rec.properties[property] = value;
    try {
      kb.add(std::move(rec));
    } catch (const std::runtime_error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return kb;
}

KnowledgeBase parse_kb(const std::string& text) {
  std::istringstream in(text);
  return parse_kb(in);
}

void serialize_kb(const KnowledgeBase& kb, std::ostream& out) {
  for (const KbRecord& rec : kb.records()) {
    for (const auto& [prop, value] : rec.properties) {
      out << rec.name << ' ' << prop << ' ' << value << '\n';
    }
  }
}

namespace {

json turn_to_json(const Turn& t) {
  json obj = json::object();
  if (t.kind == TurnKind::kKbResult) {
    obj["result"] = {{"name", t.result.restaurant},
                     {"property", t.result.property},
                     {"value", t.result.value}};
  } else {
    obj["user"] = t.user;
    if (!t.system.empty()) obj["system"] = t.system;
  }
  return obj;
}

Turn turn_from_json(const json& obj, int index, std::size_t line_no) {
  if (obj.contains("result")) {
    const json& r = obj.at("result");
    return Turn::kb_result(index, r.at("name").get<std::string>(),
                           r.at("property").get<std::string>(),
                           r.at("value").get<std::string>());
  }
  if (!obj.contains("user")) throw ParseError(line_no, "context turn without 'user' or 'result'");
  std::string system = obj.value("system", std::string());
  return Turn::exchange(index, obj.at("user").get<std::string>(), std::move(system));
}

}  // namespace

std::vector<EvalRecord> parse_eval_records(std::istream& in) {
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("bad JSON: ") + e.what());
    }
    EvalRecord rec;
    try {
      int idx = 1;
      for (const json& t : obj.at("context")) {
        rec.context.push_back(turn_from_json(t, idx++, line_no));
      }
      for (const json& c : obj.at("candidates")) {
        rec.candidates.push_back(c.get<std::string>());
      }
      rec.answer_index = obj.at("answer_index").get<int>();
      if (obj.contains("task")) {
        auto task = task_from_string(obj.at("task").get<std::string>());
        if (!task) throw ParseError(line_no, "unknown task id");
        rec.task = *task;
      }
      rec.dialog_id = obj.value("dialog_id", -1LL);
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("bad eval record: ") + e.what());
    }
    if (rec.candidates.size() < 2) throw ParseError(line_no, "need at least 2 candidates");
    if (rec.answer_index < 0 ||
        rec.answer_index >= static_cast<int>(rec.candidates.size())) {
      throw ParseError(line_no, "answer_index out of range");
    }
    std::set<std::string> seen(rec.candidates.begin(), rec.candidates.end());
    if (seen.size() != rec.candidates.size()) {
      throw ParseError(line_no, "duplicate candidates");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<EvalRecord> parse_eval_records(const std::string& text) {
  std::istringstream in(text);
  return parse_eval_records(in);
}

void serialize_eval_records(const std::vector<EvalRecord>& records, std::ostream& out) {
  for (const EvalRecord& rec : records) {
    json obj;
    json ctx = json::array();
    for (const Turn& t : rec.context) ctx.push_back(turn_to_json(t));
    obj["context"] = std::move(ctx);
    obj["candidates"] = rec.candidates;
    obj["answer_index"] = rec.answer_index;
    obj["task"] = task_to_string(rec.task);
    if (rec.dialog_id >= 0) obj["dialog_id"] = rec.dialog_id;
    out << obj.dump() << '\n';
  }
}

}  // namespace qdlm
