#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdlm {

// Error raised by the file-format parsers; carries a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TurnKind { kExchange, kKbResult };

struct KbResultLine {
  std::string restaurant;
  std::string property;
  std::string value;
  bool operator==(const KbResultLine&) const = default;
};

// One numbered line of a dialog transcript: either a user/system exchange or
// a knowledge-base result row following an api_call.
struct Turn {
  int index = 0;  // 1-based within the dialog
  TurnKind kind = TurnKind::kExchange;
  std::string user;
  std::string system;
  KbResultLine result;

  static Turn exchange(int index, std::string user, std::string system);
  static Turn kb_result(int index, std::string restaurant, std::string property,
                        std::string value);
  bool operator==(const Turn&) const = default;
};

enum class TaskId { kT1, kT2, kT3, kT4, kT5 };

inline constexpr TaskId kAllTasks[] = {TaskId::kT1, TaskId::kT2, TaskId::kT3, TaskId::kT4,
                                       TaskId::kT5};

std::string task_to_string(TaskId task);
std::optional<TaskId> task_from_string(const std::string& name);

struct Dialog {
  TaskId task = TaskId::kT1;
  std::vector<Turn> turns;
  bool operator==(const Dialog&) const = default;
};

// One next-utterance selection problem: the dialog history up to a system
// turn (the final context turn is an exchange whose system side is empty),
// the candidate pool, and the index of the correct candidate. `task` and
// `dialog_id` are optional metadata used for per-task reporting and for
// grouping records of one conversation; a dialog_id of -1 means the record
// stands alone.
struct EvalRecord {
  std::vector<Turn> context;
  std::vector<std::string> candidates;
  int answer_index = 0;
  TaskId task = TaskId::kT5;
  long long dialog_id = -1;
  bool operator==(const EvalRecord&) const = default;
};

struct KbRecord {
  std::string name;
  std::map<std::string, std::string> properties;  // e.g. "R_cuisine" -> "spanish"
  bool operator==(const KbRecord&) const = default;
};

class KnowledgeBase {
 public:
  void add(KbRecord record);  // throws on duplicate (name, property)
  const std::vector<KbRecord>& records() const { return records_; }
  const KbRecord* find(const std::string& name) const;
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<KbRecord> records_;
  std::map<std::string, std::size_t> by_name_;
};

// Transcript format: one `<n> <user>\t<system>` line per exchange or
// `<n> <restaurant> <property> <value>` per KB result row, dialogs separated
// by exactly one blank line, indices restarting at 1 per dialog. The format
// carries no task marker, so the caller supplies the task to stamp onto the
// parsed dialogs.
std::vector<Dialog> parse_corpus(std::istream& in, TaskId task = TaskId::kT1);
std::vector<Dialog> parse_corpus(const std::string& text, TaskId task = TaskId::kT1);

void serialize_corpus(const std::vector<Dialog>& dialogs, std::ostream& out);
std::string serialize_corpus(const std::vector<Dialog>& dialogs);

// KB format: `<restaurant> <property> <value>` per line; values may contain
// spaces (everything after the property is the value).
KnowledgeBase parse_kb(std::istream& in);
KnowledgeBase parse_kb(const std::string& text);
void serialize_kb(const KnowledgeBase& kb, std::ostream& out);

// Eval format: one JSON object per line with keys `context`, `candidates`,
// `answer_index` and optional `task`, `dialog_id`.
std::vector<EvalRecord> parse_eval_records(std::istream& in);
std::vector<EvalRecord> parse_eval_records(const std::string& text);
void serialize_eval_records(const std::vector<EvalRecord>& records, std::ostream& out);

}  // namespace qdlm
