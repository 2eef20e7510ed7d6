#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qdlm/classifier.hpp"
#include "qdlm/corpus.hpp"
#include "qdlm/delexicalizer.hpp"
#include "qdlm/dialog_state.hpp"
#include "qdlm/knowledge_base.hpp"

namespace qdlm {

// System utterance after which a hedged user turn resolves.
inline constexpr std::string_view kReadyUtterance = "whenever you're ready";

// Auto-labels user utterances for the hedging classifier: entity-bearing
// turns followed by the "whenever you're ready" system utterance are
// dubious, other entity-bearing turns are not; entity-free turns are
// skipped. Texts are emitted with entity spans masked to their type markers.
std::vector<LabeledExample> label_dubious(std::span<const Dialog> corpus,
                                          const Lexicon& lexicon);

// Auto-labels user utterances with two or more same-type entities for the
// disambiguation classifier. Same-type values are masked ENTITY_1..ENTITY_k
// left to right; the label is the index whose value appears in the dialog's
// next api_call. Utterances whose values never reach an api_call are
// skipped.
std::vector<LabeledExample> label_disambiguation(std::span<const Dialog> corpus,
                                                 const Lexicon& lexicon);

// `text<TAB>label` per line, for inspection.
void write_labeled_tsv(std::span<const LabeledExample> examples, std::ostream& out);

// One user turn through the tracker: entities are matched against the
// lexicon; a hedged utterance changes nothing; a single entity per type is
// a confirmed (possibly overwriting) update; multiple same-type entities
// are resolved by the disambiguation classifier.
DialogState update_state(DialogState state, const std::string& user_utterance,
                         const Lexicon& lexicon, const LinearClassifier& dubious_clf,
                         const LinearClassifier& disambiguation_clf);

// Consumes the results of the most recent api_call: presentation order and
// the placeholder map are installed and any previous proposal bookkeeping is
// reset. Throws when `results` is empty.
DialogState on_results(DialogState state, const std::vector<KbRecord>& results);

// Marks the `index`-th presented restaurant (1-based) as accepted.
DialogState select_restaurant(DialogState state, int index);

}  // namespace qdlm
