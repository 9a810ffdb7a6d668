#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epides/automaton.hpp"
#include "epides/knowledge.hpp"
#include "epides/verify.hpp"

namespace epides {

// One model file: the plant, the two observers, and any named state sets.
// Declaration order is preserved so emission is stable; header holds the
// leading comment lines (text after '#'), which the generator uses to
// record repairs.
struct ModelFile {
  std::string name;
  Automaton aut;
  ObservationMap low;
  ObservationMap high;
  std::vector<std::pair<std::string, StateSet>> sets;
  std::vector<std::string> header;
};

// Named set lookup; nullptr when absent.
const StateSet* find_set(const ModelFile& m, const std::string& name);

// Line-oriented grammar, '#' starts a comment:
//   model NAME
//   states id...
//   init id
//   events id...
//   trans src ev dst          (one per line)
//   obs lo|hi ev out|_        ('_' marks the event silent, the default)
//   set NAME id...
// Identifiers must be declared before use; duplicate declarations and
// nondeterministic transitions are errors. Throws parse_error with the
// offending 1-based line.
ModelFile parse_model(const std::string& text);

// Canonical rendering: header comments, then the directives in the order
// above, silent observations omitted. parse_model(emit_model(m)) is
// structurally equal to m, and emitting again is byte-identical.
std::string emit_model(const ModelFile& m);

using ModelRegistry = std::map<std::string, ModelFile>;

// One specification file resolved against loaded models.
struct SpecFile {
  std::string name;
  std::string model_name;
  VerificationTask task;
  EngineChoice engine = EngineChoice::Auto;
};

// Line-oriented grammar, '#' starts a comment:
//   spec NAME
//   model NAME
//   predicate dis distinct
//   predicate dis pairs (a,b)(c,d)...
//   predicate dis nonsecret-square SET
//   predicate dis square SET
//   pattern forall|exists T|F Y|N|U      (repeatable; conjunction)
//   property PRESET distinct|pairs...|nonsecret-square SET|square SET
//   property PRESET secret id... | secret SET
//   engine auto|double|twin|spair|oracle
// Either predicate+pattern lines or a single property line. Inadmissible
// patterns are rejected at parse time.
SpecFile parse_spec(const std::string& text, const ModelRegistry& models);

// JSON rendering with a stable field order:
//   {spec, holds, engine,
//    witness{systemString, lowObs, highObs, confusedString?, lasso{stem,cycle}?},
//    stats{recognizerStates, estimatorStates, buildMs, checkMs},
//    interpretationNotes[]}
// The witness object is present exactly when the verdict carries one.
std::string emit_verdict(const Verdict& v, const std::string& spec_name);

// Deterministic random model: n_states states named 0..n-1, n_events
// events named a, b, ...; each (state, event) slot is filled with
// probability density; each event is observable to an observer with the
// given probability, occasionally sharing an output symbol with an earlier
// event. Unreachable states are dropped and dead states repaired with a
// self-loop on a fresh event silent to both observers; both fixes are
// recorded in the header. The result always passes validate.
ModelFile gen_random(std::uint64_t seed, std::size_t n_states,
                     std::size_t n_events, double density, double p_low_obs,
                     double p_high_obs);

// One benchmark input; model is empty when loading already failed, with
// the reason in error.
struct BenchEntry {
  std::string name;
  std::optional<ModelFile> model;
  std::string error;
};

// One CSV row per (model, engine): construction sizes and timings for the
// distinct-pairs predicate under a pattern the engine supports. Fixed
// header "model,engine,recognizerStates,estimatorStates,buildMs,checkMs,error".
// A failing entry yields a single row with the error column set and the
// run continues.
std::string bench_csv(const std::vector<BenchEntry>& entries,
                      const std::vector<EngineChoice>& engines);

}  // namespace epides
