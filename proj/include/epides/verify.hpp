#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epides/estimators.hpp"
#include "epides/knowledge.hpp"
#include "epides/pattern.hpp"

namespace epides {

// Engine that produced a verdict. Cycle is the delayed-property check; it
// is selected by the task, never forced by the caller.
enum class Engine { Double, Twin, Spair, Oracle, Cycle };

// Caller-facing engine request.
enum class EngineChoice { Auto, Double, Twin, Spair, Oracle };

std::string to_string(Engine e);
std::string to_string(EngineChoice e);
std::optional<EngineChoice> parse_engine(const std::string& name);

// Loop certificate for delayed verdicts, spelled with the twin estimator's
// event-pair names. Replaying stem then cycle from the twin's initial state
// stays inside the violating region from the cycle's first state onward.
struct Lasso {
  std::vector<std::string> stem;
  std::vector<std::string> cycle;
};

// Concrete demonstration string with its projections and the knowledge
// values it realizes. confused, when present, is a second string with the
// same high observation whose low-side value differs; it is what makes the
// high-side value U. Delayed verdicts also carry the twin lasso; their
// system_string unrolls the loop once.
struct Witness {
  std::string system_string;
  std::string low_obs;
  std::string high_obs;
  bool k_low = true;
  KHigh k_high = KHigh::U;
  std::optional<std::string> confused;
  std::optional<Lasso> lasso;
};

struct VerdictStats {
  std::size_t recognizer_states = 0;
  std::size_t estimator_states = 0;
  double build_ms = 0.0;
  double check_ms = 0.0;
};

// witness is present exactly when the verdict is informative: a universal
// pattern that fails or an existential one that holds. Oracle verdicts
// never carry witnesses. notes record interpretation choices and, for
// conjunctions, which conjunct decided.
struct Verdict {
  bool holds = true;
  Engine engine = Engine::Double;
  std::optional<Witness> witness;
  VerdictStats stats;
  std::vector<std::string> notes;
};

// Decides any admissible pattern on the double estimator. The deciding
// estimator state is the breadth-first-minimal one; the witness string is
// the shortest (then lexicographically least in declared event order) lift
// of its high observation.
Verdict check_double(const Recognizer& rec, const Classification& cls,
                     const DoubleEstimator& dbl, const ObservationMap& low,
                     const ObservationMap& high, Pattern p);

// Decides <forall,T,Y>, <forall,F,N>, <exists,T,U> and <exists,F,U> on the
// twin estimator by searching for a state whose components disagree about
// the predicate. Witness strings are the two component projections of the
// breadth-first-minimal path to such a state.
Verdict check_twin(const Recognizer& rec, const Classification& cls,
                   const TwinEstimator& twin, const ObservationMap& low,
                   const ObservationMap& high, Pattern p);

// Decides <forall,T,U> and <exists,T,Y> for distinguishability predicates
// on the state-pair estimator via emptiness of its certain-state set.
Verdict check_spair(const Automaton& plant, const StatePairEstimator& spe,
                    const TSpec& tspec, const ObservationMap& low,
                    const ObservationMap& high, Pattern p);

// Delayed check: the property fails iff the twin estimator has a reachable
// cycle lying entirely in the region where component one is knowing and
// component two is not, with at least one synchronized (high-observable)
// edge on the cycle. plant must be live.
Verdict check_finite_diag(const Automaton& plant, const Recognizer& rec,
                          const Classification& cls, const TwinEstimator& twin,
                          const ObservationMap& low,
                          const ObservationMap& high);

// Evaluates the task's pattern conjunction, dispatching each conjunct to an
// engine. Auto picks the cheapest exact engine; a forced engine raises
// input_error on conjuncts it cannot decide. Verdicts short-circuit on the
// first violated conjunct and carry its witness.
Verdict verify(const VerificationTask& task,
               EngineChoice engine = EngineChoice::Auto);

}  // namespace epides
