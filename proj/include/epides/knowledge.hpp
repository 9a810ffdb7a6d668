#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "epides/automaton.hpp"
#include "epides/pattern.hpp"
#include "epides/types.hpp"

namespace epides {

// Set of ordered state pairs the low observer is asked to tell apart.
// Symmetry is not assumed; it would make no difference, because the
// predicate only ever intersects it with symmetric sets q x q.
struct TSpec {
  std::vector<std::pair<StateId, StateId>> pairs;  // sorted, unique

  void add(StateId a, StateId b);
  bool contains(StateId a, StateId b) const;
};

// All pairs (a, b) with a != b over num_states states.
TSpec tspec_distinct_pairs(std::size_t num_states);
// xs x xs, diagonal included.
TSpec tspec_square(const StateSet& xs);
// (X \ xs) x (X \ xs), diagonal included.
TSpec tspec_nonsecret_square(std::size_t num_states, const StateSet& xs);

// true iff (q x q) and tspec are disjoint. Anti-monotone in q.
bool eval_dis(const TSpec& tspec, const StateSet& q);

// Decidable predicate over state estimates: either distinguishability
// against a TSpec, or an explicit table (an extension point for predicates
// with no pair structure). Table lookups must hit; a missing entry is an
// error rather than a default, so specification gaps surface immediately.
class KnowledgePredicate {
 public:
  static KnowledgePredicate dis(TSpec tspec);
  static KnowledgePredicate table(std::map<StateSet, bool> entries);

  bool eval(const StateSet& q) const;
  bool is_dis() const { return tspec_.has_value(); }
  const TSpec& tspec() const;

 private:
  KnowledgePredicate() = default;
  std::optional<TSpec> tspec_;
  std::optional<std::map<StateSet, bool>> table_;
};

// Plant refined with one bit remembering whether xs was ever visited.
// The bit starts set iff the initial state is in xs, is set whenever a
// transition enters xs, and never clears. Languages coincide.
struct RefinedModel {
  Automaton aut;                    // states named "(x,0)" / "(x,1)"
  std::vector<StateId> base_state;  // per refined state
  std::vector<std::uint8_t> label;  // per refined state, 0 or 1
};

RefinedModel refine_visited(const Automaton& aut, const StateSet& xs);

// One verification problem: a plant (possibly refined), the two observers,
// the low-side predicate, and the pattern conjunction to verify. delayed
// switches to the eventual-knowledge reading and requires secret, a set of
// task-model states marking "the fact has happened".
struct VerificationTask {
  Automaton model;
  ObservationMap low;
  ObservationMap high;
  KnowledgePredicate predicate;
  std::vector<Pattern> patterns;
  bool delayed = false;
  std::optional<StateSet> secret;
};

// Validates pattern admissibility and the delayed/secret coupling.
VerificationTask make_task(Automaton model, ObservationMap low,
                           ObservationMap high, KnowledgePredicate predicate,
                           std::vector<Pattern> patterns, bool delayed = false,
                           std::optional<StateSet> secret = std::nullopt);

// Named property presets. tspec parameterizes high-order-opacity and
// high-order-detectability; secret parameterizes the other three.
//   high-order-opacity(T)             -> <forall,T,U> on the plant
//   intrusion-undetectability(S)      -> <forall,T,U> on the refined plant,
//                                        T = (never-visited states)^2
//   epistemic-diagnosability(S)       -> <forall,T,Y>, T = (X \ S)^2
//   high-order-detectability(T)       -> <forall,T,Y> and <forall,F,N>
//   finite-epistemic-diagnosability(S)-> delayed task on the refined plant
VerificationTask preset_task(const std::string& name, const Automaton& aut,
                             const ObservationMap& low,
                             const ObservationMap& high,
                             const std::optional<TSpec>& tspec,
                             const std::optional<StateSet>& secret);

}  // namespace epides
