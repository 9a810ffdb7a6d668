#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "epides/automaton.hpp"
#include "epides/knowledge.hpp"
#include "epides/types.hpp"

namespace epides {

struct BuildStats {
  std::size_t states = 0;
  std::size_t edges = 0;
  double build_ms = 0.0;
};

// Product of the plant with the low observer's estimator: state (x, y)
// means the plant is in x while the low observer's estimate is y. Reachable
// part only; x is always a member of y.
struct Recognizer {
  Automaton graph;  // events mirror the plant's, same ids and names
  std::vector<StateId> plant_state;  // per graph state
  std::vector<StateSet> estimate;    // per graph state
  BuildStats stats;
};

// Recognizer states split by the predicate on the estimate component.
struct Classification {
  std::vector<bool> known;  // per recognizer state
  std::vector<StateId> q_t;
  std::vector<StateId> q_f;
};

// Determinization of the recognizer under the high observer: a state is the
// set of recognizer states consistent with one high observation.
struct DoubleEstimator {
  Automaton graph;  // event id i is the high observer's output symbol i
  std::vector<std::vector<StateId>> members;  // recognizer ids, sorted
  BuildStats stats;
};

// Synchronous product of the recognizer with itself: the two components
// follow runs with equal high projections. Sync events advance both sides
// on one shared high output; the others advance one side on a high-silent
// event. Events are kept as explicit pairs; cycle checks need them.
struct TwinEvent {
  EventId first;   // kNoState when this side idles
  EventId second;
  bool sync;
};

struct TwinEstimator {
  Automaton graph;
  std::vector<std::pair<StateId, StateId>> rec_pair;  // per graph state
  std::vector<TwinEvent> events;                      // per graph event
  BuildStats stats;
};

// Triples (x, (x1, x2)): plant in x after some t, while (x1, x2) ranges
// over pairs the low observer cannot tell apart from t.
struct Triple {
  StateId x;
  StateId x1;
  StateId x2;
  auto operator<=>(const Triple&) const = default;
};

struct StatePairEstimator {
  Automaton graph;  // event id i is the high observer's output symbol i
  std::vector<std::vector<Triple>> triples;  // per graph state, sorted
  BuildStats stats;
};

Recognizer build_recognizer(const Automaton& plant, const ObservationMap& low);

Classification classify(const Recognizer& rec, const KnowledgePredicate& pred);

DoubleEstimator build_double(const Recognizer& rec, const ObservationMap& high);

TwinEstimator build_twin(const Recognizer& rec, const ObservationMap& high);

StatePairEstimator build_state_pair(const Automaton& plant,
                                    const ObservationMap& low,
                                    const ObservationMap& high);

// States of the state-pair estimator whose triples avoid the pair set
// entirely: after such an observation the high observer is certain the low
// observer can distinguish.
std::vector<StateId> certain_states(const StatePairEstimator& spe,
                                    const TSpec& tspec);

// Directed-graph text renderings. The optional second argument marks states
// to draw with a double border.
std::string to_dot(const Automaton& graph, const std::string& title,
                   const std::vector<bool>* highlight = nullptr);
std::string to_dot(const Recognizer& rec, const Classification* cls = nullptr);
std::string to_dot(const DoubleEstimator& dbl,
                   const Classification* cls = nullptr);
std::string to_dot(const TwinEstimator& twin,
                   const Classification* cls = nullptr);
std::string to_dot(const StatePairEstimator& spe,
                   const TSpec* tspec = nullptr);

}  // namespace epides
