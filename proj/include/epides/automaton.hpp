#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "epides/types.hpp"

namespace epides {

struct Transition {
  StateId src;
  EventId event;
  StateId dst;
};

// Deterministic finite automaton with a partial transition function.
// States and events carry dense indices; the declared identifiers are kept
// for parsing and rendering. Undefined moves are first-class (kNoState),
// never emulated with a sink state, because a sink would corrupt estimates.
//
// The raw transition list keeps duplicates so validate() can report
// determinism violations; the step table is filled first-declaration-wins
// and is only meaningful once validate() reports no violations.
class Automaton {
 public:
  StateId add_state(const std::string& name);
  EventId add_event(const std::string& name);
  void add_transition(StateId src, EventId event, StateId dst);
  void set_initial(StateId x);

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_events() const { return event_names_.size(); }
  StateId initial() const { return initial_; }
  const std::string& state_name(StateId x) const { return state_names_[x]; }
  const std::string& event_name(EventId e) const { return event_names_[e]; }
  std::optional<StateId> find_state(const std::string& name) const;
  std::optional<EventId> find_event(const std::string& name) const;
  const std::vector<Transition>& transitions() const { return transitions_; }

  // Target of the unique (x, e) transition, or kNoState when undefined.
  StateId step(StateId x, EventId e) const { return delta_[x][e]; }

 private:
  std::vector<std::string> state_names_;
  std::vector<std::string> event_names_;
  std::unordered_map<std::string, StateId> state_index_;
  std::unordered_map<std::string, EventId> event_index_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<StateId>> delta_;
  StateId initial_ = kNoState;
};

// Observation map H: each event of a fixed domain is either silent or emits
// an output symbol. Distinct events may share an output (relabeling), so the
// output alphabet is its own index space, ordered by first appearance.
class ObservationMap {
 public:
  ObservationMap() = default;
  explicit ObservationMap(std::size_t domain_size)
      : map_(domain_size, kSilent) {}

  // Interns the symbol and maps the event to it.
  OutputId set_output(EventId e, const std::string& symbol);
  void set_silent(EventId e) { map_[e] = kSilent; }

  std::size_t domain_size() const { return map_.size(); }
  bool observable(EventId e) const { return map_[e] != kSilent; }
  OutputId output(EventId e) const { return map_[e]; }
  std::size_t num_outputs() const { return output_names_.size(); }
  const std::string& output_name(OutputId o) const { return output_names_[o]; }
  std::optional<OutputId> find_output(const std::string& symbol) const;

 private:
  std::vector<std::string> output_names_;
  std::unordered_map<std::string, OutputId> output_index_;
  std::vector<OutputId> map_;
};

// delta(initial, s); nullopt when some step is undefined.
std::optional<StateId> run(const Automaton& aut, std::span<const EventId> s);

// Observation string of s: non-silent outputs in order (a homomorphism).
std::vector<OutputId> project(const ObservationMap& h,
                              std::span<const EventId> s);

// Least superset of q closed under transitions labeled by h-silent events.
StateSet unobs_reach(const Automaton& aut, const ObservationMap& h,
                     const StateSet& q);

// Current-state estimate: targets of exactly the runs that look like alpha.
// Computed as iterated closure/step/closure; empty iff alpha is infeasible.
StateSet estimate_of(const Automaton& aut, const ObservationMap& h,
                     std::span<const OutputId> alpha);

struct ValidationReport {
  std::vector<std::pair<StateId, EventId>> determinism_violations;
  std::vector<StateId> unreachable_states;
  std::vector<StateId> dead_states;  // reachable, no outgoing transition

  bool ok() const {
    return determinism_violations.empty() && unreachable_states.empty() &&
           dead_states.empty();
  }
  bool live() const { return dead_states.empty(); }
  std::string to_string(const Automaton& aut) const;
};

ValidationReport validate(const Automaton& aut);

// Event/output string helpers. When every name in play is a single
// character, strings are read and written as plain concatenations ("cbd");
// otherwise tokens are whitespace-separated.
std::vector<EventId> parse_event_string(const Automaton& aut,
                                        const std::string& text);
std::string format_event_string(const Automaton& aut,
                                std::span<const EventId> s);
std::vector<OutputId> parse_output_string(const ObservationMap& h,
                                          const std::string& text);
std::string format_output_string(const ObservationMap& h,
                                 std::span<const OutputId> alpha);

// "{3,4}" with declared state names.
std::string format_state_set(const Automaton& aut, const StateSet& q);

}  // namespace epides
