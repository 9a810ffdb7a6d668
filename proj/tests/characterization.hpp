#pragma once

#include <functional>
#include <set>
#include <sstream>

#include "enumeration.hpp"
#include "epides/estimators.hpp"
#include "fixtures.hpp"

// Definitional characterizations of the estimator constructions, checked by
// bounded enumeration. Shared between the unit tests and the acceptance
// suite.

namespace epides::testing {

// Every string of the plant runs in the recognizer to exactly
// (plant target, definitional low estimate), and no other string runs.
inline bool check_recognizer_characterization(const Model& m,
                                              const Recognizer& rec,
                                              std::size_t max_len,
                                              std::string* why = nullptr) {
  for (const auto& s : enumerate_language(m.aut, max_len)) {
    auto plant_target = run(m.aut, s);
    auto rec_target = run(rec.graph, s);
    if (plant_target.has_value() != rec_target.has_value()) {
      if (why) *why = "domain mismatch on " + format_event_string(m.aut, s);
      return false;
    }
    if (!rec_target) continue;
    auto alpha = project(m.low, s);
    StateSet expect = definitional_estimate(m.aut, m.low, alpha);
    if (rec.plant_state[*rec_target] != *plant_target ||
        rec.estimate[*rec_target] != expect) {
      if (why)
        *why = "state mismatch on " + format_event_string(m.aut, s) +
               ": got " + rec.graph.state_name(*rec_target);
      return false;
    }
  }
  // Also require the recognizer to refuse strings the plant refuses.
  for (const auto& s : enumerate_language(rec.graph, max_len))
    if (!run(m.aut, s).has_value()) {
      if (why) *why = "extra string " + format_event_string(m.aut, s);
      return false;
    }
  return true;
}

inline std::vector<std::vector<OutputId>> all_output_strings(
    std::size_t n_outputs, std::size_t max_len) {
  std::vector<std::vector<OutputId>> result{{}};
  std::size_t first = 0;
  for (std::size_t len = 1; len <= max_len && n_outputs > 0; ++len) {
    std::size_t end = result.size();
    for (std::size_t i = first; i < end; ++i)
      for (OutputId o = 0; static_cast<std::size_t>(o) < n_outputs; ++o) {
        auto next = result[i];
        next.push_back(o);
        result.push_back(std::move(next));
      }
    first = end;
  }
  return result;
}

// The double-estimator state reached on beta holds exactly the recognizer
// states of the strings whose high projection is beta.
inline bool check_double_characterization(const Model& m,
                                          const Recognizer& rec,
                                          const DoubleEstimator& dbl,
                                          std::size_t max_len,
                                          std::string* why = nullptr) {
  for (const auto& beta : all_output_strings(m.high.num_outputs(), max_len)) {
    auto configs = definitional_configs(m.aut, m.low, m.high, beta);
    std::set<Config> expect(configs.begin(), configs.end());
    auto reached = run(dbl.graph, beta);
    if (reached.has_value() != !expect.empty()) {
      if (why)
        *why = "feasibility mismatch on " +
               format_output_string(m.high, beta);
      return false;
    }
    if (!reached) continue;
    std::set<Config> got;
    for (StateId q : dbl.members[*reached])
      got.insert({rec.plant_state[q], rec.estimate[q]});
    if (got != expect) {
      if (why)
        *why = "member mismatch on " + format_output_string(m.high, beta);
      return false;
    }
  }
  return true;
}

inline std::vector<std::vector<std::pair<TwinEvent, StateId>>> twin_adjacency(
    const TwinEstimator& twin) {
  std::vector<std::vector<std::pair<TwinEvent, StateId>>> adj(
      twin.graph.num_states());
  for (const Transition& t : twin.graph.transitions())
    adj[t.src].emplace_back(twin.events[t.event], t.dst);
  return adj;
}

// Twin soundness: every bounded path labels two plant strings with equal
// high projections and lands on the pair of their recognizer states.
inline bool check_twin_soundness(const Model& m, const Recognizer& rec,
                                 const TwinEstimator& twin,
                                 std::size_t max_edges,
                                 std::string* why = nullptr) {
  auto adj = twin_adjacency(twin);
  bool ok = true;
  std::function<void(StateId, std::vector<EventId>&, std::vector<EventId>&,
                     std::size_t)>
      dfs = [&](StateId v, std::vector<EventId>& s1, std::vector<EventId>& s2,
                std::size_t depth) {
        if (!ok) return;
        auto r1 = run(rec.graph, s1);
        auto r2 = run(rec.graph, s2);
        if (!r1 || !r2 || twin.rec_pair[v] != std::make_pair(*r1, *r2) ||
            project(m.high, s1) != project(m.high, s2)) {
          ok = false;
          if (why)
            *why = "unsound path: " + format_event_string(m.aut, s1) + " / " +
                   format_event_string(m.aut, s2);
          return;
        }
        if (depth == max_edges) return;
        for (const auto& [ev, dst] : adj[v]) {
          if (ev.first != kNoState) s1.push_back(ev.first);
          if (ev.second != kNoState) s2.push_back(ev.second);
          dfs(dst, s1, s2, depth + 1);
          if (ev.first != kNoState) s1.pop_back();
          if (ev.second != kNoState) s2.pop_back();
        }
      };
  std::vector<EventId> s1, s2;
  dfs(twin.graph.initial(), s1, s2, 0);
  return ok;
}

// Twin completeness: every pair of plant strings with equal high
// projections is the label of some twin path.
inline bool check_twin_completeness(const Model& m, const TwinEstimator& twin,
                                    std::size_t max_len,
                                    std::string* why = nullptr) {
  auto adj = twin_adjacency(twin);
  auto strings = enumerate_language(m.aut, max_len);
  for (const auto& s1 : strings) {
    for (const auto& s2 : strings) {
      if (project(m.high, s1) != project(m.high, s2)) continue;
      // Alignment search over (position, position, twin state).
      std::set<std::tuple<std::size_t, std::size_t, StateId>> visited;
      std::function<bool(std::size_t, std::size_t, StateId)> reach =
          [&](std::size_t i, std::size_t j, StateId v) {
            if (i == s1.size() && j == s2.size()) return true;
            if (!visited.insert({i, j, v}).second) return false;
            for (const auto& [ev, dst] : adj[v]) {
              std::size_t ni = i, nj = j;
              if (ev.first != kNoState) {
                if (i == s1.size() || s1[i] != ev.first) continue;
                ni = i + 1;
              }
              if (ev.second != kNoState) {
                if (j == s2.size() || s2[j] != ev.second) continue;
                nj = j + 1;
              }
              if (reach(ni, nj, dst)) return true;
            }
            return false;
          };
      if (!reach(0, 0, twin.graph.initial())) {
        if (why)
          *why = "missing alignment: " + format_event_string(m.aut, s1) +
                 " / " + format_event_string(m.aut, s2);
        return false;
      }
    }
  }
  return true;
}

// The state-pair estimator's triple set on beta equals the union over
// definitional configurations (x, E) of {x} x E x E.
inline bool check_spair_characterization(const Model& m,
                                         const StatePairEstimator& spe,
                                         std::size_t max_len,
                                         std::string* why = nullptr) {
  for (const auto& beta : all_output_strings(m.high.num_outputs(), max_len)) {
    std::set<Triple> expect;
    for (const auto& cfg :
         definitional_configs(m.aut, m.low, m.high, beta))
      for (StateId x1 : cfg.est)
        for (StateId x2 : cfg.est) expect.insert({cfg.x, x1, x2});
    auto reached = run(spe.graph, beta);
    if (reached.has_value() != !expect.empty()) {
      if (why)
        *why = "feasibility mismatch on " +
               format_output_string(m.high, beta);
      return false;
    }
    if (!reached) continue;
    std::set<Triple> got(spe.triples[*reached].begin(),
                         spe.triples[*reached].end());
    if (got != expect) {
      if (why)
        *why = "triple mismatch on " + format_output_string(m.high, beta);
      return false;
    }
  }
  return true;
}

}  // namespace epides::testing
