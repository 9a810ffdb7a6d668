#include "epides/estimators.hpp"

#include <chrono>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace epides {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string pair_name(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

}  // namespace

Recognizer build_recognizer(const Automaton& plant, const ObservationMap& low) {
  auto t0 = Clock::now();
  if (low.domain_size() != plant.num_events())
    throw input_error("observation map does not cover the plant's events");

  Recognizer rec;
  for (EventId e = 0; static_cast<std::size_t>(e) < plant.num_events(); ++e)
    rec.graph.add_event(plant.event_name(e));

  // Estimates are interned so states and the per-output step cache can key
  // on small integers.
  std::vector<StateSet> est_pool;
  std::map<StateSet, int> est_index;
  auto intern_est = [&](StateSet s) {
    auto it = est_index.find(s);
    if (it != est_index.end()) return it->second;
    int id = static_cast<int>(est_pool.size());
    est_index.emplace(s, id);
    est_pool.push_back(std::move(s));
    return id;
  };

  std::map<std::pair<StateId, int>, StateId> state_index;
  std::vector<int> est_of;  // per graph state
  auto intern_state = [&](StateId x, int est) {
    auto key = std::make_pair(x, est);
    auto it = state_index.find(key);
    if (it != state_index.end()) return std::make_pair(it->second, false);
    StateId id = rec.graph.add_state(
        pair_name(plant.state_name(x), format_state_set(plant, est_pool[est])));
    rec.plant_state.push_back(x);
    rec.estimate.push_back(est_pool[est]);
    est_of.push_back(est);
    state_index.emplace(key, id);
    return std::make_pair(id, true);
  };

  // Estimate after one more observed output, starting from a closed set.
  std::map<std::pair<int, OutputId>, int> step_cache;
  auto advance_est = [&](int est, OutputId o) {
    auto key = std::make_pair(est, o);
    auto it = step_cache.find(key);
    if (it != step_cache.end()) return it->second;
    StateSet next;
    for (StateId x : est_pool[est]) {
      for (EventId e = 0; static_cast<std::size_t>(e) < plant.num_events();
           ++e) {
        if (!low.observable(e) || low.output(e) != o) continue;
        StateId y = plant.step(x, e);
        if (y != kNoState) sets::insert(next, y);
      }
    }
    int id = intern_est(unobs_reach(plant, low, next));
    step_cache.emplace(key, id);
    return id;
  };

  int init_est = intern_est(unobs_reach(plant, low, {plant.initial()}));
  auto [init, _] = intern_state(plant.initial(), init_est);
  rec.graph.set_initial(init);
  std::queue<StateId> work;
  work.push(init);
  while (!work.empty()) {
    StateId q = work.front();
    work.pop();
    StateId x = rec.plant_state[q];
    for (EventId e = 0; static_cast<std::size_t>(e) < plant.num_events();
         ++e) {
      StateId y = plant.step(x, e);
      if (y == kNoState) continue;
      int est =
          low.observable(e) ? advance_est(est_of[q], low.output(e)) : est_of[q];
      auto [q2, fresh] = intern_state(y, est);
      rec.graph.add_transition(q, e, q2);
      if (fresh) work.push(q2);
    }
  }

  rec.stats = {rec.graph.num_states(), rec.graph.transitions().size(),
               ms_since(t0)};
  return rec;
}

Classification classify(const Recognizer& rec, const KnowledgePredicate& pred) {
  Classification cls;
  cls.known.resize(rec.graph.num_states());
  for (StateId q = 0; static_cast<std::size_t>(q) < rec.graph.num_states();
       ++q) {
    bool t = pred.eval(rec.estimate[q]);
    cls.known[q] = t;
    (t ? cls.q_t : cls.q_f).push_back(q);
  }
  return cls;
}

DoubleEstimator build_double(const Recognizer& rec,
                             const ObservationMap& high) {
  auto t0 = Clock::now();
  if (high.domain_size() != rec.graph.num_events())
    throw input_error("observation map does not cover the plant's events");

  auto silent_close = [&](StateSet q) {
    std::vector<StateId> work(q.begin(), q.end());
    while (!work.empty()) {
      StateId s = work.back();
      work.pop_back();
      for (EventId e = 0;
           static_cast<std::size_t>(e) < rec.graph.num_events(); ++e) {
        if (high.observable(e)) continue;
        StateId y = rec.graph.step(s, e);
        if (y != kNoState && sets::insert(q, y)) work.push_back(y);
      }
    }
    return q;
  };

  DoubleEstimator dbl;
  for (OutputId o = 0; static_cast<std::size_t>(o) < high.num_outputs(); ++o)
    dbl.graph.add_event(high.output_name(o));

  std::map<StateSet, StateId> index;
  auto intern = [&](StateSet members) {
    auto it = index.find(members);
    if (it != index.end()) return std::make_pair(it->second, false);
    // Display members ordered by (plant state, estimate), not by the
    // incidental recognizer discovery order.
    StateSet display = members;
    std::sort(display.begin(), display.end(), [&](StateId a, StateId b) {
      if (rec.plant_state[a] != rec.plant_state[b])
        return rec.plant_state[a] < rec.plant_state[b];
      return rec.estimate[a] < rec.estimate[b];
    });
    std::string name = "{";
    for (std::size_t i = 0; i < display.size(); ++i) {
      if (i) name += ',';
      name += rec.graph.state_name(display[i]);
    }
    name += '}';
    StateId id = dbl.graph.add_state(name);
    index.emplace(members, id);
    dbl.members.push_back(std::move(members));
    return std::make_pair(id, true);
  };

  auto [init, _] = intern(silent_close({rec.graph.initial()}));
  dbl.graph.set_initial(init);
  std::queue<StateId> work;
  work.push(init);
  while (!work.empty()) {
    StateId d = work.front();
    work.pop();
    for (OutputId o = 0; static_cast<std::size_t>(o) < high.num_outputs();
         ++o) {
      StateSet next;
      for (StateId q : dbl.members[d]) {
        for (EventId e = 0;
             static_cast<std::size_t>(e) < rec.graph.num_events(); ++e) {
          if (!high.observable(e) || high.output(e) != o) continue;
          StateId y = rec.graph.step(q, e);
          if (y != kNoState) sets::insert(next, y);
        }
      }
      if (next.empty()) continue;
      auto [d2, fresh] = intern(silent_close(std::move(next)));
      dbl.graph.add_transition(d, static_cast<EventId>(o), d2);
      if (fresh) work.push(d2);
    }
  }

  dbl.stats = {dbl.graph.num_states(), dbl.graph.transitions().size(),
               ms_since(t0)};
  return dbl;
}

TwinEstimator build_twin(const Recognizer& rec, const ObservationMap& high) {
  auto t0 = Clock::now();
  if (high.domain_size() != rec.graph.num_events())
    throw input_error("observation map does not cover the plant's events");

  TwinEstimator twin;

  // Event pairs, ordered so that breadth-first exploration visits moves in
  // lexicographic order of the two component strings; an idle side sorts
  // after every real event.
  const long idle = static_cast<long>(rec.graph.num_events());
  std::vector<std::tuple<long, long, TwinEvent>> cands;
  for (EventId e1 = 0; static_cast<std::size_t>(e1) < rec.graph.num_events();
       ++e1) {
    if (!high.observable(e1)) {
      cands.push_back({e1, idle, {e1, kNoState, false}});
      cands.push_back({idle, e1, {kNoState, e1, false}});
      continue;
    }
    for (EventId e2 = 0;
         static_cast<std::size_t>(e2) < rec.graph.num_events(); ++e2)
      if (high.observable(e2) && high.output(e1) == high.output(e2))
        cands.push_back({e1, e2, {e1, e2, true}});
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });
  for (const auto& [i1, i2, ev] : cands) {
    std::string n1 = ev.first == kNoState ? "-" : rec.graph.event_name(ev.first);
    std::string n2 =
        ev.second == kNoState ? "-" : rec.graph.event_name(ev.second);
    twin.graph.add_event(pair_name(n1, n2));
    twin.events.push_back(ev);
  }

  std::map<std::pair<StateId, StateId>, StateId> index;
  auto intern = [&](StateId r1, StateId r2) {
    auto key = std::make_pair(r1, r2);
    auto it = index.find(key);
    if (it != index.end()) return std::make_pair(it->second, false);
    StateId id = twin.graph.add_state(
        pair_name(rec.graph.state_name(r1), rec.graph.state_name(r2)));
    twin.rec_pair.emplace_back(r1, r2);
    index.emplace(key, id);
    return std::make_pair(id, true);
  };

  auto [init, _] = intern(rec.graph.initial(), rec.graph.initial());
  twin.graph.set_initial(init);
  std::queue<StateId> work;
  work.push(init);
  while (!work.empty()) {
    StateId v = work.front();
    work.pop();
    auto [r1, r2] = twin.rec_pair[v];
    for (EventId te = 0; static_cast<std::size_t>(te) < twin.events.size();
         ++te) {
      const TwinEvent& ev = twin.events[te];
      StateId t1 = ev.first == kNoState ? r1 : rec.graph.step(r1, ev.first);
      StateId t2 = ev.second == kNoState ? r2 : rec.graph.step(r2, ev.second);
      if (t1 == kNoState || t2 == kNoState) continue;
      auto [v2, fresh] = intern(t1, t2);
      twin.graph.add_transition(v, te, v2);
      if (fresh) work.push(v2);
    }
  }

  twin.stats = {twin.graph.num_states(), twin.graph.transitions().size(),
                ms_since(t0)};
  return twin;
}

StatePairEstimator build_state_pair(const Automaton& plant,
                                    const ObservationMap& low,
                                    const ObservationMap& high) {
  auto t0 = Clock::now();
  if (low.domain_size() != plant.num_events() ||
      high.domain_size() != plant.num_events())
    throw input_error("observation map does not cover the plant's events");

  // Move tables. The first component replays the string the high observer
  // reasons about, so its silent moves must be high-silent too; the other
  // two components replay strings the low observer cannot distinguish from
  // it, with no constraint on their high outputs.
  std::vector<EventId> both_silent;
  std::vector<EventId> low_silent;
  std::vector<std::vector<EventId>> low_out(low.num_outputs());
  std::vector<std::vector<EventId>> low_out_high_silent(low.num_outputs());
  std::vector<std::vector<EventId>> high_out(high.num_outputs());
  for (EventId e = 0; static_cast<std::size_t>(e) < plant.num_events(); ++e) {
    if (!low.observable(e)) {
      low_silent.push_back(e);
      if (!high.observable(e)) both_silent.push_back(e);
    } else {
      low_out[low.output(e)].push_back(e);
      if (!high.observable(e)) low_out_high_silent[low.output(e)].push_back(e);
    }
    if (high.observable(e)) high_out[high.output(e)].push_back(e);
  }

  // Saturation under the three silent move kinds: (a) first component fires
  // a fully silent event, (b) a companion fires a low-silent event, (c) all
  // three synchronize on one low output while the first component's event
  // is high-silent.
  auto saturate = [&](std::set<Triple> seen) {
    std::vector<Triple> work(seen.begin(), seen.end());
    auto push = [&](Triple t) {
      if (seen.insert(t).second) work.push_back(t);
    };
    while (!work.empty()) {
      Triple t = work.back();
      work.pop_back();
      for (EventId e : both_silent) {
        StateId y = plant.step(t.x, e);
        if (y != kNoState) push({y, t.x1, t.x2});
      }
      for (EventId e : low_silent) {
        StateId y1 = plant.step(t.x1, e);
        if (y1 != kNoState) push({t.x, y1, t.x2});
        StateId y2 = plant.step(t.x2, e);
        if (y2 != kNoState) push({t.x, t.x1, y2});
      }
      for (OutputId o = 0; static_cast<std::size_t>(o) < low.num_outputs();
           ++o) {
        for (EventId e0 : low_out_high_silent[o]) {
          StateId y = plant.step(t.x, e0);
          if (y == kNoState) continue;
          for (EventId e1 : low_out[o]) {
            StateId y1 = plant.step(t.x1, e1);
            if (y1 == kNoState) continue;
            for (EventId e2 : low_out[o]) {
              StateId y2 = plant.step(t.x2, e2);
              if (y2 != kNoState) push({y, y1, y2});
            }
          }
        }
      }
    }
    return seen;
  };

  // One high output: the first component fires an event with that output,
  // companions synchronize only when the event is also low-visible.
  auto flip = [&](const std::set<Triple>& before, OutputId o) {
    std::set<Triple> after;
    for (const Triple& t : before) {
      for (EventId e : high_out[o]) {
        StateId y = plant.step(t.x, e);
        if (y == kNoState) continue;
        if (!low.observable(e)) {
          after.insert({y, t.x1, t.x2});
          continue;
        }
        OutputId lo = low.output(e);
        for (EventId e1 : low_out[lo]) {
          StateId y1 = plant.step(t.x1, e1);
          if (y1 == kNoState) continue;
          for (EventId e2 : low_out[lo]) {
            StateId y2 = plant.step(t.x2, e2);
            if (y2 != kNoState) after.insert({y, y1, y2});
          }
        }
      }
    }
    return after;
  };

  StatePairEstimator spe;
  for (OutputId o = 0; static_cast<std::size_t>(o) < high.num_outputs(); ++o)
    spe.graph.add_event(high.output_name(o));

  std::map<std::vector<Triple>, StateId> index;
  auto intern = [&](std::vector<Triple> triples) {
    auto it = index.find(triples);
    if (it != index.end()) return std::make_pair(it->second, false);
    std::string name = "{";
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (i) name += ',';
      name += "(" + plant.state_name(triples[i].x) + ",(" +
              plant.state_name(triples[i].x1) + "," +
              plant.state_name(triples[i].x2) + "))";
    }
    name += '}';
    StateId id = spe.graph.add_state(name);
    index.emplace(triples, id);
    spe.triples.push_back(std::move(triples));
    return std::make_pair(id, true);
  };

  StateId x0 = plant.initial();
  auto init_set = saturate({Triple{x0, x0, x0}});
  auto [init, _] =
      intern(std::vector<Triple>(init_set.begin(), init_set.end()));
  spe.graph.set_initial(init);
  std::queue<StateId> work;
  work.push(init);
  while (!work.empty()) {
    StateId p = work.front();
    work.pop();
    std::set<Triple> before(spe.triples[p].begin(), spe.triples[p].end());
    for (OutputId o = 0; static_cast<std::size_t>(o) < high.num_outputs();
         ++o) {
      auto after = saturate(flip(before, o));
      if (after.empty()) continue;
      auto [p2, fresh] =
          intern(std::vector<Triple>(after.begin(), after.end()));
      spe.graph.add_transition(p, static_cast<EventId>(o), p2);
      if (fresh) work.push(p2);
    }
  }

  spe.stats = {spe.graph.num_states(), spe.graph.transitions().size(),
               ms_since(t0)};
  return spe;
}

std::vector<StateId> certain_states(const StatePairEstimator& spe,
                                    const TSpec& tspec) {
  std::vector<StateId> result;
  for (StateId p = 0; static_cast<std::size_t>(p) < spe.graph.num_states();
       ++p) {
    bool clean = true;
    for (const Triple& t : spe.triples[p])
      if (tspec.contains(t.x1, t.x2)) {
        clean = false;
        break;
      }
    if (clean) result.push_back(p);
  }
  return result;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Automaton& graph, const std::string& title,
                   const std::vector<bool>* highlight) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(title) << "\" {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box];\n";
  if (graph.num_states() > 0 && graph.initial() != kNoState) {
    os << "  __init [shape=point];\n";
    os << "  __init -> q" << graph.initial() << ";\n";
  }
  for (StateId q = 0; static_cast<std::size_t>(q) < graph.num_states(); ++q) {
    os << "  q" << q << " [label=\"" << dot_escape(graph.state_name(q))
       << "\"";
    if (highlight && (*highlight)[q]) os << ", peripheries=2";
    os << "];\n";
  }
  for (const Transition& t : graph.transitions())
    os << "  q" << t.src << " -> q" << t.dst << " [label=\""
       << dot_escape(graph.event_name(t.event)) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const Recognizer& rec, const Classification* cls) {
  if (!cls) return to_dot(rec.graph, "recognizer");
  return to_dot(rec.graph, "recognizer", &cls->known);
}

std::string to_dot(const DoubleEstimator& dbl, const Classification* cls) {
  if (!cls) return to_dot(dbl.graph, "double-estimator");
  std::vector<bool> certain(dbl.graph.num_states(), false);
  for (StateId d = 0; static_cast<std::size_t>(d) < dbl.graph.num_states();
       ++d) {
    bool all = true;
    for (StateId q : dbl.members[d]) all = all && cls->known[q];
    certain[d] = all;
  }
  return to_dot(dbl.graph, "double-estimator", &certain);
}

std::string to_dot(const TwinEstimator& twin, const Classification* cls) {
  if (!cls) return to_dot(twin.graph, "twin-estimator");
  // Highlight the confusion states: left side known, right side not.
  std::vector<bool> mixed(twin.graph.num_states(), false);
  for (StateId v = 0; static_cast<std::size_t>(v) < twin.graph.num_states();
       ++v) {
    auto [r1, r2] = twin.rec_pair[v];
    mixed[v] = cls->known[r1] && !cls->known[r2];
  }
  return to_dot(twin.graph, "twin-estimator", &mixed);
}

std::string to_dot(const StatePairEstimator& spe, const TSpec* tspec) {
  if (!tspec) return to_dot(spe.graph, "state-pair-estimator");
  std::vector<bool> certain(spe.graph.num_states(), false);
  for (StateId p : certain_states(spe, *tspec)) certain[p] = true;
  return to_dot(spe.graph, "state-pair-estimator", &certain);
}

}  // namespace epides
