#include "epides/verify.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <span>

#include "epides/oracle.hpp"

namespace epides {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Breadth-first forest over a deterministic graph, expanding events in id
// order. First discovery therefore yields the shortest path, and among
// equal-length paths the lexicographically least in declared event order.
struct Bfs {
  std::vector<StateId> parent;
  std::vector<EventId> via;
  std::vector<StateId> order;  // discovery order

  explicit Bfs(const Automaton& g) {
    parent.assign(g.num_states(), kNoState);
    via.assign(g.num_states(), kNoState);
    std::vector<char> seen(g.num_states(), 0);
    std::queue<StateId> work;
    seen[g.initial()] = 1;
    work.push(g.initial());
    while (!work.empty()) {
      StateId x = work.front();
      work.pop();
      order.push_back(x);
      for (EventId e = 0; static_cast<std::size_t>(e) < g.num_events(); ++e) {
        StateId y = g.step(x, e);
        if (y == kNoState || seen[y]) continue;
        seen[y] = 1;
        parent[y] = x;
        via[y] = e;
        work.push(y);
      }
    }
  }

  std::vector<EventId> path_to(const Automaton& g, StateId v) const {
    std::vector<EventId> events;
    for (StateId x = v; x != g.initial(); x = parent[x]) {
      if (parent[x] == kNoState)
        throw internal_error("path requested to an undiscovered state");
      events.push_back(via[x]);
    }
    std::reverse(events.begin(), events.end());
    return events;
  }
};

// Shortest string over graph whose high projection is exactly beta and
// which ends in a state marked by target. Nodes are (state, consumed)
// pairs; expansion in event order keeps the lexicographic tie-break.
std::vector<EventId> lift_observation(const Automaton& graph,
                                      const ObservationMap& high,
                                      std::span<const OutputId> beta,
                                      const std::vector<char>& target) {
  const std::size_t len = beta.size();
  const std::size_t n = graph.num_states();
  auto id = [len](StateId x, std::size_t pos) {
    return static_cast<std::size_t>(x) * (len + 1) + pos;
  };
  std::vector<StateId> parent(n * (len + 1), kNoState);
  std::vector<EventId> via(n * (len + 1), kNoState);
  std::vector<char> seen(n * (len + 1), 0);
  std::queue<std::pair<StateId, std::size_t>> work;
  seen[id(graph.initial(), 0)] = 1;
  work.emplace(graph.initial(), 0);
  while (!work.empty()) {
    auto [x, pos] = work.front();
    work.pop();
    if (pos == len && target[x]) {
      std::vector<EventId> events;
      StateId cx = x;
      std::size_t cpos = pos;
      while (!(cx == graph.initial() && cpos == 0)) {
        EventId e = via[id(cx, cpos)];
        events.push_back(e);
        StateId px = parent[id(cx, cpos)];
        cpos -= high.observable(e) ? 1 : 0;
        cx = px;
      }
      std::reverse(events.begin(), events.end());
      return events;
    }
    for (EventId e = 0; static_cast<std::size_t>(e) < graph.num_events();
         ++e) {
      StateId y = graph.step(x, e);
      if (y == kNoState) continue;
      std::size_t next = pos;
      if (high.observable(e)) {
        if (pos == len || high.output(e) != beta[pos]) continue;
        next = pos + 1;
      }
      if (seen[id(y, next)]) continue;
      seen[id(y, next)] = 1;
      parent[id(y, next)] = x;
      via[id(y, next)] = e;
      work.emplace(y, next);
    }
  }
  throw internal_error("witness lift failed: observation has no realization");
}

Witness make_witness(const Automaton& evsrc, const ObservationMap& low,
                     const ObservationMap& high, std::span<const EventId> s,
                     bool k_low, KHigh k_high) {
  Witness w;
  w.system_string = format_event_string(evsrc, s);
  w.low_obs = format_output_string(low, project(low, s));
  w.high_obs = format_output_string(high, project(high, s));
  w.k_low = k_low;
  w.k_high = k_high;
  return w;
}

// What kind of estimator state decides the pattern, and what it means.
enum class Shape { AllKnown, AllUnknown, Mixed };

Shape deciding_shape(Pattern p) {
  if (p.k_high == KHigh::U && p.quant == Quantifier::ForAll)
    return p.k_low ? Shape::AllKnown : Shape::AllUnknown;
  if (p.k_high == KHigh::U) return Shape::Mixed;  // exists
  if (p.quant == Quantifier::Exists)
    return p.k_low ? Shape::AllKnown : Shape::AllUnknown;
  return Shape::Mixed;  // forall with a definite high value
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Double: return "DOUBLE";
    case Engine::Twin: return "TWIN";
    case Engine::Spair: return "SPAIR";
    case Engine::Oracle: return "ORACLE";
    case Engine::Cycle: return "CYCLE";
  }
  throw internal_error("unknown engine");
}

std::string to_string(EngineChoice e) {
  switch (e) {
    case EngineChoice::Auto: return "auto";
    case EngineChoice::Double: return "double";
    case EngineChoice::Twin: return "twin";
    case EngineChoice::Spair: return "spair";
    case EngineChoice::Oracle: return "oracle";
  }
  throw internal_error("unknown engine choice");
}

std::optional<EngineChoice> parse_engine(const std::string& name) {
  if (name == "auto") return EngineChoice::Auto;
  if (name == "double") return EngineChoice::Double;
  if (name == "twin") return EngineChoice::Twin;
  if (name == "spair") return EngineChoice::Spair;
  if (name == "oracle") return EngineChoice::Oracle;
  return std::nullopt;
}

Verdict check_double(const Recognizer& rec, const Classification& cls,
                     const DoubleEstimator& dbl, const ObservationMap& low,
                     const ObservationMap& high, Pattern p) {
  if (!admissible(p))
    throw input_error("inadmissible pattern " + to_string(p));
  auto t0 = Clock::now();

  Shape want = deciding_shape(p);
  auto shape_of = [&](StateId q) {
    bool any_t = false, any_f = false;
    for (StateId r : dbl.members[q]) (cls.known[r] ? any_t : any_f) = true;
    if (!any_f) return Shape::AllKnown;
    if (!any_t) return Shape::AllUnknown;
    return Shape::Mixed;
  };

  Bfs bfs(dbl.graph);
  StateId hit = kNoState;
  for (StateId q : bfs.order)
    if (shape_of(q) == want) {
      hit = q;
      break;
    }

  Verdict v;
  v.engine = Engine::Double;
  v.holds = (p.quant == Quantifier::ForAll) ? hit == kNoState : hit != kNoState;
  v.stats.recognizer_states = rec.graph.num_states();
  v.stats.estimator_states = dbl.graph.num_states();
  v.stats.build_ms = rec.stats.build_ms + dbl.stats.build_ms;

  if (hit != kNoState) {
    std::vector<EventId> alpha_events = bfs.path_to(dbl.graph, hit);
    // The double estimator's event ids are the high observer's output ids.
    std::vector<OutputId> beta(alpha_events.begin(), alpha_events.end());

    std::vector<char> side_t(rec.graph.num_states(), 0);
    std::vector<char> side_f(rec.graph.num_states(), 0);
    for (StateId r : dbl.members[hit]) (cls.known[r] ? side_t : side_f)[r] = 1;

    bool lift_known = want == Shape::AllKnown ||
                      (want == Shape::Mixed && p.k_low);
    auto s = lift_observation(rec.graph, high, beta,
                              lift_known ? side_t : side_f);
    KHigh actual = want == Shape::AllKnown
                       ? KHigh::Y
                       : (want == Shape::AllUnknown ? KHigh::N : KHigh::U);
    Witness w = make_witness(rec.graph, low, high, s, lift_known, actual);
    if (want == Shape::Mixed) {
      auto t = lift_observation(rec.graph, high, beta,
                                lift_known ? side_f : side_t);
      w.confused = format_event_string(rec.graph, t);
    }
    v.witness = std::move(w);
  }
  v.stats.check_ms = ms_since(t0);
  return v;
}

Verdict check_twin(const Recognizer& rec, const Classification& cls,
                   const TwinEstimator& twin, const ObservationMap& low,
                   const ObservationMap& high, Pattern p) {
  if (!admissible(p))
    throw input_error("inadmissible pattern " + to_string(p));
  bool forall = p.quant == Quantifier::ForAll;
  bool supported = (forall && p.k_high != KHigh::U) ||
                   (!forall && p.k_high == KHigh::U);
  if (!supported)
    throw input_error("pattern " + to_string(p) +
                      " is not decidable by the twin engine");
  auto t0 = Clock::now();

  // The deciding state has one component knowing and the other not,
  // regardless of pattern: for the universal patterns it is the
  // counterexample, for the existential ones the witness.
  Bfs bfs(twin.graph);
  StateId hit = kNoState;
  for (StateId q : bfs.order) {
    auto [r1, r2] = twin.rec_pair[q];
    if (cls.known[r1] != cls.known[r2]) {
      hit = q;
      break;
    }
  }

  Verdict v;
  v.engine = Engine::Twin;
  v.holds = forall ? hit == kNoState : hit != kNoState;
  v.stats.recognizer_states = rec.graph.num_states();
  v.stats.estimator_states = twin.graph.num_states();
  v.stats.build_ms = rec.stats.build_ms + twin.stats.build_ms;

  if (hit != kNoState) {
    std::vector<EventId> pair_events = bfs.path_to(twin.graph, hit);
    std::vector<EventId> s1, s2;
    for (EventId pe : pair_events) {
      const TwinEvent& te = twin.events[pe];
      if (te.first != kNoState) s1.push_back(te.first);
      if (te.second != kNoState) s2.push_back(te.second);
    }
    bool first_knows = cls.known[twin.rec_pair[hit].first];
    // Orient so system_string carries the pattern's low-side value.
    bool want_knowing_system = p.k_low;
    const std::vector<EventId>& sys =
        (first_knows == want_knowing_system) ? s1 : s2;
    const std::vector<EventId>& conf =
        (first_knows == want_knowing_system) ? s2 : s1;
    Witness w = make_witness(rec.graph, low, high, sys, p.k_low, KHigh::U);
    w.confused = format_event_string(rec.graph, conf);
    v.witness = std::move(w);
  }
  v.stats.check_ms = ms_since(t0);
  return v;
}

Verdict check_spair(const Automaton& plant, const StatePairEstimator& spe,
                    const TSpec& tspec, const ObservationMap& low,
                    const ObservationMap& high, Pattern p) {
  if (!admissible(p))
    throw input_error("inadmissible pattern " + to_string(p));
  bool forall_tu = p == Pattern{Quantifier::ForAll, true, KHigh::U};
  bool exists_ty = p == Pattern{Quantifier::Exists, true, KHigh::Y};
  if (!forall_tu && !exists_ty)
    throw input_error("pattern " + to_string(p) +
                      " is not decidable by the state-pair engine");
  auto t0 = Clock::now();

  std::vector<char> certain(spe.graph.num_states(), 0);
  for (StateId q : certain_states(spe, tspec)) certain[q] = 1;

  Bfs bfs(spe.graph);
  StateId hit = kNoState;
  for (StateId q : bfs.order)
    if (certain[q]) {
      hit = q;
      break;
    }

  Verdict v;
  v.engine = Engine::Spair;
  v.holds = forall_tu ? hit == kNoState : hit != kNoState;
  v.stats.estimator_states = spe.graph.num_states();
  v.stats.build_ms = spe.stats.build_ms;

  if (hit != kNoState) {
    std::vector<EventId> alpha_events = bfs.path_to(spe.graph, hit);
    std::vector<OutputId> beta(alpha_events.begin(), alpha_events.end());
    // Every realization of beta leaves the low observer knowing, so any
    // shortest one demonstrates the verdict.
    std::vector<char> all(plant.num_states(), 1);
    auto s = lift_observation(plant, high, beta, all);
    v.witness = make_witness(plant, low, high, s, true, KHigh::Y);
  }
  v.stats.check_ms = ms_since(t0);
  return v;
}

namespace {

// Iterative Tarjan strongly-connected components over the subgraph induced
// by keep; returns component ids (kNoState outside keep). Components are
// numbered in reverse topological completion order, which is irrelevant to
// callers: they only compare ids for equality.
std::vector<StateId> scc_of(const Automaton& g, const std::vector<char>& keep) {
  const std::size_t n = g.num_states();
  std::vector<StateId> comp(n, kNoState), low(n, 0), num(n, kNoState);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  StateId counter = 0, next_comp = 0;

  struct Frame {
    StateId x;
    EventId e;
  };
  for (StateId root = 0; static_cast<std::size_t>(root) < n; ++root) {
    if (!keep[root] || num[root] != kNoState) continue;
    std::vector<Frame> call;
    call.push_back({root, 0});
    num[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (static_cast<std::size_t>(f.e) < g.num_events()) {
        EventId e = f.e++;
        StateId y = g.step(f.x, e);
        if (y == kNoState || !keep[y]) continue;
        if (num[y] == kNoState) {
          num[y] = low[y] = counter++;
          stack.push_back(y);
          on_stack[y] = 1;
          call.push_back({y, 0});
        } else if (on_stack[y]) {
          low[f.x] = std::min(low[f.x], num[y]);
        }
      } else {
        StateId x = f.x;
        call.pop_back();
        if (!call.empty())
          low[call.back().x] = std::min(low[call.back().x], low[x]);
        if (low[x] == num[x]) {
          for (;;) {
            StateId y = stack.back();
            stack.pop_back();
            on_stack[y] = 0;
            comp[y] = next_comp;
            if (y == x) break;
          }
          ++next_comp;
        }
      }
    }
  }
  return comp;
}

// Shortest path within the kept subgraph, expanding events in id order.
std::vector<EventId> restricted_path(const Automaton& g,
                                     const std::vector<char>& keep,
                                     StateId from, StateId to) {
  std::vector<StateId> parent(g.num_states(), kNoState);
  std::vector<EventId> via(g.num_states(), kNoState);
  std::vector<char> seen(g.num_states(), 0);
  std::queue<StateId> work;
  seen[from] = 1;
  work.push(from);
  while (!work.empty()) {
    StateId x = work.front();
    work.pop();
    if (x == to) {
      std::vector<EventId> events;
      for (StateId c = to; c != from; c = parent[c]) events.push_back(via[c]);
      std::reverse(events.begin(), events.end());
      return events;
    }
    for (EventId e = 0; static_cast<std::size_t>(e) < g.num_events(); ++e) {
      StateId y = g.step(x, e);
      if (y == kNoState || !keep[y] || seen[y]) continue;
      seen[y] = 1;
      parent[y] = x;
      via[y] = e;
      work.push(y);
    }
  }
  throw internal_error("restricted path not found inside a component");
}

}  // namespace

Verdict check_finite_diag(const Automaton& plant, const Recognizer& rec,
                          const Classification& cls, const TwinEstimator& twin,
                          const ObservationMap& low,
                          const ObservationMap& high) {
  ValidationReport rep = validate(plant);
  if (!rep.live())
    throw input_error("the delayed check requires a live plant; " +
                      std::to_string(rep.dead_states.size()) +
                      " reachable state(s) have no outgoing transition");
  auto t0 = Clock::now();

  // Region where the first component knows and the second does not. The
  // twin is symmetric, so fixing this orientation loses no cycles.
  std::vector<char> mixed(twin.graph.num_states(), 0);
  for (StateId q = 0; static_cast<std::size_t>(q) < twin.graph.num_states();
       ++q) {
    auto [r1, r2] = twin.rec_pair[q];
    mixed[q] = cls.known[r1] && !cls.known[r2];
  }

  std::vector<StateId> comp = scc_of(twin.graph, mixed);

  // A violation needs a cycle inside the region with at least one
  // synchronized edge; equivalently, a synchronized edge within one
  // strongly connected component of the restricted subgraph.
  std::vector<char> in_violating_comp(twin.graph.num_states(), 0);
  bool found = false;
  for (const Transition& t : twin.graph.transitions()) {
    if (!twin.events[t.event].sync) continue;
    if (!mixed[t.src] || !mixed[t.dst]) continue;
    if (comp[t.src] != comp[t.dst]) continue;
    found = true;
    for (StateId q = 0; static_cast<std::size_t>(q) < twin.graph.num_states();
         ++q)
      if (comp[q] == comp[t.src]) in_violating_comp[q] = 1;
  }

  Verdict v;
  v.engine = Engine::Cycle;
  v.holds = !found;
  v.stats.recognizer_states = rec.graph.num_states();
  v.stats.estimator_states = twin.graph.num_states();
  v.stats.build_ms = rec.stats.build_ms + twin.stats.build_ms;
  v.notes.push_back(
      "cycle progress is measured on the synchronized high-observable pair "
      "events; one-sided silent loops alone never witness a violation");

  if (found) {
    // Anchor: first breadth-first-discovered state of any violating
    // component. Stem reaches it through the full twin.
    Bfs bfs(twin.graph);
    StateId anchor = kNoState;
    for (StateId q : bfs.order)
      if (in_violating_comp[q]) {
        anchor = q;
        break;
      }
    std::vector<char> keep(twin.graph.num_states(), 0);
    for (StateId q = 0; static_cast<std::size_t>(q) < twin.graph.num_states();
         ++q)
      keep[q] = in_violating_comp[q] && comp[q] == comp[anchor];

    // Shortest loop at the anchor through some synchronized edge of its
    // component: path to the edge, the edge, path back.
    std::vector<EventId> best_cycle;
    for (const Transition& t : twin.graph.transitions()) {
      if (!twin.events[t.event].sync || !keep[t.src] || !keep[t.dst]) continue;
      auto head = restricted_path(twin.graph, keep, anchor, t.src);
      auto tail = restricted_path(twin.graph, keep, t.dst, anchor);
      std::vector<EventId> cycle = std::move(head);
      cycle.push_back(t.event);
      cycle.insert(cycle.end(), tail.begin(), tail.end());
      if (best_cycle.empty() || cycle.size() < best_cycle.size())
        best_cycle = std::move(cycle);
    }
    std::vector<EventId> stem = bfs.path_to(twin.graph, anchor);

    std::vector<EventId> s1, s2;
    auto project_pair = [&](const std::vector<EventId>& pair_events) {
      for (EventId pe : pair_events) {
        const TwinEvent& te = twin.events[pe];
        if (te.first != kNoState) s1.push_back(te.first);
        if (te.second != kNoState) s2.push_back(te.second);
      }
    };
    project_pair(stem);
    project_pair(best_cycle);

    Witness w = make_witness(rec.graph, low, high, s1, true, KHigh::U);
    w.confused = format_event_string(rec.graph, s2);
    Lasso lasso;
    for (EventId pe : stem)
      lasso.stem.push_back(twin.graph.event_name(pe));
    for (EventId pe : best_cycle)
      lasso.cycle.push_back(twin.graph.event_name(pe));
    w.lasso = std::move(lasso);
    v.witness = std::move(w);
  }
  v.stats.check_ms = ms_since(t0);
  return v;
}

namespace {

bool twin_supported(Pattern p) {
  bool forall = p.quant == Quantifier::ForAll;
  return (forall && p.k_high != KHigh::U) ||
         (!forall && p.k_high == KHigh::U);
}

bool spair_supported(const KnowledgePredicate& pred, Pattern p) {
  if (!pred.is_dis()) return false;
  return p == Pattern{Quantifier::ForAll, true, KHigh::U} ||
         p == Pattern{Quantifier::Exists, true, KHigh::Y};
}

}  // namespace

Verdict verify(const VerificationTask& task, EngineChoice engine) {
  if (task.delayed) {
    if (engine == EngineChoice::Oracle) {
      auto t0 = Clock::now();
      auto result = oracle_finite_diag(task.model, task.low, task.high,
                                       *task.secret);
      if (!result)
        throw internal_error(
            "oracle did not saturate within its exploration budget");
      Verdict v;
      v.engine = Engine::Oracle;
      v.holds = *result;
      v.notes.push_back(
          "definitional oracle verdict; witnesses are not extracted");
      v.stats.check_ms = ms_since(t0);
      return v;
    }
    if (engine != EngineChoice::Auto)
      throw input_error("the delayed property is decided by cycle search; "
                        "engine " +
                        to_string(engine) + " cannot be forced");
    Recognizer rec = build_recognizer(task.model, task.low);
    Classification cls = classify(rec, task.predicate);
    TwinEstimator twin = build_twin(rec, task.high);
    return check_finite_diag(task.model, rec, cls, twin, task.low, task.high);
  }

  if (engine == EngineChoice::Oracle) {
    auto t0 = Clock::now();
    Verdict v;
    v.engine = Engine::Oracle;
    v.notes.push_back(
        "definitional oracle verdict; witnesses are not extracted");
    for (std::size_t i = 0; i < task.patterns.size(); ++i) {
      bool ok = oracle_pattern(task.model, task.low, task.high,
                               task.predicate, task.patterns[i]);
      if (!ok) {
        v.holds = false;
        if (task.patterns.size() > 1)
          v.notes.push_back("conjunct " + std::to_string(i + 1) + " of " +
                            std::to_string(task.patterns.size()) +
                            " violated: " + to_string(task.patterns[i]));
        break;
      }
    }
    if (v.holds && task.patterns.size() > 1)
      v.notes.push_back("all " + std::to_string(task.patterns.size()) +
                        " conjuncts hold");
    v.stats.check_ms = ms_since(t0);
    return v;
  }

  // Build each structure on first use; conjuncts share them.
  std::optional<Recognizer> rec;
  std::optional<Classification> cls;
  std::optional<DoubleEstimator> dbl;
  std::optional<TwinEstimator> twin;
  std::optional<StatePairEstimator> spe;
  auto need_rec = [&]() -> const Recognizer& {
    if (!rec) {
      rec = build_recognizer(task.model, task.low);
      cls = classify(*rec, task.predicate);
    }
    return *rec;
  };

  Verdict v;
  double check_ms = 0.0;
  for (std::size_t i = 0; i < task.patterns.size(); ++i) {
    Pattern p = task.patterns[i];
    EngineChoice pick = engine;
    if (pick == EngineChoice::Auto) {
      if (spair_supported(task.predicate, p))
        pick = EngineChoice::Spair;
      else if (twin_supported(p))
        pick = EngineChoice::Twin;
      else
        pick = EngineChoice::Double;
    }
    Verdict part;
    switch (pick) {
      case EngineChoice::Double: {
        need_rec();
        if (!dbl) dbl = build_double(*rec, task.high);
        part = check_double(*rec, *cls, *dbl, task.low, task.high, p);
        break;
      }
      case EngineChoice::Twin: {
        if (!twin_supported(p))
          throw input_error("pattern " + to_string(p) +
                            " is not decidable by the twin engine");
        need_rec();
        if (!twin) twin = build_twin(*rec, task.high);
        part = check_twin(*rec, *cls, *twin, task.low, task.high, p);
        break;
      }
      case EngineChoice::Spair: {
        if (!spair_supported(task.predicate, p))
          throw input_error("pattern " + to_string(p) +
                            " is not decidable by the state-pair engine");
        if (!spe) spe = build_state_pair(task.model, task.low, task.high);
        part = check_spair(task.model, *spe, task.predicate.tspec(),
                           task.low, task.high, p);
        break;
      }
      default:
        throw internal_error("unexpected engine choice in dispatch");
    }
    check_ms += part.stats.check_ms;
    bool last = i + 1 == task.patterns.size();
    if (!part.holds || last) {
      v = std::move(part);
      if (!v.holds && task.patterns.size() > 1)
        v.notes.push_back("conjunct " + std::to_string(i + 1) + " of " +
                          std::to_string(task.patterns.size()) +
                          " violated: " + to_string(p));
      if (v.holds && task.patterns.size() > 1)
        v.notes.push_back("all " + std::to_string(task.patterns.size()) +
                          " conjuncts hold");
      break;
    }
  }
  v.stats.check_ms = check_ms;
  return v;
}

}  // namespace epides
