#include "epides/oracle.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>

namespace epides {

namespace {

// The helpers below intentionally duplicate estimate bookkeeping instead of
// reusing the estimator constructions: these evaluators exist to check
// those constructions, so they recompute everything from the raw model.

StateSet close_silent(const Automaton& g, const ObservationMap& h,
                      StateSet q) {
  for (std::size_t i = 0; i < q.size(); ++i)
    for (const Transition& t : g.transitions())
      if (t.src == q[i] && !h.observable(t.event) &&
          std::find(q.begin(), q.end(), t.dst) == q.end())
        q.push_back(t.dst);
  sets::canonicalize(q);
  return q;
}

StateSet step_output(const Automaton& g, const ObservationMap& h,
                     const StateSet& q, OutputId o) {
  StateSet out;
  for (StateId x : q)
    for (const Transition& t : g.transitions())
      if (t.src == x && h.observable(t.event) && h.output(t.event) == o)
        out.push_back(t.dst);
  sets::canonicalize(out);
  return out;
}

// One string's low-side situation: where the plant is and what the low
// observer considers possible. est is kept closed under low-silent moves.
struct Config {
  StateId x;
  StateSet est;
  auto operator<=>(const Config&) const = default;
};

Config initial_config(const Automaton& g, const ObservationMap& low) {
  return {g.initial(), close_silent(g, low, {g.initial()})};
}

Config advance(const Automaton& g, const ObservationMap& low, const Config& c,
               EventId e) {
  Config next;
  next.x = g.step(c.x, e);
  next.est = low.observable(e)
                 ? close_silent(g, low, step_output(g, low, c.est,
                                                    low.output(e)))
                 : c.est;
  return next;
}

// Configuration store with memoized single-event moves, so the searches
// below work with small integer ids.
struct ConfigPool {
  const Automaton& g;
  const ObservationMap& low;
  std::vector<Config> configs;
  std::map<Config, int> ids;
  std::map<std::pair<int, EventId>, int> moves;

  ConfigPool(const Automaton& g_, const ObservationMap& low_)
      : g(g_), low(low_) {}

  int intern(Config c) {
    auto it = ids.find(c);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(configs.size());
    configs.push_back(c);
    ids.emplace(std::move(c), id);
    return id;
  }

  int advance_id(int c, EventId e) {
    auto key = std::make_pair(c, e);
    auto it = moves.find(key);
    if (it != moves.end()) return it->second;
    int id = intern(advance(g, low, configs[c], e));
    moves.emplace(key, id);
    return id;
  }
};

}  // namespace

bool oracle_kw(const Automaton& plant, const ObservationMap& low,
               const KnowledgePredicate& pred,
               std::span<const OutputId> alpha) {
  // Estimate by saturating (state, consumed-prefix) pairs.
  std::set<std::pair<StateId, std::size_t>> seen;
  std::queue<std::pair<StateId, std::size_t>> work;
  seen.emplace(plant.initial(), 0);
  work.emplace(plant.initial(), 0);
  while (!work.empty()) {
    auto [x, pos] = work.front();
    work.pop();
    for (const Transition& t : plant.transitions()) {
      if (t.src != x) continue;
      std::size_t next = pos;
      if (low.observable(t.event)) {
        if (pos == alpha.size() || low.output(t.event) != alpha[pos])
          continue;
        next = pos + 1;
      }
      if (seen.emplace(t.dst, next).second) work.emplace(t.dst, next);
    }
  }
  StateSet estimate;
  for (const auto& [x, pos] : seen)
    if (pos == alpha.size()) estimate.push_back(x);
  sets::canonicalize(estimate);
  if (estimate.empty())
    throw input_error("infeasible low observation for this plant");
  return pred.eval(estimate);
}

KHigh oracle_hat_kw(const Automaton& plant, const ObservationMap& low,
                    const ObservationMap& high,
                    const KnowledgePredicate& pred,
                    std::span<const OutputId> beta) {
  ConfigPool pool(plant, low);
  int c0 = pool.intern(initial_config(plant, low));
  std::set<std::pair<int, std::size_t>> seen;
  std::queue<std::pair<int, std::size_t>> work;
  seen.emplace(c0, 0);
  work.emplace(c0, 0);
  bool any = false, saw_true = false, saw_false = false;
  while (!work.empty()) {
    auto [c, pos] = work.front();
    work.pop();
    if (pos == beta.size()) {
      any = true;
      (pred.eval(pool.configs[c].est) ? saw_true : saw_false) = true;
      if (saw_true && saw_false) return KHigh::U;
    }
    for (const Transition& t : plant.transitions()) {
      if (t.src != pool.configs[c].x) continue;
      std::size_t next = pos;
      if (high.observable(t.event)) {
        if (pos == beta.size() || high.output(t.event) != beta[pos])
          continue;
        next = pos + 1;
      }
      int nc = pool.advance_id(c, t.event);
      if (seen.emplace(nc, next).second) work.emplace(nc, next);
    }
  }
  if (!any) throw input_error("infeasible high observation for this plant");
  return saw_true ? KHigh::Y : KHigh::N;
}

bool oracle_pattern(const Automaton& plant, const ObservationMap& low,
                    const ObservationMap& high,
                    const KnowledgePredicate& pred, Pattern p) {
  if (!admissible(p))
    throw input_error("inadmissible pattern " + to_string(p));

  // Nodes pair one string's own configuration with the configuration set
  // of its whole high-observation class; together they determine both
  // knowledge values, so exploring all reachable nodes decides the
  // quantified formula exactly. Sets are interned and stepped at most once
  // per output symbol.
  ConfigPool pool(plant, low);
  using ConfigSet = std::vector<int>;  // sorted config ids

  auto saturate = [&](ConfigSet d) {
    std::set<int> grown(d.begin(), d.end());
    std::queue<int> work;
    for (int c : d) work.push(c);
    while (!work.empty()) {
      int c = work.front();
      work.pop();
      for (const Transition& t : plant.transitions()) {
        if (t.src != pool.configs[c].x || high.observable(t.event)) continue;
        int n = pool.advance_id(c, t.event);
        if (grown.insert(n).second) work.push(n);
      }
    }
    return ConfigSet(grown.begin(), grown.end());
  };

  std::vector<ConfigSet> dsets;
  std::map<ConfigSet, int> dset_ids;
  std::vector<KHigh> dset_class;
  auto intern_dset = [&](ConfigSet d) {
    auto it = dset_ids.find(d);
    if (it != dset_ids.end()) return it->second;
    int id = static_cast<int>(dsets.size());
    bool saw_true = false, saw_false = false;
    for (int c : d) (pred.eval(pool.configs[c].est) ? saw_true : saw_false) =
        true;
    dset_class.push_back(saw_true ? (saw_false ? KHigh::U : KHigh::Y)
                                  : KHigh::N);
    dsets.push_back(d);
    dset_ids.emplace(std::move(d), id);
    return id;
  };
  std::map<std::pair<int, OutputId>, int> dset_moves;
  auto step_dset = [&](int d, OutputId o) {
    auto key = std::make_pair(d, o);
    auto it = dset_moves.find(key);
    if (it != dset_moves.end()) return it->second;
    std::set<int> stepped;
    for (int c : dsets[d])
      for (const Transition& t : plant.transitions())
        if (t.src == pool.configs[c].x && high.observable(t.event) &&
            high.output(t.event) == o)
          stepped.insert(pool.advance_id(c, t.event));
    int id = intern_dset(saturate(ConfigSet(stepped.begin(), stepped.end())));
    dset_moves.emplace(key, id);
    return id;
  };

  bool forall = p.quant == Quantifier::ForAll;
  auto decides = [&](int c, int d) {
    if (pred.eval(pool.configs[c].est) != p.k_low) return false;
    return forall ? dset_class[d] != p.k_high : dset_class[d] == p.k_high;
  };

  int c0 = pool.intern(initial_config(plant, low));
  int d0 = intern_dset(saturate({c0}));
  std::set<std::pair<int, int>> seen;
  std::queue<std::pair<int, int>> work;
  seen.emplace(c0, d0);
  work.emplace(c0, d0);
  if (decides(c0, d0)) return !forall;
  while (!work.empty()) {
    auto [c, d] = work.front();
    work.pop();
    for (const Transition& t : plant.transitions()) {
      if (t.src != pool.configs[c].x) continue;
      int nc = pool.advance_id(c, t.event);
      int nd = high.observable(t.event) ? step_dset(d, high.output(t.event))
                                        : d;
      if (!seen.emplace(nc, nd).second) continue;
      if (decides(nc, nd)) return !forall;
      if (seen.size() > kOracleBudget)
        throw internal_error("oracle exploration budget exceeded");
      work.emplace(nc, nd);
    }
  }
  return forall;
}

std::optional<bool> oracle_finite_diag(const Automaton& plant,
                                       const ObservationMap& low,
                                       const ObservationMap& high,
                                       const StateSet& secret,
                                       std::size_t budget) {
  // Liveness check by hand: reachable states must all have a successor.
  {
    std::vector<char> seen(plant.num_states(), 0);
    std::queue<StateId> work;
    seen[plant.initial()] = 1;
    work.push(plant.initial());
    while (!work.empty()) {
      StateId x = work.front();
      work.pop();
      bool out = false;
      for (const Transition& t : plant.transitions()) {
        if (t.src != x) continue;
        out = true;
        if (!seen[t.dst]) {
          seen[t.dst] = 1;
          work.push(t.dst);
        }
      }
      if (!out)
        throw input_error(
            "the delayed check requires a live plant; state " +
            plant.state_name(x) + " has no outgoing transition");
    }
  }

  // Inline refinement: run the search over the plant extended with a
  // sticky visited bit, built here from scratch. Refined state 2x + bit.
  Automaton refined;
  {
    std::vector<char> in_secret(plant.num_states(), 0);
    for (StateId x : secret) in_secret[x] = 1;
    for (StateId x = 0; static_cast<std::size_t>(x) < plant.num_states(); ++x)
      for (int bit = 0; bit < 2; ++bit)
        refined.add_state(plant.state_name(x) + (bit ? "+" : "-"));
    for (EventId e = 0; static_cast<std::size_t>(e) < plant.num_events(); ++e)
      refined.add_event(plant.event_name(e));
    refined.set_initial(2 * plant.initial() +
                        (in_secret[plant.initial()] ? 1 : 0));
    for (const Transition& t : plant.transitions())
      for (int bit = 0; bit < 2; ++bit)
        refined.add_transition(
            2 * t.src + bit, t.event,
            2 * t.dst + ((bit || in_secret[t.dst]) ? 1 : 0));
  }

  ConfigPool pool(refined, low);
  // The low observer has revealed the visit exactly when every state it
  // considers possible carries the bit.
  auto revealed = [&](int c) {
    const StateSet& est = pool.configs[c].est;
    return std::all_of(est.begin(), est.end(),
                       [](StateId rx) { return rx % 2 == 1; });
  };

  // Explore pairs of configurations with equal high observations,
  // recording the reachable pair graph with its synchronization flags.
  int c0 = pool.intern(initial_config(refined, low));
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> nodes;
  std::set<std::tuple<int, int, bool>> edges;
  std::queue<int> work;
  auto intern_pair = [&](int a, int b) {
    auto [it, fresh] = index.emplace(std::make_pair(a, b),
                                     static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.emplace_back(a, b);
      work.push(it->second);
    }
    return it->second;
  };
  intern_pair(c0, c0);
  while (!work.empty()) {
    if (nodes.size() > budget) return std::nullopt;
    int i = work.front();
    work.pop();
    auto [a, b] = nodes[i];
    for (const Transition& t : refined.transitions()) {
      if (t.src == pool.configs[a].x && !high.observable(t.event))
        edges.emplace(i, intern_pair(pool.advance_id(a, t.event), b), false);
      if (t.src == pool.configs[b].x && !high.observable(t.event))
        edges.emplace(i, intern_pair(a, pool.advance_id(b, t.event)), false);
      if (t.src != pool.configs[a].x || !high.observable(t.event)) continue;
      for (const Transition& u : refined.transitions()) {
        if (u.src != pool.configs[b].x || !high.observable(u.event)) continue;
        if (high.output(u.event) != high.output(t.event)) continue;
        edges.emplace(i,
                      intern_pair(pool.advance_id(a, t.event),
                                  pool.advance_id(b, u.event)),
                      true);
      }
    }
  }

  // Violation: a cycle inside the region (first revealed, second not)
  // containing a synchronized edge. Checked per synchronized edge by
  // asking whether its head reaches its tail through the region.
  std::vector<char> mixed(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    mixed[i] = revealed(nodes[i].first) && !revealed(nodes[i].second);
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& [src, dst, sync] : edges)
    if (mixed[src] && mixed[dst]) adj[src].push_back(dst);
  auto reaches = [&](int from, int to) {
    std::vector<char> seen(nodes.size(), 0);
    std::queue<int> q;
    seen[from] = 1;
    q.push(from);
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      if (x == to) return true;
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          q.push(y);
        }
    }
    return false;
  };
  for (const auto& [src, dst, sync] : edges)
    if (sync && mixed[src] && mixed[dst] && reaches(dst, src)) return false;
  return true;
}

}  // namespace epides
