#include "epides/automaton.hpp"

#include <map>
#include <queue>
#include <sstream>

namespace epides {

StateId Automaton::add_state(const std::string& name) {
  if (state_index_.count(name))
    throw input_error("duplicate state identifier: " + name);
  StateId id = static_cast<StateId>(state_names_.size());
  state_names_.push_back(name);
  state_index_.emplace(name, id);
  delta_.emplace_back(num_events(), kNoState);
  return id;
}

EventId Automaton::add_event(const std::string& name) {
  if (event_index_.count(name))
    throw input_error("duplicate event identifier: " + name);
  EventId id = static_cast<EventId>(event_names_.size());
  event_names_.push_back(name);
  event_index_.emplace(name, id);
  for (auto& row : delta_) row.push_back(kNoState);
  return id;
}

void Automaton::add_transition(StateId src, EventId event, StateId dst) {
  if (src < 0 || static_cast<std::size_t>(src) >= num_states() || dst < 0 ||
      static_cast<std::size_t>(dst) >= num_states() || event < 0 ||
      static_cast<std::size_t>(event) >= num_events())
    throw internal_error("transition endpoint out of range");
  transitions_.push_back({src, event, dst});
  if (delta_[src][event] == kNoState) delta_[src][event] = dst;
}

void Automaton::set_initial(StateId x) {
  if (x < 0 || static_cast<std::size_t>(x) >= num_states())
    throw internal_error("initial state out of range");
  initial_ = x;
}

std::optional<StateId> Automaton::find_state(const std::string& name) const {
  auto it = state_index_.find(name);
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EventId> Automaton::find_event(const std::string& name) const {
  auto it = event_index_.find(name);
  if (it == event_index_.end()) return std::nullopt;
  return it->second;
}

OutputId ObservationMap::set_output(EventId e, const std::string& symbol) {
  auto it = output_index_.find(symbol);
  OutputId o;
  if (it != output_index_.end()) {
    o = it->second;
  } else {
    o = static_cast<OutputId>(output_names_.size());
    output_names_.push_back(symbol);
    output_index_.emplace(symbol, o);
  }
  map_[e] = o;
  return o;
}

std::optional<OutputId> ObservationMap::find_output(
    const std::string& symbol) const {
  auto it = output_index_.find(symbol);
  if (it == output_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<StateId> run(const Automaton& aut, std::span<const EventId> s) {
  StateId x = aut.initial();
  for (EventId e : s) {
    if (e < 0 || static_cast<std::size_t>(e) >= aut.num_events())
      throw input_error("unknown event in string");
    x = aut.step(x, e);
    if (x == kNoState) return std::nullopt;
  }
  return x;
}

std::vector<OutputId> project(const ObservationMap& h,
                              std::span<const EventId> s) {
  std::vector<OutputId> out;
  for (EventId e : s) {
    if (e < 0 || static_cast<std::size_t>(e) >= h.domain_size())
      throw input_error("event outside the observation map's domain");
    if (h.observable(e)) out.push_back(h.output(e));
  }
  return out;
}

StateSet unobs_reach(const Automaton& aut, const ObservationMap& h,
                     const StateSet& q) {
  StateSet closed = q;
  std::vector<StateId> work(q.begin(), q.end());
  while (!work.empty()) {
    StateId x = work.back();
    work.pop_back();
    for (EventId e = 0; static_cast<std::size_t>(e) < aut.num_events(); ++e) {
      if (h.observable(e)) continue;
      StateId y = aut.step(x, e);
      if (y != kNoState && sets::insert(closed, y)) work.push_back(y);
    }
  }
  return closed;
}

StateSet estimate_of(const Automaton& aut, const ObservationMap& h,
                     std::span<const OutputId> alpha) {
  StateSet cur = unobs_reach(aut, h, {aut.initial()});
  for (OutputId o : alpha) {
    if (o < 0 || static_cast<std::size_t>(o) >= h.num_outputs())
      throw input_error("observation symbol outside the output alphabet");
    StateSet next;
    for (StateId x : cur) {
      for (EventId e = 0; static_cast<std::size_t>(e) < aut.num_events();
           ++e) {
        if (!h.observable(e) || h.output(e) != o) continue;
        StateId y = aut.step(x, e);
        if (y != kNoState) sets::insert(next, y);
      }
    }
    cur = unobs_reach(aut, h, next);
    if (cur.empty()) return cur;
  }
  return cur;
}

ValidationReport validate(const Automaton& aut) {
  ValidationReport report;

  std::map<std::pair<StateId, EventId>, int> decl_count;
  for (const Transition& t : aut.transitions())
    ++decl_count[{t.src, t.event}];
  for (const auto& [key, count] : decl_count)
    if (count > 1) report.determinism_violations.push_back(key);

  std::vector<bool> reachable(aut.num_states(), false);
  std::vector<bool> has_out(aut.num_states(), false);
  for (const Transition& t : aut.transitions()) has_out[t.src] = true;
  if (aut.initial() != kNoState) {
    std::queue<StateId> bfs;
    bfs.push(aut.initial());
    reachable[aut.initial()] = true;
    while (!bfs.empty()) {
      StateId x = bfs.front();
      bfs.pop();
      for (const Transition& t : aut.transitions()) {
        if (t.src != x || reachable[t.dst]) continue;
        reachable[t.dst] = true;
        bfs.push(t.dst);
      }
    }
  }
  for (StateId x = 0; static_cast<std::size_t>(x) < aut.num_states(); ++x) {
    if (!reachable[x])
      report.unreachable_states.push_back(x);
    else if (!has_out[x])
      report.dead_states.push_back(x);
  }
  return report;
}

std::string ValidationReport::to_string(const Automaton& aut) const {
  std::ostringstream os;
  for (const auto& [x, e] : determinism_violations)
    os << "determinism violation at (" << aut.state_name(x) << ", "
       << aut.event_name(e) << ")\n";
  for (StateId x : unreachable_states)
    os << "unreachable state " << aut.state_name(x) << "\n";
  for (StateId x : dead_states)
    os << "dead state " << aut.state_name(x) << " (no outgoing transition)\n";
  return os.str();
}

namespace {

bool all_single_char(const std::vector<std::string>& names) {
  for (const auto& n : names)
    if (n.size() != 1) return false;
  return true;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

std::vector<EventId> parse_event_string(const Automaton& aut,
                                        const std::string& text) {
  std::vector<std::string> names;
  for (EventId e = 0; static_cast<std::size_t>(e) < aut.num_events(); ++e)
    names.push_back(aut.event_name(e));
  std::vector<EventId> result;
  auto push = [&](const std::string& name) {
    auto id = aut.find_event(name);
    if (!id) throw input_error("unknown event identifier: " + name);
    result.push_back(*id);
  };
  if (all_single_char(names) && text.find_first_of(" \t") == std::string::npos)
    for (char c : text) push(std::string(1, c));
  else
    for (const auto& tok : split_tokens(text)) push(tok);
  return result;
}

std::string format_event_string(const Automaton& aut,
                                std::span<const EventId> s) {
  bool compact = true;
  for (EventId e : s)
    if (aut.event_name(e).size() != 1) compact = false;
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i && !compact) out += ' ';
    out += aut.event_name(s[i]);
  }
  return out;
}

std::vector<OutputId> parse_output_string(const ObservationMap& h,
                                          const std::string& text) {
  std::vector<std::string> names;
  for (OutputId o = 0; static_cast<std::size_t>(o) < h.num_outputs(); ++o)
    names.push_back(h.output_name(o));
  std::vector<OutputId> result;
  auto push = [&](const std::string& name) {
    auto id = h.find_output(name);
    if (!id) throw input_error("unknown observation symbol: " + name);
    result.push_back(*id);
  };
  if (all_single_char(names) && text.find_first_of(" \t") == std::string::npos)
    for (char c : text) push(std::string(1, c));
  else
    for (const auto& tok : split_tokens(text)) push(tok);
  return result;
}

std::string format_output_string(const ObservationMap& h,
                                 std::span<const OutputId> alpha) {
  bool compact = true;
  for (OutputId o : alpha)
    if (h.output_name(o).size() != 1) compact = false;
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i && !compact) out += ' ';
    out += h.output_name(alpha[i]);
  }
  return out;
}

std::string format_state_set(const Automaton& aut, const StateSet& q) {
  std::string out = "{";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ',';
    out += aut.state_name(q[i]);
  }
  out += '}';
  return out;
}

}  // namespace epides
