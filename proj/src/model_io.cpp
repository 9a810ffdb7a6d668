#include "epides/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"

namespace epides {

namespace {

struct Line {
  int number;  // 1-based
  std::vector<std::string> tokens;
};

// Splits into lines, strips '#' comments, tokenizes on whitespace. Leading
// comment lines (before any directive) are collected into header.
std::vector<Line> tokenize(const std::string& text,
                           std::vector<std::string>* header = nullptr) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  bool seen_directive = false;
  while (std::getline(in, raw)) {
    ++number;
    std::string body = raw;
    bool comment = false;
    if (auto hash = body.find('#'); hash != std::string::npos) {
      comment = body.find_first_not_of(" \t") == hash;
      if (header && comment && !seen_directive) {
        std::string note = body.substr(hash + 1);
        if (!note.empty() && note.front() == ' ') note.erase(0, 1);
        header->push_back(note);
      }
      body.erase(hash);
    }
    Line line{number, {}};
    std::istringstream ls(body);
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (line.tokens.empty()) continue;
    seen_directive = true;
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(const Line& l, const std::string& msg) {
  throw parse_error(l.number, msg);
}

void need_tokens(const Line& l, std::size_t n, const std::string& usage) {
  if (l.tokens.size() != n) fail(l, "expected '" + usage + "'");
}

StateId need_state(const Automaton& aut, const Line& l,
                   const std::string& id) {
  auto x = aut.find_state(id);
  if (!x) fail(l, "undeclared state '" + id + "'");
  return *x;
}

EventId need_event(const Automaton& aut, const Line& l,
                   const std::string& id) {
  auto e = aut.find_event(id);
  if (!e) fail(l, "undeclared event '" + id + "'");
  return *e;
}

}  // namespace

const StateSet* find_set(const ModelFile& m, const std::string& name) {
  for (const auto& [n, s] : m.sets)
    if (n == name) return &s;
  return nullptr;
}

ModelFile parse_model(const std::string& text) {
  ModelFile m;
  struct ObsLine {
    bool low;
    EventId event;
    std::string symbol;  // "_" for silent
  };
  std::vector<ObsLine> obs;
  std::vector<std::pair<bool, EventId>> obs_seen;
  bool have_init = false;

  for (const Line& l : tokenize(text, &m.header)) {
    const auto& t = l.tokens;
    if (t[0] == "model") {
      need_tokens(l, 2, "model NAME");
      if (!m.name.empty()) fail(l, "duplicate model line");
      m.name = t[1];
    } else if (m.name.empty()) {
      fail(l, "the model line must come first");
    } else if (t[0] == "states") {
      if (t.size() < 2) fail(l, "expected 'states id...'");
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (m.aut.find_state(t[i])) fail(l, "duplicate state '" + t[i] + "'");
        m.aut.add_state(t[i]);
      }
    } else if (t[0] == "init") {
      need_tokens(l, 2, "init id");
      if (have_init) fail(l, "duplicate init line");
      m.aut.set_initial(need_state(m.aut, l, t[1]));
      have_init = true;
    } else if (t[0] == "events") {
      if (t.size() < 2) fail(l, "expected 'events id...'");
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (m.aut.find_event(t[i])) fail(l, "duplicate event '" + t[i] + "'");
        m.aut.add_event(t[i]);
      }
    } else if (t[0] == "trans") {
      need_tokens(l, 4, "trans src ev dst");
      StateId src = need_state(m.aut, l, t[1]);
      EventId ev = need_event(m.aut, l, t[2]);
      StateId dst = need_state(m.aut, l, t[3]);
      if (m.aut.step(src, ev) != kNoState)
        fail(l, "duplicate transition from '" + t[1] + "' on '" + t[2] + "'");
      m.aut.add_transition(src, ev, dst);
    } else if (t[0] == "obs") {
      need_tokens(l, 4, "obs lo|hi ev out|_");
      if (t[1] != "lo" && t[1] != "hi")
        fail(l, "observer must be 'lo' or 'hi'");
      bool low = t[1] == "lo";
      EventId ev = need_event(m.aut, l, t[2]);
      if (std::find(obs_seen.begin(), obs_seen.end(),
                    std::make_pair(low, ev)) != obs_seen.end())
        fail(l, "duplicate observation for '" + t[2] + "'");
      obs_seen.emplace_back(low, ev);
      obs.push_back({low, ev, t[3]});
    } else if (t[0] == "set") {
      if (t.size() < 3) fail(l, "expected 'set NAME id...'");
      if (find_set(m, t[1])) fail(l, "duplicate set '" + t[1] + "'");
      StateSet xs;
      for (std::size_t i = 2; i < t.size(); ++i) {
        StateId x = need_state(m.aut, l, t[i]);
        if (sets::contains(xs, x))
          fail(l, "duplicate member '" + t[i] + "' in set '" + t[1] + "'");
        sets::insert(xs, x);
      }
      m.sets.emplace_back(t[1], std::move(xs));
    } else {
      fail(l, "unknown directive '" + t[0] + "'");
    }
  }

  if (m.name.empty()) throw input_error("model file has no model line");
  if (m.aut.num_states() == 0) throw input_error("model declares no states");
  if (!have_init) throw input_error("model has no init line");

  m.low = ObservationMap(m.aut.num_events());
  m.high = ObservationMap(m.aut.num_events());
  for (const ObsLine& o : obs) {
    ObservationMap& h = o.low ? m.low : m.high;
    if (o.symbol == "_")
      h.set_silent(o.event);
    else
      h.set_output(o.event, o.symbol);
  }
  return m;
}

std::string emit_model(const ModelFile& m) {
  std::ostringstream out;
  for (const std::string& note : m.header) out << "# " << note << "\n";
  out << "model " << m.name << "\n";
  out << "states";
  for (StateId x = 0; static_cast<std::size_t>(x) < m.aut.num_states(); ++x)
    out << " " << m.aut.state_name(x);
  out << "\ninit " << m.aut.state_name(m.aut.initial()) << "\n";
  if (m.aut.num_events() > 0) {
    out << "events";
    for (EventId e = 0; static_cast<std::size_t>(e) < m.aut.num_events(); ++e)
      out << " " << m.aut.event_name(e);
    out << "\n";
  }
  for (const Transition& t : m.aut.transitions())
    out << "trans " << m.aut.state_name(t.src) << " "
        << m.aut.event_name(t.event) << " " << m.aut.state_name(t.dst)
        << "\n";
  auto emit_obs = [&](const char* role, const ObservationMap& h) {
    for (EventId e = 0; static_cast<std::size_t>(e) < h.domain_size(); ++e)
      if (h.observable(e))
        out << "obs " << role << " " << m.aut.event_name(e) << " "
            << h.output_name(h.output(e)) << "\n";
  };
  emit_obs("lo", m.low);
  emit_obs("hi", m.high);
  for (const auto& [name, xs] : m.sets) {
    out << "set " << name;
    for (StateId x : xs) out << " " << m.aut.state_name(x);
    out << "\n";
  }
  return out.str();
}

namespace {

TSpec parse_pair_list(const ModelFile& m, const Line& l,
                      const std::string& text) {
  TSpec t;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  auto read_until = [&](char stop) {
    skip_ws();
    std::string id;
    while (i < text.size() && text[i] != stop &&
           !std::isspace(static_cast<unsigned char>(text[i])))
      id += text[i++];
    skip_ws();
    if (i == text.size() || text[i] != stop)
      fail(l, std::string("expected '") + stop + "' in pair list");
    ++i;
    if (id.empty()) fail(l, "empty identifier in pair list");
    return id;
  };
  skip_ws();
  if (i == text.size()) fail(l, "expected at least one pair");
  while (i < text.size()) {
    if (text[i] != '(') fail(l, "expected '(' in pair list");
    ++i;
    std::string a = read_until(',');
    std::string b = read_until(')');
    t.add(need_state(m.aut, l, a), need_state(m.aut, l, b));
    skip_ws();
  }
  return t;
}

const StateSet& need_set(const ModelFile& m, const Line& l,
                         const std::string& name) {
  const StateSet* s = find_set(m, name);
  if (!s) fail(l, "model '" + m.name + "' has no set '" + name + "'");
  return *s;
}

// Pair-specification subgrammar shared by predicate and property lines:
// distinct | pairs (a,b)... | nonsecret-square SET | square SET.
TSpec parse_tspec(const ModelFile& m, const Line& l, std::size_t from) {
  const auto& t = l.tokens;
  const std::string& kind = t[from];
  if (kind == "distinct") {
    if (t.size() != from + 1) fail(l, "'distinct' takes no arguments");
    return tspec_distinct_pairs(m.aut.num_states());
  }
  if (kind == "pairs") {
    std::string rest;
    for (std::size_t i = from + 1; i < t.size(); ++i) rest += t[i] + " ";
    return parse_pair_list(m, l, rest);
  }
  if (kind == "nonsecret-square") {
    if (t.size() != from + 2) fail(l, "expected 'nonsecret-square SET'");
    return tspec_nonsecret_square(m.aut.num_states(),
                                  need_set(m, l, t[from + 1]));
  }
  if (kind == "square") {
    if (t.size() != from + 2) fail(l, "expected 'square SET'");
    return tspec_square(need_set(m, l, t[from + 1]));
  }
  fail(l, "unknown pair specification '" + kind + "'");
}

// secret id... | secret SET
StateSet parse_secret(const ModelFile& m, const Line& l, std::size_t from) {
  const auto& t = l.tokens;
  if (t.size() == from) fail(l, "expected state ids or a set name");
  if (t.size() == from + 1 && !m.aut.find_state(t[from]) &&
      find_set(m, t[from]))
    return need_set(m, l, t[from]);
  StateSet xs;
  for (std::size_t i = from; i < t.size(); ++i)
    sets::insert(xs, need_state(m.aut, l, t[i]));
  return xs;
}

Pattern parse_pattern(const Line& l) {
  need_tokens(l, 4, "pattern forall|exists T|F Y|N|U");
  const auto& t = l.tokens;
  Pattern p;
  if (t[1] == "forall")
    p.quant = Quantifier::ForAll;
  else if (t[1] == "exists")
    p.quant = Quantifier::Exists;
  else
    fail(l, "quantifier must be 'forall' or 'exists'");
  if (t[2] == "T")
    p.k_low = true;
  else if (t[2] == "F")
    p.k_low = false;
  else
    fail(l, "low-side value must be 'T' or 'F'");
  if (t[3] == "Y")
    p.k_high = KHigh::Y;
  else if (t[3] == "N")
    p.k_high = KHigh::N;
  else if (t[3] == "U")
    p.k_high = KHigh::U;
  else
    fail(l, "high-side value must be 'Y', 'N' or 'U'");
  if (!admissible(p))
    fail(l, "pattern " + to_string(p) +
                " is rejected: some patterns are meaningless because the "
                "low-side value already refutes the high-side claim");
  return p;
}

}  // namespace

SpecFile parse_spec(const std::string& text, const ModelRegistry& models) {
  std::string name, model_name;
  EngineChoice engine = EngineChoice::Auto;
  const ModelFile* model = nullptr;
  std::optional<TSpec> predicate;
  std::vector<Pattern> patterns;
  std::optional<VerificationTask> preset;
  bool have_engine = false;

  for (const Line& l : tokenize(text)) {
    const auto& t = l.tokens;
    if (t[0] == "spec") {
      need_tokens(l, 2, "spec NAME");
      if (!name.empty()) fail(l, "duplicate spec line");
      name = t[1];
    } else if (name.empty()) {
      fail(l, "the spec line must come first");
    } else if (t[0] == "model") {
      need_tokens(l, 2, "model NAME");
      if (model) fail(l, "duplicate model line");
      auto it = models.find(t[1]);
      if (it == models.end()) fail(l, "model '" + t[1] + "' is not loaded");
      model = &it->second;
      model_name = t[1];
    } else if (t[0] == "predicate") {
      if (!model) fail(l, "predicate before the model line");
      if (predicate) fail(l, "duplicate predicate line");
      if (preset) fail(l, "a property preset already defines the predicate");
      if (t.size() < 3 || t[1] != "dis")
        fail(l, "expected 'predicate dis ...'");
      predicate = parse_tspec(*model, l, 2);
    } else if (t[0] == "pattern") {
      if (!model) fail(l, "pattern before the model line");
      if (preset) fail(l, "a property preset already defines the patterns");
      patterns.push_back(parse_pattern(l));
    } else if (t[0] == "property") {
      if (!model) fail(l, "property before the model line");
      if (preset) fail(l, "duplicate property line");
      if (predicate || !patterns.empty())
        fail(l, "property presets and explicit predicate/pattern lines are "
                "mutually exclusive");
      if (t.size() < 2) fail(l, "expected 'property PRESET args...'");
      std::optional<TSpec> tspec;
      std::optional<StateSet> secret;
      if (t.size() > 2 && t[2] == "secret")
        secret = parse_secret(*model, l, 3);
      else if (t.size() > 2)
        tspec = parse_tspec(*model, l, 2);
      try {
        preset = preset_task(t[1], model->aut, model->low, model->high, tspec,
                             secret);
      } catch (const input_error& e) {
        fail(l, e.what());
      }
    } else if (t[0] == "engine") {
      need_tokens(l, 2, "engine auto|double|twin|spair|oracle");
      if (have_engine) fail(l, "duplicate engine line");
      auto ec = parse_engine(t[1]);
      if (!ec) fail(l, "unknown engine '" + t[1] + "'");
      engine = *ec;
      have_engine = true;
    } else {
      fail(l, "unknown directive '" + t[0] + "'");
    }
  }

  if (name.empty()) throw input_error("spec file has no spec line");
  if (!model) throw input_error("spec file has no model line");
  if (!preset) {
    if (!predicate)
      throw input_error(
          "spec file needs a predicate line or a property preset");
    if (patterns.empty())
      throw input_error("spec file declares no pattern lines");
    preset = make_task(model->aut, model->low, model->high,
                       KnowledgePredicate::dis(std::move(*predicate)),
                       std::move(patterns));
  }
  return SpecFile{std::move(name), std::move(model_name), std::move(*preset),
                  engine};
}

std::string emit_verdict(const Verdict& v, const std::string& spec_name) {
  nlohmann::ordered_json j;
  j["spec"] = spec_name;
  j["holds"] = v.holds;
  j["engine"] = to_string(v.engine);
  if (v.witness) {
    const Witness& w = *v.witness;
    nlohmann::ordered_json jw;
    jw["systemString"] = w.system_string;
    jw["lowObs"] = w.low_obs;
    jw["highObs"] = w.high_obs;
    if (w.confused) jw["confusedString"] = *w.confused;
    if (w.lasso) {
      nlohmann::ordered_json jl;
      jl["stem"] = w.lasso->stem;
      jl["cycle"] = w.lasso->cycle;
      jw["lasso"] = std::move(jl);
    }
    j["witness"] = std::move(jw);
  }
  nlohmann::ordered_json js;
  js["recognizerStates"] = v.stats.recognizer_states;
  js["estimatorStates"] = v.stats.estimator_states;
  js["buildMs"] = v.stats.build_ms;
  js["checkMs"] = v.stats.check_ms;
  j["stats"] = std::move(js);
  j["interpretationNotes"] = v.notes;
  return j.dump(2) + "\n";
}

ModelFile gen_random(std::uint64_t seed, std::size_t n_states,
                     std::size_t n_events, double density, double p_low_obs,
                     double p_high_obs) {
  if (n_states < 1) throw input_error("generation needs at least one state");
  if (n_events > 26)
    throw input_error("generation supports at most 26 events");
  if (!(density > 0.0) || density > 1.0)
    throw input_error("density must lie in (0,1]");
  for (double p : {p_low_obs, p_high_obs})
    if (!(p >= 0.0) || p > 1.0)
      throw input_error("observation probabilities must lie in [0,1]");

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x1234567890abcdefULL);
  auto chance = [&](double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
  };
  auto pick = [&](std::size_t n) {
    return static_cast<StateId>(rng() % n);
  };

  // All randomness is drawn in this fixed order; the repair steps below are
  // deterministic, so equal arguments give byte-identical files.
  std::vector<Transition> raw;
  for (StateId src = 0; static_cast<std::size_t>(src) < n_states; ++src)
    for (EventId ev = 0; static_cast<std::size_t>(ev) < n_events; ++ev)
      if (chance(density)) raw.push_back({src, ev, pick(n_states)});

  struct ObsChoice {
    bool on = false;
    std::string symbol;
  };
  auto sample_map = [&](double p) {
    std::vector<ObsChoice> cs(n_events);
    std::vector<std::string> symbols;
    for (std::size_t ev = 0; ev < n_events; ++ev) {
      if (!chance(p)) continue;
      cs[ev].on = true;
      if (!symbols.empty() && chance(0.2))
        cs[ev].symbol = symbols[rng() % symbols.size()];
      else
        cs[ev].symbol = std::string(1, static_cast<char>('a' + ev));
      symbols.push_back(cs[ev].symbol);
    }
    return cs;
  };
  std::vector<ObsChoice> low_obs = sample_map(p_low_obs);
  std::vector<ObsChoice> high_obs = sample_map(p_high_obs);

  std::vector<char> reach(n_states, 0);
  reach[0] = 1;
  for (bool grown = true; grown;) {
    grown = false;
    for (const Transition& t : raw)
      if (reach[t.src] && !reach[t.dst]) {
        reach[t.dst] = 1;
        grown = true;
      }
  }
  std::vector<char> dead(n_states, 0);
  for (StateId x = 0; static_cast<std::size_t>(x) < n_states; ++x)
    if (reach[x]) {
      dead[x] = 1;
      for (const Transition& t : raw)
        if (t.src == x) dead[x] = 0;
    }

  ModelFile m;
  m.name = "R" + std::to_string(seed);
  {
    char note[160];
    std::snprintf(note, sizeof note,
                  "generated: seed=%llu states=%zu events=%zu density=%.3g "
                  "pLow=%.3g pHigh=%.3g",
                  static_cast<unsigned long long>(seed), n_states, n_events,
                  density, p_low_obs, p_high_obs);
    m.header.emplace_back(note);
  }

  std::vector<StateId> remap(n_states, kNoState);
  std::string dropped;
  for (StateId x = 0; static_cast<std::size_t>(x) < n_states; ++x) {
    if (!reach[x]) {
      dropped += " " + std::to_string(x);
      continue;
    }
    remap[x] = m.aut.add_state(std::to_string(x));
  }
  if (!dropped.empty())
    m.header.push_back("dropped unreachable states:" + dropped);

  for (std::size_t ev = 0; ev < n_events; ++ev)
    m.aut.add_event(std::string(1, static_cast<char>('a' + ev)));
  m.aut.set_initial(remap[0]);
  for (const Transition& t : raw)
    if (reach[t.src]) m.aut.add_transition(remap[t.src], t.event, remap[t.dst]);

  std::size_t fresh = n_events;
  for (StateId x = 0; static_cast<std::size_t>(x) < n_states; ++x) {
    if (!dead[x]) continue;
    std::string name = fresh < 26
                           ? std::string(1, static_cast<char>('a' + fresh))
                           : "s" + std::to_string(fresh);
    ++fresh;
    EventId ev = m.aut.add_event(name);
    m.aut.add_transition(remap[x], ev, remap[x]);
    m.header.push_back("dead state " + std::to_string(x) +
                       " repaired with a silent self-loop on fresh event " +
                       name);
  }

  m.low = ObservationMap(m.aut.num_events());
  m.high = ObservationMap(m.aut.num_events());
  for (std::size_t ev = 0; ev < n_events; ++ev) {
    if (low_obs[ev].on)
      m.low.set_output(static_cast<EventId>(ev), low_obs[ev].symbol);
    if (high_obs[ev].on)
      m.high.set_output(static_cast<EventId>(ev), high_obs[ev].symbol);
  }
  return m;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string engine_label(EngineChoice ec) {
  std::string s = to_string(ec);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::string bench_csv(const std::vector<BenchEntry>& entries,
                      const std::vector<EngineChoice>& engines) {
  std::string out =
      "model,engine,recognizerStates,estimatorStates,buildMs,checkMs,error\n";
  char buf[64];
  for (const BenchEntry& entry : entries) {
    if (!entry.model) {
      out += csv_escape(entry.name) + ",,,,,," + csv_escape(entry.error) + "\n";
      continue;
    }
    const ModelFile& m = *entry.model;
    for (EngineChoice ec : engines) {
      out += csv_escape(entry.name) + ",";
      try {
        // One representative pattern the engine can decide.
        Pattern p{Quantifier::ForAll, true,
                  ec == EngineChoice::Twin ? KHigh::Y : KHigh::U};
        auto task = make_task(
            m.aut, m.low, m.high,
            KnowledgePredicate::dis(tspec_distinct_pairs(m.aut.num_states())),
            {p});
        Verdict v = verify(task, ec);
        out += to_string(v.engine);
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.3f,%.3f,",
                      v.stats.recognizer_states, v.stats.estimator_states,
                      v.stats.build_ms, v.stats.check_ms);
        out += buf;
        out += "\n";
      } catch (const std::exception& e) {
        out += engine_label(ec) + ",,,,," + csv_escape(e.what()) + "\n";
      }
    }
  }
  return out;
}

}  // namespace epides
