#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "characterization.hpp"
#include "epides/model_io.hpp"
#include "epides/oracle.hpp"
#include "epides/verify.hpp"
#include "random_models.hpp"

// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 1-4 replay the bundled examples exactly;
// criteria 5-8 are randomized agreement sweeps with fixed seeds.

using namespace epides;
using namespace epides::testing;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(EPIDES_FIXTURE_DIR) + "/" + name,
                   std::ios::binary);
  if (!in) throw input_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> state_names(const Automaton& g) {
  std::set<std::string> names;
  for (StateId x = 0; static_cast<std::size_t>(x) < g.num_states(); ++x)
    names.insert(g.state_name(x));
  return names;
}

std::vector<Triple> cross(const StateSet& xs, const StateSet& sq) {
  std::vector<Triple> out;
  for (StateId x : xs)
    for (StateId x1 : sq)
      for (StateId x2 : sq) out.push_back({x, x1, x2});
  std::sort(out.begin(), out.end());
  return out;
}

bool twin_can(const Pattern& p) {
  return p.quant == Quantifier::ForAll ? p.k_high != KHigh::U
                                       : p.k_high == KHigh::U;
}

bool spair_can(const Pattern& p) {
  return (p.quant == Quantifier::ForAll && p.k_low && p.k_high == KHigh::U) ||
         (p.quant == Quantifier::Exists && p.k_low && p.k_high == KHigh::Y);
}

std::vector<Pattern> admissible_patterns() {
  std::vector<Pattern> out;
  for (Quantifier q : {Quantifier::ForAll, Quantifier::Exists})
    for (bool kl : {true, false})
      for (KHigh kh : {KHigh::Y, KHigh::N, KHigh::U})
        if (Pattern p{q, kl, kh}; admissible(p)) out.push_back(p);
  return out;
}

// ---- criterion bodies ------------------------------------------------

bool criterion1(std::string& detail) {
  auto start = Clock::now();
  ModelFile g1 = parse_model(read_fixture("G1.des"));
  auto pred =
      KnowledgePredicate::dis(tspec_distinct_pairs(g1.aut.num_states()));

  Recognizer rec = build_recognizer(g1.aut, g1.low);
  if (rec.graph.num_states() != 10) {
    detail = "recognizer has " + std::to_string(rec.graph.num_states()) +
             " states, expected 10";
    return false;
  }
  if (state_names(rec.graph) !=
      std::set<std::string>{"(0,{0,1,2})", "(1,{0,1,2})", "(2,{0,1,2})",
                            "(3,{3,4})", "(4,{3,4})", "(4,{4})", "(5,{5,7})",
                            "(6,{6})", "(7,{5,7})", "(7,{7})"}) {
    detail = "recognizer state set differs";
    return false;
  }

  Classification cls = classify(rec, pred);
  std::set<std::string> q_t;
  for (StateId q : cls.q_t) q_t.insert(rec.graph.state_name(q));
  if (q_t != std::set<std::string>{"(4,{4})", "(6,{6})", "(7,{7})"}) {
    detail = "knowing region differs";
    return false;
  }

  DoubleEstimator dbl = build_double(rec, g1.high);
  if (state_names(dbl.graph) !=
      std::set<std::string>{"{(0,{0,1,2}),(2,{0,1,2})}", "{(1,{0,1,2})}",
                            "{(3,{3,4})}", "{(4,{3,4}),(4,{4}),(6,{6})}",
                            "{(5,{5,7})}", "{(7,{5,7}),(7,{7})}"}) {
    detail = "double estimator state set differs";
    return false;
  }

  Verdict v = verify(make_task(g1.aut, g1.low, g1.high, pred,
                               {{Quantifier::ForAll, true, KHigh::U}}));
  double elapsed = ms_since(start);
  if (!v.holds) {
    detail = "opacity verdict is violated, expected holds";
    return false;
  }
  if (elapsed >= 1000.0) {
    detail = "took too long";
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "10 recognizer / 6 double states, holds, %.1f ms", elapsed);
  detail = buf;
  return true;
}

bool criterion2(std::string& detail) {
  auto start = Clock::now();
  ModelFile g1 = parse_model(read_fixture("G1.des"));
  VerificationTask task = preset_task("epistemic-diagnosability", g1.aut,
                                      g1.low, g1.high, std::nullopt,
                                      StateSet{4});

  Recognizer rec = build_recognizer(g1.aut, g1.low);
  TwinEstimator twin = build_twin(rec, g1.high);
  if (!twin.graph.find_state("((4,{4}),(4,{3,4}))").has_value()) {
    detail = "confusion state ((4,{4}),(4,{3,4})) is not reachable";
    return false;
  }

  Verdict v = verify(task);
  double elapsed = ms_since(start);
  if (v.holds) {
    detail = "diagnosability holds, expected a violation";
    return false;
  }
  if (!v.witness.has_value()) {
    detail = "violation carries no witness";
    return false;
  }
  if (v.witness->system_string != "cbdd") {
    detail = "witness is '" + v.witness->system_string + "', expected 'cbdd'";
    return false;
  }
  if (!v.witness->confused.has_value() || *v.witness->confused != "cb") {
    detail = "confused string differs, expected 'cb'";
    return false;
  }
  if (elapsed >= 1000.0) {
    detail = "took too long";
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "violated with witness cbdd, confusion cb, %.1f ms", elapsed);
  detail = buf;
  return true;
}

bool criterion3(std::string& detail) {
  auto start = Clock::now();
  ModelFile g1 = parse_model(read_fixture("G1.des"));
  StatePairEstimator spe = build_state_pair(g1.aut, g1.low, g1.high);
  if (spe.graph.num_states() != 6) {
    detail = "state-pair estimator has " +
             std::to_string(spe.graph.num_states()) + " states, expected 6";
    return false;
  }

  std::vector<Triple> after_b = cross({4}, {3, 4});
  after_b.push_back({6, 6, 6});
  std::sort(after_b.begin(), after_b.end());
  std::set<std::vector<Triple>> expect{
      cross({0, 2}, {0, 1, 2}), cross({1}, {0, 1, 2}), after_b,
      cross({3}, {3, 4}),       cross({5}, {5, 7}),    cross({7}, {5, 7})};
  std::set<std::vector<Triple>> got(spe.triples.begin(), spe.triples.end());
  if (got != expect) {
    detail = "triple sets differ";
    return false;
  }

  TSpec distinct = tspec_distinct_pairs(g1.aut.num_states());
  if (!certain_states(spe, distinct).empty()) {
    detail = "certain region should be empty";
    return false;
  }

  VerificationTask task =
      make_task(g1.aut, g1.low, g1.high, KnowledgePredicate::dis(distinct),
                {{Quantifier::ForAll, true, KHigh::U}});
  Verdict via_spair = verify(task, EngineChoice::Spair);
  Verdict via_double = verify(task, EngineChoice::Double);
  double elapsed = ms_since(start);
  if (!via_spair.holds || via_spair.holds != via_double.holds) {
    detail = "state-pair and double verdicts disagree";
    return false;
  }
  if (elapsed >= 1000.0) {
    detail = "took too long";
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "6 states, empty certain region, verdicts agree, %.1f ms",
                elapsed);
  detail = buf;
  return true;
}

bool criterion4(std::string& detail) {
  auto start = Clock::now();
  ModelFile g0 = parse_model(read_fixture("G0.des"));
  const StateSet* yellow = find_set(g0, "yellow");
  if (!yellow) {
    detail = "fixture lacks the yellow set";
    return false;
  }
  VerificationTask task =
      preset_task("high-order-opacity", g0.aut, g0.low, g0.high,
                  tspec_square(*yellow), std::nullopt);
  Verdict v = verify(task);
  double elapsed = ms_since(start);
  if (v.holds) {
    detail = "opacity holds, expected a violation";
    return false;
  }
  if (!v.witness.has_value() || v.witness->system_string != "g") {
    detail = "shortest witness differs, expected 'g'";
    return false;
  }
  if (elapsed >= 1000.0) {
    detail = "took too long";
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "violated with shortest witness g, %.1f ms",
                elapsed);
  detail = buf;
  return true;
}

struct SuiteResult {
  std::size_t oracle_comparisons = 0;
  std::size_t oracle_disagreements = 0;
  std::size_t engine_comparisons = 0;
  std::size_t engine_disagreements = 0;
  double elapsed_ms = 0.0;
};

SuiteResult run_agreement_suite() {
  auto start = Clock::now();
  SuiteResult r;
  const std::vector<Pattern> patterns = admissible_patterns();
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Model m = random_model(seed, 6, 4);
    std::vector<KnowledgePredicate> preds;
    preds.push_back(
        KnowledgePredicate::dis(tspec_distinct_pairs(m.aut.num_states())));
    preds.push_back(KnowledgePredicate::dis(
        tspec_square(random_state_subset(seed * 17 + 3, m.aut))));
    for (const KnowledgePredicate& pred : preds) {
      for (const Pattern& p : patterns) {
        VerificationTask task = make_task(m.aut, m.low, m.high, pred, {p});
        bool expected = oracle_pattern(m.aut, m.low, m.high, pred, p);
        Verdict via_auto = verify(task);
        ++r.oracle_comparisons;
        if (via_auto.holds != expected) ++r.oracle_disagreements;
        Verdict via_oracle = verify(task, EngineChoice::Oracle);
        ++r.oracle_comparisons;
        if (via_oracle.holds != expected) ++r.oracle_disagreements;

        Verdict via_double = verify(task, EngineChoice::Double);
        if (twin_can(p)) {
          ++r.engine_comparisons;
          if (verify(task, EngineChoice::Twin).holds != via_double.holds)
            ++r.engine_disagreements;
        }
        if (spair_can(p)) {
          ++r.engine_comparisons;
          if (verify(task, EngineChoice::Spair).holds != via_double.holds)
            ++r.engine_disagreements;
        }
      }
    }
  }
  r.elapsed_ms = ms_since(start);
  return r;
}

bool criterion7(std::string& detail) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Model m = random_model(seed, 6, 4);
    Recognizer rec = build_recognizer(m.aut, m.low);
    DoubleEstimator dbl = build_double(rec, m.high);
    TwinEstimator twin = build_twin(rec, m.high);
    StatePairEstimator spe = build_state_pair(m.aut, m.low, m.high);
    std::string why;
    if (!check_recognizer_characterization(m, rec, 6, &why) ||
        !check_double_characterization(m, rec, dbl, 4, &why) ||
        !check_twin_soundness(m, rec, twin, 4, &why) ||
        !check_twin_completeness(m, twin, 4, &why) ||
        !check_spair_characterization(m, spe, 4, &why)) {
      detail = "seed " + std::to_string(seed) + ": " + why;
      return false;
    }
  }
  detail = "recognizer, double, twin, and state-pair characterizations on "
           "100 models";
  return true;
}

bool criterion8(std::string& detail) {
  // Implication and definitional agreement over random live models.
  std::size_t implications = 0, oracle_checks = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    Model m = random_model(seed, 6, 4);
    if (!validate(m.aut).live()) {
      detail = "random model is not live";
      return false;
    }
    StateSet secret = random_state_subset(seed * 31 + 7, m.aut);
    VerificationTask task =
        preset_task("finite-epistemic-diagnosability", m.aut, m.low, m.high,
                    std::nullopt, secret);
    Recognizer rec = build_recognizer(task.model, task.low);
    Classification cls = classify(rec, task.predicate);
    TwinEstimator twin = build_twin(rec, task.high);
    Verdict fin =
        check_finite_diag(task.model, rec, cls, twin, task.low, task.high);
    Verdict inst = check_twin(rec, cls, twin, task.low, task.high,
                              {Quantifier::ForAll, true, KHigh::Y});
    if (inst.holds && !fin.holds) {
      detail = "instantaneous holds but delayed fails, seed " +
               std::to_string(seed);
      return false;
    }
    if (inst.holds) ++implications;
    auto oracle = oracle_finite_diag(m.aut, m.low, m.high, secret);
    if (oracle.has_value()) {
      ++oracle_checks;
      if (*oracle != fin.holds) {
        detail = "definitional disagreement, seed " + std::to_string(seed);
        return false;
      }
    }
  }
  if (implications == 0 || oracle_checks == 0) {
    detail = "sweep exercised no informative cases";
    return false;
  }

  // The bundled counterexample model: the confused region loops, but only
  // over unsynchronized events, so the delayed property still holds.
  ModelFile g1 = parse_model(read_fixture("G1.des"));
  VerificationTask task =
      preset_task("finite-epistemic-diagnosability", g1.aut, g1.low, g1.high,
                  std::nullopt, StateSet{4});
  Recognizer rec = build_recognizer(task.model, task.low);
  Classification cls = classify(rec, task.predicate);
  TwinEstimator twin = build_twin(rec, task.high);
  Verdict fin =
      check_finite_diag(task.model, rec, cls, twin, task.low, task.high);
  Verdict inst = check_twin(rec, cls, twin, task.low, task.high,
                            {Quantifier::ForAll, true, KHigh::Y});
  if (!fin.holds || inst.holds) {
    detail = "expected the delayed property to hold while the instantaneous "
             "one fails";
    return false;
  }

  // Exhibit the silent-only cycle the check must reject: a cycle through
  // the confused region using no synchronized event.
  std::vector<bool> mixed(twin.graph.num_states());
  for (StateId v = 0; static_cast<std::size_t>(v) < twin.graph.num_states();
       ++v)
    mixed[v] = cls.known[twin.rec_pair[v].first] &&
               !cls.known[twin.rec_pair[v].second];
  std::vector<std::vector<StateId>> silent_adj(twin.graph.num_states());
  for (const Transition& t : twin.graph.transitions())
    if (mixed[t.src] && mixed[t.dst] && !twin.events[t.event].sync)
      silent_adj[t.src].push_back(t.dst);
  bool silent_cycle = false;
  for (StateId v = 0; static_cast<std::size_t>(v) < twin.graph.num_states() &&
                      !silent_cycle;
       ++v) {
    if (!mixed[v]) continue;
    // BFS from v's successors back to v inside the silent subgraph.
    std::vector<bool> seen(twin.graph.num_states());
    std::vector<StateId> work(silent_adj[v].begin(), silent_adj[v].end());
    while (!work.empty()) {
      StateId u = work.back();
      work.pop_back();
      if (u == v) {
        silent_cycle = true;
        break;
      }
      if (seen[u]) continue;
      seen[u] = true;
      for (StateId w : silent_adj[u]) work.push_back(w);
    }
  }
  if (!silent_cycle) {
    detail = "expected a silent-only cycle through the confused region";
    return false;
  }

  detail = "implication on " + std::to_string(implications) +
           " holding cases, definitional agreement on " +
           std::to_string(oracle_checks) +
           " models, silent-only cycle correctly rejected";
  return true;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n,
                detail.c_str());
    if (!ok) ++failures;
  };
  auto guard = [&](int n, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(n, ok, detail);
  };

  guard(1, criterion1);
  guard(2, criterion2);
  guard(3, criterion3);
  guard(4, criterion4);

  try {
    SuiteResult suite = run_agreement_suite();
    {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "auto/oracle agree on %zu comparisons over 500 models "
                    "(%zu disagreements, %.1f s)",
                    suite.oracle_comparisons, suite.oracle_disagreements,
                    suite.elapsed_ms / 1000.0);
      report(5,
             suite.oracle_disagreements == 0 && suite.elapsed_ms < 300000.0,
             buf);
    }
    {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "twin/spair agree with double on %zu comparisons "
                    "(%zu disagreements)",
                    suite.engine_comparisons, suite.engine_disagreements);
      report(6, suite.engine_disagreements == 0, buf);
    }
  } catch (const std::exception& e) {
    report(5, false, std::string("exception: ") + e.what());
    report(6, false, "suite did not run");
  }

  guard(7, criterion7);
  guard(8, criterion8);

  return failures == 0 ? 0 : 1;
}
