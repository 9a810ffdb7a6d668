#include "epides/knowledge.hpp"

#include <algorithm>
#include <queue>

namespace epides {

void TSpec::add(StateId a, StateId b) {
  auto p = std::make_pair(a, b);
  auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
  if (it == pairs.end() || *it != p) pairs.insert(it, p);
}

bool TSpec::contains(StateId a, StateId b) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b));
}

TSpec tspec_distinct_pairs(std::size_t num_states) {
  TSpec t;
  for (StateId a = 0; static_cast<std::size_t>(a) < num_states; ++a)
    for (StateId b = 0; static_cast<std::size_t>(b) < num_states; ++b)
      if (a != b) t.pairs.emplace_back(a, b);
  return t;
}

TSpec tspec_square(const StateSet& xs) {
  TSpec t;
  for (StateId a : xs)
    for (StateId b : xs) t.pairs.emplace_back(a, b);
  return t;
}

TSpec tspec_nonsecret_square(std::size_t num_states, const StateSet& xs) {
  StateSet rest;
  for (StateId x = 0; static_cast<std::size_t>(x) < num_states; ++x)
    if (!sets::contains(xs, x)) rest.push_back(x);
  return tspec_square(rest);
}

bool eval_dis(const TSpec& tspec, const StateSet& q) {
  for (StateId a : q)
    for (StateId b : q)
      if (tspec.contains(a, b)) return false;
  return true;
}

KnowledgePredicate KnowledgePredicate::dis(TSpec tspec) {
  KnowledgePredicate p;
  p.tspec_ = std::move(tspec);
  return p;
}

KnowledgePredicate KnowledgePredicate::table(
    std::map<StateSet, bool> entries) {
  KnowledgePredicate p;
  p.table_ = std::move(entries);
  return p;
}

bool KnowledgePredicate::eval(const StateSet& q) const {
  if (tspec_) return eval_dis(*tspec_, q);
  auto it = table_->find(q);
  if (it == table_->end())
    throw input_error("predicate table has no entry for an estimate");
  return it->second;
}

const TSpec& KnowledgePredicate::tspec() const {
  if (!tspec_) throw internal_error("predicate has no pair specification");
  return *tspec_;
}

RefinedModel refine_visited(const Automaton& aut, const StateSet& xs) {
  for (StateId x : xs)
    if (x < 0 || static_cast<std::size_t>(x) >= aut.num_states())
      throw input_error("refinement set references an unknown state");

  RefinedModel rm;
  std::map<std::pair<StateId, std::uint8_t>, StateId> index;
  auto intern = [&](StateId base, std::uint8_t lab) {
    auto key = std::make_pair(base, lab);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    StateId id = rm.aut.add_state("(" + aut.state_name(base) + "," +
                                  std::to_string(int(lab)) + ")");
    rm.base_state.push_back(base);
    rm.label.push_back(lab);
    index.emplace(key, id);
    return id;
  };
  for (EventId e = 0; static_cast<std::size_t>(e) < aut.num_events(); ++e)
    rm.aut.add_event(aut.event_name(e));

  std::uint8_t init_label = sets::contains(xs, aut.initial()) ? 1 : 0;
  StateId init = intern(aut.initial(), init_label);
  rm.aut.set_initial(init);
  std::queue<StateId> work;
  work.push(init);
  while (!work.empty()) {
    StateId q = work.front();
    work.pop();
    StateId base = rm.base_state[q];
    std::uint8_t lab = rm.label[q];
    for (EventId e = 0; static_cast<std::size_t>(e) < aut.num_events(); ++e) {
      StateId tgt = aut.step(base, e);
      if (tgt == kNoState) continue;
      std::uint8_t lab2 = (lab || sets::contains(xs, tgt)) ? 1 : 0;
      std::size_t before = rm.aut.num_states();
      StateId q2 = intern(tgt, lab2);
      rm.aut.add_transition(q, e, q2);
      if (rm.aut.num_states() > before) work.push(q2);
    }
  }
  return rm;
}

VerificationTask make_task(Automaton model, ObservationMap low,
                           ObservationMap high, KnowledgePredicate predicate,
                           std::vector<Pattern> patterns, bool delayed,
                           std::optional<StateSet> secret) {
  if (patterns.empty()) throw input_error("task needs at least one pattern");
  for (const Pattern& p : patterns)
    if (!admissible(p))
      throw input_error("pattern " + to_string(p) +
                        " is meaningless: no string can satisfy it");
  if (delayed && !secret)
    throw input_error("delayed task needs a secret state set");
  VerificationTask task{std::move(model),  std::move(low),
                        std::move(high),   std::move(predicate),
                        std::move(patterns), delayed,
                        std::move(secret)};
  return task;
}

VerificationTask preset_task(const std::string& name, const Automaton& aut,
                             const ObservationMap& low,
                             const ObservationMap& high,
                             const std::optional<TSpec>& tspec,
                             const std::optional<StateSet>& secret) {
  auto need_tspec = [&]() -> const TSpec& {
    if (!tspec)
      throw input_error("preset " + name + " needs a pair specification");
    return *tspec;
  };
  auto need_secret = [&]() -> const StateSet& {
    if (!secret) throw input_error("preset " + name + " needs a secret set");
    for (StateId x : *secret)
      if (x < 0 || static_cast<std::size_t>(x) >= aut.num_states())
        throw input_error("secret set references an unknown state");
    return *secret;
  };
  auto refined_square = [&](const RefinedModel& rm) {
    // Pairs over the never-visited half of the refined space.
    StateSet clean;
    for (StateId q = 0; static_cast<std::size_t>(q) < rm.aut.num_states(); ++q)
      if (rm.label[q] == 0) clean.push_back(q);
    return tspec_square(clean);
  };

  if (name == "high-order-opacity") {
    return make_task(aut, low, high, KnowledgePredicate::dis(need_tspec()),
                     {{Quantifier::ForAll, true, KHigh::U}});
  }
  if (name == "intrusion-undetectability") {
    RefinedModel rm = refine_visited(aut, need_secret());
    TSpec t = refined_square(rm);
    return make_task(std::move(rm.aut), low, high,
                     KnowledgePredicate::dis(std::move(t)),
                     {{Quantifier::ForAll, true, KHigh::U}});
  }
  if (name == "epistemic-diagnosability") {
    TSpec t = tspec_nonsecret_square(aut.num_states(), need_secret());
    return make_task(aut, low, high, KnowledgePredicate::dis(std::move(t)),
                     {{Quantifier::ForAll, true, KHigh::Y}});
  }
  if (name == "high-order-detectability") {
    return make_task(aut, low, high, KnowledgePredicate::dis(need_tspec()),
                     {{Quantifier::ForAll, true, KHigh::Y},
                      {Quantifier::ForAll, false, KHigh::N}});
  }
  if (name == "finite-epistemic-diagnosability") {
    RefinedModel rm = refine_visited(aut, need_secret());
    TSpec t = refined_square(rm);
    StateSet visited;
    for (StateId q = 0; static_cast<std::size_t>(q) < rm.aut.num_states(); ++q)
      if (rm.label[q] == 1) visited.push_back(q);
    return make_task(std::move(rm.aut), low, high,
                     KnowledgePredicate::dis(std::move(t)),
                     {{Quantifier::ForAll, true, KHigh::Y}},
                     /*delayed=*/true, std::move(visited));
  }
  throw input_error("unknown property preset: " + name);
}

}  // namespace epides
