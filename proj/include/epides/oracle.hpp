#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "epides/automaton.hpp"
#include "epides/knowledge.hpp"
#include "epides/pattern.hpp"

namespace epides {

// Definition-level evaluators used to cross-validate the estimator engines.
// They work directly on the plant by saturating visited-set searches over
// (state, estimate, consumed-observation) configurations and share nothing
// with the estimator constructions except the model types. Desk scale only:
// exploration is exact but makes no attempt to be subexponential.

// Exploration cap; exceeding it is an internal error for the bounded-size
// models these evaluators are meant for.
inline constexpr std::size_t kOracleBudget = 4'000'000;

// Low observer's knowledge value on observation alpha: the predicate
// applied to the estimate, which is enumerated from scratch. alpha must be
// feasible.
bool oracle_kw(const Automaton& plant, const ObservationMap& low,
               const KnowledgePredicate& pred, std::span<const OutputId> alpha);

// High observer's three-valued estimate of the low observer's knowledge
// after observing beta: Y if every string producing beta leaves the low
// observer knowing, N if none does, U otherwise. beta must be feasible.
KHigh oracle_hat_kw(const Automaton& plant, const ObservationMap& low,
                    const ObservationMap& high, const KnowledgePredicate& pred,
                    std::span<const OutputId> beta);

// Exact truth value of the quantified pattern, decided by exhausting the
// finitely many (own-configuration, high-observation-class) pairs.
bool oracle_pattern(const Automaton& plant, const ObservationMap& low,
                    const ObservationMap& high, const KnowledgePredicate& pred,
                    Pattern p);

// Exact truth value of the delayed diagnosability property for the given
// secret set, decided by searching configuration pairs for a confusable
// loop with high-observable progress. nullopt when the pair space exceeds
// budget before saturating. plant must be live.
std::optional<bool> oracle_finite_diag(const Automaton& plant,
                                       const ObservationMap& low,
                                       const ObservationMap& high,
                                       const StateSet& secret,
                                       std::size_t budget = kOracleBudget);

}  // namespace epides
