#pragma once

#include <string>

namespace epides {

enum class Quantifier { ForAll, Exists };

// High-level verdict about the low observer's knowledge: the high observer
// concludes "knows" (Y), "does not know" (N), or stays uncertain (U).
enum class KHigh { Y, N, U };

// One epistemic pattern <quantifier, k_low, k_high>: quantifying over system
// strings whose low-side knowledge value is k_low, the high-side estimate
// must equal k_high.
struct Pattern {
  Quantifier quant;
  bool k_low;
  KHigh k_high;
  bool operator==(const Pattern&) const = default;
};

// A string with k_low = T is itself evidence against a high-side N, and one
// with k_low = F is evidence against a high-side Y, so those two
// combinations cannot be satisfied by any string and are rejected up front.
constexpr bool admissible(const Pattern& p) {
  if (p.k_low && p.k_high == KHigh::N) return false;
  if (!p.k_low && p.k_high == KHigh::Y) return false;
  return true;
}

inline std::string to_string(const Pattern& p) {
  std::string s = "<";
  s += p.quant == Quantifier::ForAll ? "forall" : "exists";
  s += p.k_low ? ",T," : ",F,";
  s += p.k_high == KHigh::Y ? "Y" : p.k_high == KHigh::N ? "N" : "U";
  s += ">";
  return s;
}

}  // namespace epides
