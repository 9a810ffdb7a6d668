#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace epides {

using StateId = std::int32_t;
using EventId = std::int32_t;
using OutputId = std::int32_t;

inline constexpr StateId kNoState = -1;
inline constexpr OutputId kSilent = -1;

// Sorted, duplicate-free vector of state identifiers. Every set-valued
// estimate in the library uses this canonical form, so vector equality
// coincides with set equality and sets can key ordered maps directly.
using StateSet = std::vector<StateId>;

// Error caused by user-supplied input (models, specs, observation strings).
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input error carrying a 1-based source line.
struct parse_error : input_error {
  int line;
  parse_error(int line_, const std::string& msg)
      : input_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Broken internal invariant: a bug in this library, never bad input.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

namespace sets {

inline bool contains(const StateSet& s, StateId x) {
  return std::binary_search(s.begin(), s.end(), x);
}

// Returns true if x was not already present.
inline bool insert(StateSet& s, StateId x) {
  auto it = std::lower_bound(s.begin(), s.end(), x);
  if (it != s.end() && *it == x) return false;
  s.insert(it, x);
  return true;
}

inline void canonicalize(StateSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool intersects(const StateSet& a, const StateSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

inline bool is_subset(const StateSet& a, const StateSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace sets

}  // namespace epides
