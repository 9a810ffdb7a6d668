#pragma once

#include "epides/automaton.hpp"

// Hand-built copies of the bundled fixture models, so core tests do not
// depend on the text parser.

namespace epides::testing {

struct Model {
  Automaton aut;
  ObservationMap low;
  ObservationMap high;
};

// Eight states, events a b c d. The low observer sees b and d, the high
// observer sees a and b.
inline Model make_g1() {
  Model m;
  for (int i = 0; i < 8; ++i) m.aut.add_state(std::to_string(i));
  EventId a = m.aut.add_event("a");
  EventId b = m.aut.add_event("b");
  EventId c = m.aut.add_event("c");
  EventId d = m.aut.add_event("d");
  m.aut.set_initial(0);
  auto t = [&](int src, EventId e, int dst) {
    m.aut.add_transition(src, e, dst);
  };
  t(0, c, 2);
  t(2, b, 4);
  t(4, d, 6);
  t(6, d, 4);
  t(0, a, 1);
  t(1, b, 3);
  t(3, b, 5);
  t(5, a, 7);
  t(7, d, 7);
  m.low = ObservationMap(4);
  m.low.set_output(b, "b");
  m.low.set_output(d, "d");
  m.high = ObservationMap(4);
  m.high.set_output(a, "a");
  m.high.set_output(b, "b");
  return m;
}

// Eight-cell grid walk, events b r g. The low observer sees r and g, the
// high observer sees b and g. Cells 0, 2, 3, 6 form the "yellow" region.
inline Model make_g0() {
  Model m;
  for (int i = 0; i < 8; ++i) m.aut.add_state(std::to_string(i));
  EventId b = m.aut.add_event("b");
  EventId r = m.aut.add_event("r");
  EventId g = m.aut.add_event("g");
  m.aut.set_initial(0);
  auto t = [&](int src, EventId e, int dst) {
    m.aut.add_transition(src, e, dst);
  };
  t(0, b, 1);
  t(0, r, 2);
  t(0, g, 7);
  t(7, g, 0);
  t(1, r, 3);
  t(2, b, 4);
  t(3, g, 5);
  t(5, g, 3);
  t(4, g, 6);
  t(6, g, 4);
  t(6, r, 5);
  m.low = ObservationMap(3);
  m.low.set_output(r, "r");
  m.low.set_output(g, "g");
  m.high = ObservationMap(3);
  m.high.set_output(b, "b");
  m.high.set_output(g, "g");
  return m;
}

inline StateSet g0_yellow() { return {0, 2, 3, 6}; }

}  // namespace epides::testing
