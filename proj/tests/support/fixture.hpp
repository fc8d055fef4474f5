#pragma once

#include "axon/scheme.hpp"
#include "axon/symbol_def.hpp"

namespace axon::testing {

// P1 (0,0,0)-(1000,0,0) joined at its b end to P2 (1000,0,0)-(1000,1000,0),
// a valve on P1 at mid length and a height mark on P1 at t = 0.25.
struct F1 {
  Scheme scheme;
  ObjectId p1 = 0;
  ObjectId p2 = 0;
  ObjectId c12 = 0;
  ObjectId valve = 0;
  ObjectId mark = 0;
};

// Pipes and connection only.
F1 make_f1_bare();
F1 make_f1();

// Axial symbol with a 100 mm cut; flags select the declared symmetries.
SymbolDef valve_symbol(bool symmetric_axis = true, bool symmetric_normal = true, double cut = 100.0);
SymbolDef elbow_symbol();
SymbolDef tee_symbol();

}  // namespace axon::testing
