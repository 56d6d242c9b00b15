#pragma once

#include <vector>

#include "relucc/circuit.hpp"
#include "relucc/rational.hpp"

namespace relucc {

// C-bit two's-complement word format; every represented quantity is an
// integer numerator over the global denominator t.
struct FixedPointFormat {
  int C = 0;
  Int t = 1;

  Int min_value() const { return -pow2(C - 1); }
  Int max_value() const { return pow2(C - 1) - 1; }
  bool fits(const Int& v) const { return v >= min_value() && v <= max_value(); }
};

// bits[0] is the least significant bit; bits[C-1] is the sign bit.
struct BitsWord {
  std::vector<int> bits;

  int width() const { return (int)bits.size(); }
};

BitsWord encode_word(const Int& v, const FixedPointFormat& fmt);
Int decode_word(const BitsWord& w);

// One layer of fan-in-0 gates whose outputs equal w on any input.
ThresholdCircuit const_block(const BitsWord& w, int input_bits);

}  // namespace relucc
