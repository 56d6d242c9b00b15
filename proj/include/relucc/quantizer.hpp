#pragma once

#include "relucc/net.hpp"
#include "relucc/passes.hpp"

namespace relucc {

// Parameters of the depth-2 input quantizer. delta is the ramp width in grid
// units (u = p*x), so the exactness contract holds whenever every coordinate
// satisfies |p*x_i - (l - 1/2)| >= delta for all integers l.
struct QuantizerSpec {
  GridSpec grid;
  int C = 0;                     // word length of the emitted encodings
  Rational delta = Rational(1, 8);
  Rational failure_budget;       // delta', reported only

  void validate() const;
};

// Depth-2 ReLU net with C*d outputs: the two's-complement bits of p*x~_i per
// coordinate (LSB first), exact outside the ramp bands; coordinates outside
// [-R - 1/(2p), R + 1/(2p)] encode 0.
ReluNet build_quantizer(const QuantizerSpec& spec, int dims);

// Same network with the promise that inputs lie on the grid; exact on every
// grid point for any delta < 1/2.
ReluNet build_quantizer_discrete(const QuantizerSpec& spec, int dims);

// Minimal legal word length for the grid: ceil(log2(2Rp+1)) + 1.
int quantizer_min_bits(const GridSpec& grid);

// True when x lies in some ramp band of the quantizer (the exactness contract
// does not cover it).
bool in_quantizer_band(const QuantizerSpec& spec, const Rational& x);

}  // namespace relucc
