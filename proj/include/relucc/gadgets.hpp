#pragma once

#include <optional>
#include <vector>

#include "relucc/circuit.hpp"
#include "relucc/words.hpp"

namespace relucc {

// Two interchangeable iterated-addition constructions.
//
// Compact: depth 2, weights up to 2^(C-1) on the bit wires. Straightforwardly
// correct; serves as the reference construction.
//
// PolyWeight: weights bounded by a fixed polynomial in m*C (see
// poly_adder_weight_bound). Block-save structure: per-block column sums,
// even/odd block split into two summands, then a generate/propagate carry
// layer. Costs depth 5 instead of the depth-2 bound quoted for the
// Siu-Roychowdhury construction, which this project does not reproduce.
enum class AdderMode { Compact, PolyWeight };

const char* adder_mode_name(AdderMode m);
AdderMode adder_mode_from_name(const std::string& s);

int adder_depth(AdderMode m);  // Compact: 2, PolyWeight: 5

// Declared max-abs-weight bound of one addition gadget instance.
Int adder_weight_bound(AdderMode mode, int m, int C);

// The fixed polynomial P(u), u = m*C, dominating poly-mode weights.
Int poly_adder_weight_polynomial(const Int& u);

// One bit position of one addend: either a wire of the preceding layer or a
// hardwired constant. Constants are folded into gate thresholds.
struct BitRef {
  int wire = -1;  // >= 0: wire index; -1: constant
  int cval = 0;

  static BitRef w(int i) { return {i, 0}; }
  static BitRef c(int v) { return {-1, v}; }
  bool is_wire() const { return wire >= 0; }
};

// An addend described positionally, LSB first; missing positions are zero.
using AddendBits = std::vector<BitRef>;

// Builds one or more C-bit sums (mod 2^C, two's complement) sharing the same
// adder layers. Used directly by the compiler so parallel rails stay in
// lockstep; the public gadgets below wrap it.
class AdderBuilder {
public:
  AdderBuilder(int C, AdderMode mode) : C_(C), mode_(mode) {}

  int add_sum(std::vector<AddendBits> addends);

  // Appends the adder layers; call once. Returns the generated layers.
  std::vector<GateLayer> build();

  // Wire indices of sum `id`'s C output bits within the final built layer.
  const std::vector<int>& outputs(int id) const { return outputs_.at(id); }

  int depth() const { return adder_depth(mode_); }
  int max_addend_count() const { return max_addends_; }

private:
  int C_;
  AdderMode mode_;
  std::vector<std::vector<AddendBits>> sums_;
  std::vector<std::vector<int>> outputs_;
  int max_addends_ = 0;

  void build_compact(std::vector<GateLayer>& layers);
  void build_poly(std::vector<GateLayer>& layers);
};

// m addends of C bits each -> C-bit two's-complement sum, inputs laid out as
// addend-major contiguous words. If addend_abs_bound is given, construction
// fails when m * bound could overflow the word.
ThresholdCircuit iterated_addition_gadget(int m, const FixedPointFormat& fmt, AdderMode mode,
                                          std::optional<Int> addend_abs_bound = {});

// 2C inputs (two words) -> C-bit signed product; depth 3 = partial products
// plus the compact depth-2 adder.
ThresholdCircuit multiplication_gadget(const FixedPointFormat& fmt,
                                       std::optional<Int> operand_abs_bound = {});

// Depth-1 ReLU over a word: subtract the sign bit from every other bit.
// rails=2 expects (v, -v) and zeroes both rails when v < 0.
ThresholdCircuit relu_gadget(const FixedPointFormat& fmt, int rails);

// Dual-rail signed sum z = bias + sum(a_i * v_i) with a_i in {-1,+1}; inputs
// are n dual-rail words laid out (v_1, w_1, v_2, w_2, ...), outputs (z, -z).
ThresholdCircuit signed_sum_gadget(const std::vector<int>& coeffs, const Int& bias,
                                   const FixedPointFormat& fmt, AdderMode mode,
                                   std::optional<Int> input_abs_bound = {});

// Clip-and-flag output stage: from dual-rail (v, -v) with v/t the network
// value, emit the word of v' = v + Bt and flag c = [v/t > B]; word is zero
// outside [-B, B]. Depth = adder depth + 1.
ThresholdCircuit clip_flag_stage(const Rational& B, const FixedPointFormat& fmt, AdderMode mode,
                                 std::optional<Int> value_abs_bound = {});

}  // namespace relucc
