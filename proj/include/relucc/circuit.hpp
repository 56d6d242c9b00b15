#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relucc/rational.hpp"

namespace relucc {

// Sign gate over the previous layer: fires iff sum(w*x) + bias > 0.
// Weights are sparse (input index, integer weight) pairs with increasing
// indices. A gate with no weights is a hardwired constant (bias 0 or 1).
struct ThresholdGate {
  std::vector<std::pair<int, Int>> weights;
  Int bias = 0;
};

using GateLayer = std::vector<ThresholdGate>;

struct ThresholdCircuit {
  int input_bits = 0;
  std::vector<GateLayer> layers;
  std::vector<int> output_indices;  // gates of the last layer
  std::string tag;                  // gadget name + parameters, for reports

  int depth() const { return (int)layers.size(); }
  int output_count() const { return (int)output_indices.size(); }
};

struct CircuitMetrics {
  int depth = 0;
  int width = 0;
  long size = 0;  // total gates
  Int max_abs_weight;
};

std::vector<int> eval_circuit(const ThresholdCircuit& c, const std::vector<int>& x);

CircuitMetrics circuit_metrics(const ThresholdCircuit& c);

// Where each input bit of `b` comes from when stacking b after a.
struct WireSource {
  enum Kind { FromOutput, FromInput } kind;
  int index;

  static WireSource output(int i) { return {FromOutput, i}; }
  static WireSource input(int i) { return {FromInput, i}; }
};

// Stacks b after a. Passthrough inputs of a are forwarded through every layer
// of a with identity gates, so depth(result) = depth(a) + depth(b).
ThresholdCircuit concat_circuits(const ThresholdCircuit& a, const ThresholdCircuit& b,
                                 const std::vector<WireSource>& wiring);

}  // namespace relucc
