#include "relucc/circuit.hpp"

#include <stdexcept>

namespace relucc {

std::vector<int> eval_circuit(const ThresholdCircuit& c, const std::vector<int>& x) {
  if ((int)x.size() != c.input_bits)
    throw std::invalid_argument("eval_circuit: got " + std::to_string(x.size()) +
                                " input bits, expected " + std::to_string(c.input_bits));
  for (int b : x)
    if (b != 0 && b != 1) throw std::invalid_argument("eval_circuit: non-binary input");

  std::vector<int> state = x;
  for (const auto& layer : c.layers) {
    std::vector<int> next(layer.size());
    for (size_t g = 0; g < layer.size(); ++g) {
      Int z = layer[g].bias;
      for (const auto& [i, w] : layer[g].weights) {
        if (i < 0 || i >= (int)state.size())
          throw std::invalid_argument("eval_circuit: gate wire out of range");
        if (state[i]) z += w;
      }
      next[g] = z > 0 ? 1 : 0;
    }
    state = std::move(next);
  }
  std::vector<int> out;
  out.reserve(c.output_indices.size());
  for (int i : c.output_indices) {
    if (i < 0 || i >= (int)state.size())
      throw std::invalid_argument("eval_circuit: output index out of range");
    out.push_back(state[i]);
  }
  return out;
}

CircuitMetrics circuit_metrics(const ThresholdCircuit& c) {
  CircuitMetrics m;
  m.depth = c.depth();
  for (const auto& layer : c.layers) {
    m.width = std::max(m.width, (int)layer.size());
    m.size += (long)layer.size();
    for (const auto& g : layer) {
      for (const auto& [i, w] : g.weights) {
        (void)i;
        if (abs(w) > m.max_abs_weight) m.max_abs_weight = abs(w);
      }
      if (abs(g.bias) > m.max_abs_weight) m.max_abs_weight = abs(g.bias);
    }
  }
  return m;
}

namespace {

ThresholdGate identity_gate(int wire) {
  ThresholdGate g;
  g.weights.emplace_back(wire, Int(1));
  g.bias = 0;
  return g;
}

}  // namespace

ThresholdCircuit concat_circuits(const ThresholdCircuit& a, const ThresholdCircuit& b,
                                 const std::vector<WireSource>& wiring) {
  if ((int)wiring.size() != b.input_bits)
    throw std::invalid_argument("concat_circuits: wiring size differs from b's input count");
  for (const auto& ws : wiring) {
    if (ws.kind == WireSource::FromOutput && (ws.index < 0 || ws.index >= a.output_count()))
      throw std::invalid_argument("concat_circuits: wiring refers to nonexistent output");
    if (ws.kind == WireSource::FromInput && (ws.index < 0 || ws.index >= a.input_bits))
      throw std::invalid_argument("concat_circuits: wiring refers to nonexistent input");
  }

  ThresholdCircuit out;
  out.input_bits = a.input_bits;
  out.tag = a.tag.empty() ? b.tag : a.tag + "|" + b.tag;
  out.layers = a.layers;

  // Forward any passthrough inputs of a through all of a's layers.
  std::vector<int> fwd_wire(a.input_bits, -1);
  for (const auto& ws : wiring) {
    if (ws.kind != WireSource::FromInput || fwd_wire[ws.index] >= 0) continue;
    int wire = ws.index;
    for (auto& layer : out.layers) {
      layer.push_back(identity_gate(wire));
      wire = (int)layer.size() - 1;
    }
    fwd_wire[ws.index] = wire;
  }

  // Remap b's first layer onto (a outputs, forwarded inputs), then append.
  std::vector<int> bmap(b.input_bits);
  for (int i = 0; i < b.input_bits; ++i) {
    const auto& ws = wiring[i];
    bmap[i] = ws.kind == WireSource::FromOutput ? a.output_indices[ws.index]
                                                : fwd_wire[ws.index];
  }
  for (size_t li = 0; li < b.layers.size(); ++li) {
    GateLayer layer = b.layers[li];
    if (li == 0)
      for (auto& g : layer)
        for (auto& [i, w] : g.weights) i = bmap[i];
    out.layers.push_back(std::move(layer));
  }
  out.output_indices = b.output_indices;
  return out;
}

}  // namespace relucc
