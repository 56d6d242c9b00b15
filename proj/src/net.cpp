#include "relucc/net.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace relucc {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sign: return "sign";
    case Activation::Linear: return "linear";
  }
  throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "sign") return Activation::Sign;
  if (s == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation: " + s);
}

NetLayer NetLayer::dense(const std::vector<std::vector<Rational>>& w,
                         const std::vector<Rational>& b, Activation act) {
  NetLayer layer;
  layer.act = act;
  layer.biases = b;
  layer.in_dim = w.empty() ? 0 : (int)w[0].size();
  for (const auto& row : w) {
    if ((int)row.size() != layer.in_dim)
      throw std::invalid_argument("NetLayer::dense: ragged matrix");
    SparseRow sr;
    for (int c = 0; c < (int)row.size(); ++c)
      if (!row[c].is_zero()) sr.emplace_back(c, row[c]);
    layer.rows.push_back(std::move(sr));
  }
  if (layer.rows.size() != layer.biases.size())
    throw std::invalid_argument("NetLayer::dense: rows/biases mismatch");
  return layer;
}

Rational NetLayer::weight_at(int r, int c) const {
  for (const auto& [col, v] : rows.at(r))
    if (col == c) return v;
  return Rational(0);
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string s = "layer " + std::to_string(d.layer) + ": " + d.rule;
  if (!d.detail.empty()) s += " (" + d.detail + ")";
  return s;
}

std::vector<Diagnostic> validate_net(const ReluNet& net, const NetValidateOptions& opts) {
  std::vector<Diagnostic> out;
  if (net.input_dim <= 0)
    out.push_back({-1, "input-dim", "input_dim must be positive"});
  if (net.layers.empty()) {
    out.push_back({-1, "empty-net", "a network needs at least one layer"});
    return out;
  }
  int prev = net.input_dim;
  for (int i = 0; i < (int)net.layers.size(); ++i) {
    const NetLayer& l = net.layers[i];
    if (l.rows.size() != l.biases.size())
      out.push_back({i, "rows-biases", "weights row count differs from biases length"});
    if (l.in_dim != prev)
      out.push_back({i, "dimension-chain",
                     "layer expects " + std::to_string(l.in_dim) + " inputs, got " +
                         std::to_string(prev)});
    for (int r = 0; r < (int)l.rows.size(); ++r) {
      int last = -1;
      for (const auto& [c, v] : l.rows[r]) {
        if (c < 0 || c >= l.in_dim) {
          out.push_back({i, "column-range", "row " + std::to_string(r)});
          break;
        }
        if (c <= last) {
          out.push_back({i, "row-order", "row " + std::to_string(r)});
          break;
        }
        last = c;
        (void)v;
      }
    }
    if (l.act == Activation::Sign && !opts.allow_sign)
      out.push_back({i, "sign-layer", "sign layers are only legal inside circuit-derived blocks"});
    prev = l.out_dim();
  }
  const NetLayer& last = net.layers.back();
  if (last.act != Activation::Linear)
    out.push_back({(int)net.layers.size() - 1, "final-layer-activation",
                   "final layer must be linear"});
  for (const auto& b : last.biases)
    if (!b.is_zero()) {
      out.push_back({(int)net.layers.size() - 1, "final-layer-bias",
                     "final layer must have all-zero biases"});
      break;
    }
  return out;
}

std::vector<Rational> eval_net_exact(const ReluNet& net, const std::vector<Rational>& x) {
  if ((int)x.size() != net.input_dim)
    throw std::invalid_argument("eval_net_exact: input has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(net.input_dim));
  std::vector<Rational> state = x;
  for (const auto& l : net.layers) {
    if ((int)state.size() != l.in_dim)
      throw std::invalid_argument("eval_net_exact: dimension chain broken");
    std::vector<Rational> next(l.rows.size());
    for (size_t r = 0; r < l.rows.size(); ++r) {
      Rational z = l.biases[r];
      for (const auto& [c, w] : l.rows[r]) z += w * state[c];
      switch (l.act) {
        case Activation::Relu: next[r] = relu(z); break;
        case Activation::Sign: next[r] = Rational(z.sign() > 0 ? 1 : 0); break;
        case Activation::Linear: next[r] = z; break;
      }
    }
    state = std::move(next);
  }
  return state;
}

std::vector<double> eval_net_float(const ReluNet& net, const std::vector<double>& x) {
  if ((int)x.size() != net.input_dim)
    throw std::invalid_argument("eval_net_float: input has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(net.input_dim));
  std::vector<double> state = x;
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    std::vector<double> next(l.rows.size());
    for (size_t r = 0; r < l.rows.size(); ++r) {
      double z = l.biases[r].to_double();
      for (const auto& [c, w] : l.rows[r]) z += w.to_double() * state[c];
      switch (l.act) {
        case Activation::Relu: next[r] = z > 0 ? z : 0.0; break;
        case Activation::Sign: next[r] = z > 0 ? 1.0 : 0.0; break;
        case Activation::Linear: next[r] = z; break;
      }
      if (!std::isfinite(next[r]))
        throw std::runtime_error("eval_net_float: non-finite value at layer " +
                                 std::to_string(i) + ", neuron " + std::to_string(r));
    }
    state = std::move(next);
  }
  return state;
}

NetMetrics net_metrics(const ReluNet& net) {
  NetMetrics m;
  m.depth = net.depth();
  for (const auto& l : net.layers) {
    m.width = std::max(m.width, l.out_dim());
    m.size += l.out_dim();
    for (const auto& row : l.rows)
      for (const auto& [c, w] : row) m.max_abs_weight = max(m.max_abs_weight, abs(w));
    for (const auto& b : l.biases) m.max_abs_bias = max(m.max_abs_bias, abs(b));
  }
  return m;
}

namespace {

// Fuse linear layer `lin` into consumer `next`: W = Wn*Wl, b = Wn*bl + bn.
NetLayer fuse(const NetLayer& lin, const NetLayer& next) {
  NetLayer out;
  out.act = next.act;
  out.in_dim = lin.in_dim;
  out.rows.resize(next.rows.size());
  out.biases.resize(next.rows.size());
  for (size_t r = 0; r < next.rows.size(); ++r) {
    std::map<int, Rational> acc;
    Rational b = next.biases[r];
    for (const auto& [k, w] : next.rows[r]) {
      b += w * lin.biases[k];
      for (const auto& [c, v] : lin.rows[k]) {
        auto it = acc.find(c);
        if (it == acc.end()) acc.emplace(c, w * v);
        else it->second += w * v;
      }
    }
    SparseRow row;
    for (auto& [c, v] : acc)
      if (!v.is_zero()) row.emplace_back(c, v);
    out.rows[r] = std::move(row);
    out.biases[r] = b;
  }
  return out;
}

}  // namespace

ReluNet merge_linear_layers(const ReluNet& net) {
  ReluNet out;
  out.input_dim = net.input_dim;
  out.label = net.label;
  for (const auto& l : net.layers) {
    if (!out.layers.empty() && out.layers.back().act == Activation::Linear) {
      NetLayer fused = fuse(out.layers.back(), l);
      out.layers.back() = std::move(fused);
    } else {
      out.layers.push_back(l);
    }
  }
  return out;
}

ReluNet concat_nets(const ReluNet& first, const ReluNet& second) {
  if (first.output_dim() != second.input_dim)
    throw std::invalid_argument("concat_nets: first outputs " +
                                std::to_string(first.output_dim()) + ", second expects " +
                                std::to_string(second.input_dim));
  ReluNet out;
  out.input_dim = first.input_dim;
  out.label = first.label.empty() ? second.label : first.label;
  out.layers = first.layers;
  out.layers.insert(out.layers.end(), second.layers.begin(), second.layers.end());
  return out;
}

}  // namespace relucc
