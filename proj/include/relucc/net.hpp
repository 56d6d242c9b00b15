#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relucc/rational.hpp"

namespace relucc {

enum class Activation { Relu, Sign, Linear };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& s);

// Weights are stored row-sparse: row r lists (input index, value) pairs with
// strictly increasing input indices. Compiled nets get wide and would not fit
// as dense matrices.
using SparseRow = std::vector<std::pair<int, Rational>>;

struct NetLayer {
  int in_dim = 0;
  std::vector<SparseRow> rows;   // rows.size() == out_dim
  std::vector<Rational> biases;  // one per row
  Activation act = Activation::Linear;

  int out_dim() const { return (int)rows.size(); }

  // Convenience constructor from a dense matrix; used by small hand-built nets.
  static NetLayer dense(const std::vector<std::vector<Rational>>& w,
                        const std::vector<Rational>& b, Activation act);

  Rational weight_at(int r, int c) const;
};

struct ReluNet {
  int input_dim = 0;
  std::vector<NetLayer> layers;
  std::string label;

  int depth() const { return (int)layers.size(); }
  int output_dim() const { return layers.empty() ? input_dim : layers.back().out_dim(); }
};

struct NetMetrics {
  int depth = 0;
  int width = 0;
  long size = 0;  // total neurons
  Rational max_abs_weight;
  Rational max_abs_bias;
};

struct Diagnostic {
  int layer;  // -1 when the problem is not tied to one layer
  std::string rule;
  std::string detail;
};

std::string format_diagnostic(const Diagnostic& d);

struct NetValidateOptions {
  // Sign layers only occur inside circuit-derived blocks; plain nets reject them.
  bool allow_sign = false;
};

std::vector<Diagnostic> validate_net(const ReluNet& net, const NetValidateOptions& opts = {});

std::vector<Rational> eval_net_exact(const ReluNet& net, const std::vector<Rational>& x);
std::vector<double> eval_net_float(const ReluNet& net, const std::vector<double>& x);

NetMetrics net_metrics(const ReluNet& net);

// Fuses every interior linear layer into its successor; the computed function
// is unchanged exactly.
ReluNet merge_linear_layers(const ReluNet& net);

// Layer lists concatenated; evaluation equals second o first.
ReluNet concat_nets(const ReluNet& first, const ReluNet& second);

}  // namespace relucc
