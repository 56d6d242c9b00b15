#include "relucc/gadgets.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace relucc {

const char* adder_mode_name(AdderMode m) {
  return m == AdderMode::Compact ? "compact" : "poly-weight";
}

AdderMode adder_mode_from_name(const std::string& s) {
  if (s == "compact") return AdderMode::Compact;
  if (s == "poly-weight" || s == "poly_weight") return AdderMode::PolyWeight;
  throw std::invalid_argument("unknown adder mode: " + s);
}

int adder_depth(AdderMode m) { return m == AdderMode::Compact ? 2 : 5; }

Int poly_adder_weight_polynomial(const Int& u) { return 4 * (u + 2) * (u + 2); }

Int adder_weight_bound(AdderMode mode, int m, int C) {
  if (mode == AdderMode::Compact) {
    // Layer-1 biases reach (2m+1) * 2^(C-1) in the worst case.
    return Int(2 * m + 1) * pow2(C >= 1 ? C - 1 : 0) + 1;
  }
  int beta = 1;
  while ((1 << beta) < m + 1) ++beta;
  Int block = Int(2 * m) * pow2(beta) + 1;
  Int chain = Int(C) + 1;
  return block > chain ? block : chain;
}

namespace {

int block_width_for(int m) {
  int beta = 1;
  while ((1 << beta) < m + 1) ++beta;
  return beta;
}

}  // namespace

int AdderBuilder::add_sum(std::vector<AddendBits> addends) {
  for (auto& a : addends) {
    if ((int)a.size() > C_)
      throw std::invalid_argument("AdderBuilder: addend wider than the word");
    a.resize(C_, BitRef::c(0));
  }
  max_addends_ = std::max(max_addends_, (int)addends.size());
  sums_.push_back(std::move(addends));
  return (int)sums_.size() - 1;
}

std::vector<GateLayer> AdderBuilder::build() {
  std::vector<GateLayer> layers;
  if (mode_ == AdderMode::Compact) build_compact(layers);
  else build_poly(layers);
  return layers;
}

void AdderBuilder::build_compact(std::vector<GateLayer>& layers) {
  GateLayer l1, l2;
  outputs_.assign(sums_.size(), {});

  for (size_t si = 0; si < sums_.size(); ++si) {
    const auto& addends = sums_[si];
    for (int i = 1; i <= C_; ++i) {
      // Linear form of S_i = sum of all addend bits at positions <= i.
      std::map<int, Int> coeff;
      Int const_low = 0, s_max = 0;
      for (const auto& a : addends) {
        for (int pos = 1; pos <= i; ++pos) {
          const BitRef& ref = a[pos - 1];
          if (ref.is_wire()) {
            coeff[ref.wire] += pow2(pos - 1);
            s_max += pow2(pos - 1);
          } else if (ref.cval) {
            const_low += pow2(pos - 1);
            s_max += pow2(pos - 1);
          }
        }
      }
      Int step = pow2(i - 1);
      Int q_max = floor_div(s_max, step);

      // Gates [S_i >= q * 2^(i-1)] for q = 1..q_max, then the alternating sum
      // telescopes to bit i of the total.
      std::vector<int> gate_wires;
      for (Int q = 1; q <= q_max; ++q) {
        ThresholdGate g;
        for (const auto& [w, c] : coeff) g.weights.emplace_back(w, c);
        g.bias = const_low - q * step + 1;
        l1.push_back(std::move(g));
        gate_wires.push_back((int)l1.size() - 1);
      }
      ThresholdGate bit;
      for (size_t k = 0; k < gate_wires.size(); ++k)
        bit.weights.emplace_back(gate_wires[k], Int(k % 2 == 0 ? 1 : -1));
      bit.bias = 0;
      l2.push_back(std::move(bit));
      outputs_[si].push_back((int)l2.size() - 1);
    }
  }
  layers.push_back(std::move(l1));
  layers.push_back(std::move(l2));
}

void AdderBuilder::build_poly(std::vector<GateLayer>& layers) {
  const int m = std::max(1, max_addends_);
  const int beta = block_width_for(m);
  GateLayer l1, l2, l3, l4, l5;
  outputs_.assign(sums_.size(), {});

  struct Combo {
    std::vector<std::pair<int, int>> terms;  // (L1 wire, +-1)
  };

  for (size_t si = 0; si < sums_.size(); ++si) {
    const auto& addends = sums_[si];
    const int blocks = (C_ + beta - 1) / beta;

    // L1: per block r, gates T_{r,a} = [V_r >= a]; V_r is the weighted column
    // count of the block, value range [0, m*(2^beta - 1)].
    std::vector<std::vector<int>> block_gates(blocks);  // a -> wire (a from 1)
    std::vector<long> block_vmax(blocks, 0);
    for (int r = 0; r < blocks; ++r) {
      std::map<int, Int> coeff;
      long cval = 0, vmax = 0;
      for (int s = 1; s <= beta; ++s) {
        int pos = r * beta + s;
        if (pos > C_) break;
        for (const auto& a : addends) {
          const BitRef& ref = a[pos - 1];
          if (ref.is_wire()) {
            coeff[ref.wire] += Int(1) << (s - 1);
            vmax += 1L << (s - 1);
          } else if (ref.cval) {
            cval += 1L << (s - 1);
            vmax += 1L << (s - 1);
          }
        }
      }
      block_vmax[r] = vmax;
      for (long a = 1; a <= vmax; ++a) {
        ThresholdGate g;
        for (const auto& [w, c] : coeff) g.weights.emplace_back(w, c);
        g.bias = Int(cval) - a + 1;
        l1.push_back(std::move(g));
        block_gates[r].push_back((int)l1.size() - 1);
      }
    }

    // Exact +-1 combo equal to bit s of V_r over the block's L1 gates.
    auto block_bit_combo = [&](int r, int s) {
      Combo c;
      if (r < 0 || r >= blocks) return c;
      long step = 1L << (s - 1);
      int q = 1;
      for (long a = step; a <= block_vmax[r]; a += step, ++q)
        c.terms.emplace_back(block_gates[r][a - 1], q % 2 == 1 ? 1 : -1);
      return c;
    };
    // Y = even blocks, Z = odd blocks; position pos is served by exactly one
    // even and one odd block among {r0-1, r0}.
    auto rail_combo = [&](int pos, int parity) {
      int r0 = (pos - 1) / beta;
      for (int r : {r0, r0 - 1}) {
        if (r < 0 || (r & 1) != parity) continue;
        int s = pos - r * beta;
        if (s >= 1 && s <= 2 * beta) return block_bit_combo(r, s);
      }
      return Combo{};
    };

    // L2: e_pos = [y+z >= 1], f_pos = [y+z >= 2].
    std::vector<int> e_wire(C_ + 1), f_wire(C_ + 1);
    for (int pos = 1; pos <= C_; ++pos) {
      Combo y = rail_combo(pos, 0), z = rail_combo(pos, 1);
      for (int variant = 0; variant < 2; ++variant) {
        ThresholdGate g;
        for (const auto& [w, c] : y.terms) g.weights.emplace_back(w, Int(c));
        for (const auto& [w, c] : z.terms) g.weights.emplace_back(w, Int(c));
        g.bias = variant == 0 ? 0 : -1;
        l2.push_back(std::move(g));
        (variant == 0 ? e_wire : f_wire)[pos] = (int)l2.size() - 1;
      }
    }

    // L3: carry disjuncts D_{i,j} = [generate at j, propagate on (j,i)],
    // mutually exclusive across j; plus forwarded e/f.
    std::vector<std::vector<int>> d_wires(C_ + 1);
    std::vector<int> e_fwd(C_ + 1), f_fwd(C_ + 1);
    for (int i = 1; i <= C_; ++i) {
      for (int j = 1; j < i; ++j) {
        ThresholdGate g;
        g.weights.emplace_back(f_wire[j], Int(1));
        for (int k = j + 1; k < i; ++k) {
          g.weights.emplace_back(e_wire[k], Int(1));
          g.weights.emplace_back(f_wire[k], Int(-1));
        }
        g.bias = -(Int(i - j)) + 1;
        l3.push_back(std::move(g));
        d_wires[i].push_back((int)l3.size() - 1);
      }
    }
    for (int pos = 1; pos <= C_; ++pos) {
      ThresholdGate ge, gf;
      ge.weights.emplace_back(e_wire[pos], Int(1));
      gf.weights.emplace_back(f_wire[pos], Int(1));
      l3.push_back(std::move(ge));
      e_fwd[pos] = (int)l3.size() - 1;
      l3.push_back(std::move(gf));
      f_fwd[pos] = (int)l3.size() - 1;
    }

    // L4: with pi = e_i - f_i (parity of the column) and kappa = sum of D,
    // G1 = [kappa > pi], G2 = [pi > kappa]; bit_i = G1 xor-free sum at L5.
    for (int i = 1; i <= C_; ++i) {
      ThresholdGate g1, g2;
      for (int d : d_wires[i]) {
        g1.weights.emplace_back(d, Int(1));
        g2.weights.emplace_back(d, Int(-1));
      }
      g1.weights.emplace_back(e_fwd[i], Int(-1));
      g1.weights.emplace_back(f_fwd[i], Int(1));
      g2.weights.emplace_back(e_fwd[i], Int(1));
      g2.weights.emplace_back(f_fwd[i], Int(-1));
      g1.bias = 0;
      g2.bias = 0;
      l4.push_back(std::move(g1));
      l4.push_back(std::move(g2));
    }
    int g_base = (int)l4.size() - 2 * C_;

    // L5: bit_i = sign(G1_i + G2_i).
    for (int i = 1; i <= C_; ++i) {
      ThresholdGate bit;
      bit.weights.emplace_back(g_base + 2 * (i - 1), Int(1));
      bit.weights.emplace_back(g_base + 2 * (i - 1) + 1, Int(1));
      bit.bias = 0;
      l5.push_back(std::move(bit));
      outputs_[si].push_back((int)l5.size() - 1);
    }
  }

  layers.push_back(std::move(l1));
  layers.push_back(std::move(l2));
  layers.push_back(std::move(l3));
  layers.push_back(std::move(l4));
  layers.push_back(std::move(l5));
}

ThresholdCircuit iterated_addition_gadget(int m, const FixedPointFormat& fmt, AdderMode mode,
                                          std::optional<Int> addend_abs_bound) {
  if (m < 1) throw std::invalid_argument("iterated_addition_gadget: m must be >= 1");
  if (addend_abs_bound && *addend_abs_bound * m > fmt.max_value())
    throw std::overflow_error("iterated_addition_gadget: sum of " + std::to_string(m) +
                              " addends bounded by " + addend_abs_bound->get_str() +
                              " cannot fit in " + std::to_string(fmt.C) + " bits");

  AdderBuilder builder(fmt.C, mode);
  std::vector<AddendBits> addends(m);
  for (int a = 0; a < m; ++a) {
    addends[a].resize(fmt.C);
    for (int b = 0; b < fmt.C; ++b) addends[a][b] = BitRef::w(a * fmt.C + b);
  }
  int id = builder.add_sum(std::move(addends));

  ThresholdCircuit c;
  c.input_bits = m * fmt.C;
  c.tag = "iterated_addition(m=" + std::to_string(m) + ",C=" + std::to_string(fmt.C) +
          "," + adder_mode_name(mode) + ")";
  c.layers = builder.build();
  c.output_indices = builder.outputs(id);
  return c;
}

ThresholdCircuit multiplication_gadget(const FixedPointFormat& fmt,
                                       std::optional<Int> operand_abs_bound) {
  const int C = fmt.C;
  if (operand_abs_bound && *operand_abs_bound * *operand_abs_bound > fmt.max_value())
    throw std::overflow_error("multiplication_gadget: product of values bounded by " +
                              operand_abs_bound->get_str() + " cannot fit in " +
                              std::to_string(C) + " bits");

  // Layer 1: partial products x_a AND y_b for positions a+b-1 <= C; the
  // result is exact mod 2^C, which equals the signed product when it fits.
  ThresholdCircuit c;
  c.input_bits = 2 * C;
  c.tag = "multiplication(C=" + std::to_string(C) + ")";
  GateLayer pp;
  std::vector<AddendBits> rows(C);
  for (int a = 1; a <= C; ++a) {
    rows[a - 1].assign(C, BitRef::c(0));
    for (int b = 1; a + b - 1 <= C; ++b) {
      ThresholdGate g;
      g.weights.emplace_back(a - 1, Int(1));
      g.weights.emplace_back(C + b - 1, Int(1));
      g.bias = -1;
      pp.push_back(std::move(g));
      rows[a - 1][a + b - 2] = BitRef::w((int)pp.size() - 1);
    }
  }
  c.layers.push_back(std::move(pp));

  AdderBuilder builder(C, AdderMode::Compact);
  int id = builder.add_sum(rows);
  for (auto& layer : builder.build()) c.layers.push_back(std::move(layer));
  c.output_indices = builder.outputs(id);
  return c;
}

ThresholdCircuit relu_gadget(const FixedPointFormat& fmt, int rails) {
  if (rails != 1 && rails != 2)
    throw std::invalid_argument("relu_gadget: rails must be 1 or 2");
  const int C = fmt.C;
  ThresholdCircuit c;
  c.input_bits = rails * C;
  c.tag = std::string("relu(C=") + std::to_string(C) + ",rails=" + std::to_string(rails) + ")";
  GateLayer layer;
  const int msb = C - 1;  // wire of v's sign bit
  for (int b = 0; b < C - 1; ++b) {
    ThresholdGate g;
    g.weights.emplace_back(b, Int(1));
    g.weights.emplace_back(msb, Int(-1));
    layer.push_back(std::move(g));
  }
  layer.push_back(ThresholdGate{});  // MSB of the positive rail: constant 0
  if (rails == 2) {
    for (int b = 0; b < C; ++b) {
      ThresholdGate g;
      g.weights.emplace_back(C + b, Int(1));
      g.weights.emplace_back(msb, Int(-1));
      layer.push_back(std::move(g));
    }
  }
  c.layers.push_back(std::move(layer));
  for (int i = 0; i < rails * C; ++i) c.output_indices.push_back(i);
  return c;
}

namespace {

AddendBits word_addend(int first_wire, int C) {
  AddendBits a(C);
  for (int b = 0; b < C; ++b) a[b] = BitRef::w(first_wire + b);
  return a;
}

AddendBits const_addend(const Int& v, const FixedPointFormat& fmt) {
  BitsWord w = encode_word(v, fmt);
  AddendBits a(fmt.C);
  for (int b = 0; b < fmt.C; ++b) a[b] = BitRef::c(w.bits[b]);
  return a;
}

}  // namespace

ThresholdCircuit signed_sum_gadget(const std::vector<int>& coeffs, const Int& bias,
                                   const FixedPointFormat& fmt, AdderMode mode,
                                   std::optional<Int> input_abs_bound) {
  const int n = (int)coeffs.size();
  const int C = fmt.C;
  for (int a : coeffs)
    if (a != 1 && a != -1)
      throw std::invalid_argument("signed_sum_gadget: coefficients must be +-1");
  if (input_abs_bound && *input_abs_bound * n + abs(bias) > fmt.max_value())
    throw std::overflow_error("signed_sum_gadget: sum cannot fit in the word");
  if (!fmt.fits(bias)) throw std::overflow_error("signed_sum_gadget: bias does not fit");

  AdderBuilder builder(C, mode);
  std::vector<AddendBits> pos_addends, neg_addends;
  for (int i = 0; i < n; ++i) {
    int v_wire = 2 * i * C, w_wire = (2 * i + 1) * C;
    pos_addends.push_back(word_addend(coeffs[i] > 0 ? v_wire : w_wire, C));
    neg_addends.push_back(word_addend(coeffs[i] > 0 ? w_wire : v_wire, C));
  }
  pos_addends.push_back(const_addend(bias, fmt));
  neg_addends.push_back(const_addend(-bias, fmt));
  int pid = builder.add_sum(std::move(pos_addends));
  int nid = builder.add_sum(std::move(neg_addends));

  ThresholdCircuit c;
  c.input_bits = 2 * n * C;
  c.tag = "signed_sum(n=" + std::to_string(n) + ",C=" + std::to_string(C) + "," +
          adder_mode_name(mode) + ")";
  c.layers = builder.build();
  for (int w : builder.outputs(pid)) c.output_indices.push_back(w);
  for (int w : builder.outputs(nid)) c.output_indices.push_back(w);
  return c;
}

ThresholdCircuit clip_flag_stage(const Rational& B, const FixedPointFormat& fmt, AdderMode mode,
                                 std::optional<Int> value_abs_bound) {
  const int C = fmt.C;
  Rational bt = B * Rational(fmt.t);
  if (!bt.is_integer())
    throw std::invalid_argument("clip_flag_stage: B*t = " + bt.str() + " is not an integer");
  Int Bt = bt.num();
  if (2 * Bt > fmt.max_value())
    throw std::overflow_error("clip_flag_stage: 2Bt does not fit the word");
  if (value_abs_bound && *value_abs_bound + Bt > fmt.max_value())
    throw std::overflow_error("clip_flag_stage: v +- Bt can overflow the word");

  // v' = v + Bt and v'' = -v + Bt share the adder layers.
  AdderBuilder builder(C, mode);
  int vp = builder.add_sum({word_addend(0, C), const_addend(Bt, fmt)});
  int vpp = builder.add_sum({word_addend(C, C), const_addend(Bt, fmt)});

  ThresholdCircuit c;
  c.input_bits = 2 * C;
  c.tag = "clip_flag(B=" + B.str() + ",C=" + std::to_string(C) + "," + adder_mode_name(mode) + ")";
  c.layers = builder.build();

  const auto& wp = builder.outputs(vp);
  const auto& wpp = builder.outputs(vpp);
  GateLayer combine;
  for (int b = 0; b < C; ++b) {
    if (b == C - 1) {
      combine.push_back(ThresholdGate{});  // output word MSB is always 0
      continue;
    }
    ThresholdGate g;
    g.weights.emplace_back(wp[b], Int(1));
    g.weights.emplace_back(wp[C - 1], Int(-1));
    g.weights.emplace_back(wpp[C - 1], Int(-1));
    combine.push_back(std::move(g));
  }
  ThresholdGate flag;
  flag.weights.emplace_back(wpp[C - 1], Int(1));
  combine.push_back(std::move(flag));
  c.layers.push_back(std::move(combine));
  for (int i = 0; i <= C; ++i) c.output_indices.push_back(i);
  return c;
}

}  // namespace relucc
