#include "relucc/quantizer.hpp"

#include <stdexcept>

#include "relucc/words.hpp"

namespace relucc {

int quantizer_min_bits(const GridSpec& grid) {
  Int span = 2 * grid.half_count() + 1;
  return (int)bitlen(span) + 1;
}

void QuantizerSpec::validate() const {
  (void)grid.point_count();
  if (!(delta > Rational(0) && delta < Rational(1, 2)))
    throw std::invalid_argument("QuantizerSpec: delta must be in (0, 1/2)");
  if (C < quantizer_min_bits(grid))
    throw std::invalid_argument("QuantizerSpec: C must be at least " +
                                std::to_string(quantizer_min_bits(grid)));
}

bool in_quantizer_band(const QuantizerSpec& spec, const Rational& x) {
  // Bands are p*x in [l - 1/2 - delta, l - 1/2 + delta] for integer l.
  Rational u = x * Rational(Int(spec.grid.p));
  Rational shifted = u + Rational(1, 2);
  Rational frac = shifted - Rational(floor_of(shifted));
  return frac <= spec.delta || frac >= Rational(1) - spec.delta;
}

ReluNet build_quantizer(const QuantizerSpec& spec, int dims) {
  spec.validate();
  if (dims < 1) throw std::invalid_argument("build_quantizer: dims must be >= 1");

  const long rp_l = [&] {
    Int rp = spec.grid.half_count();
    if (!rp.fits_slong_p()) throw std::overflow_error("build_quantizer: grid too large");
    return rp.get_si();
  }();
  const int C = spec.C;
  const Rational p_over_delta = Rational(Int(spec.grid.p)) / spec.delta;
  FixedPointFormat fmt{C, 1};

  // Layer 1: per coordinate, ramp pairs g_l = r+_l - r-_l for l in [-Rp, Rp+1]:
  //   r+_l = relu((p*x - l + 1/2)/delta), r-_l = relu((p*x - l + 1/2 - delta)/delta).
  NetLayer ramps;
  ramps.act = Activation::Relu;
  ramps.in_dim = dims;
  const long ramp_levels = 2 * rp_l + 2;  // l from -Rp to Rp+1
  for (int i = 0; i < dims; ++i) {
    for (long k = 0; k < ramp_levels; ++k) {
      Rational l = Rational(Int(k - rp_l));
      Rational base = (Rational(1, 2) - l) / spec.delta;
      ramps.rows.push_back({{i, p_over_delta}});
      ramps.biases.push_back(base);
      ramps.rows.push_back({{i, p_over_delta}});
      ramps.biases.push_back(base - Rational(1));
    }
  }

  // Layer 2: bit j of coordinate i is sum over l in I_j of (g_l - g_{l+1});
  // collecting per ramp level: coefficient ind(l) - ind(l-1).
  auto ind = [&](long l, int j) -> int {
    if (l < -rp_l || l > rp_l) return 0;
    return encode_word(Int(l), fmt).bits[j];
  };
  NetLayer combine;
  combine.act = Activation::Linear;
  combine.in_dim = (int)ramps.rows.size();
  for (int i = 0; i < dims; ++i) {
    for (int j = 0; j < C; ++j) {
      SparseRow row;
      for (long k = 0; k < ramp_levels; ++k) {
        long l = k - rp_l;
        int coeff = ind(l, j) - ind(l - 1, j);
        if (coeff == 0) continue;
        int plus = (int)((i * ramp_levels + k) * 2);
        row.emplace_back(plus, Rational(coeff));
        row.emplace_back(plus + 1, Rational(-coeff));
      }
      combine.rows.push_back(std::move(row));
      combine.biases.push_back(Rational(0));
    }
  }

  ReluNet net;
  net.input_dim = dims;
  net.label = "quantizer(p=" + std::to_string(spec.grid.p) + ",R=" + spec.grid.R.str() +
              ",C=" + std::to_string(C) + ")";
  net.layers.push_back(std::move(ramps));
  net.layers.push_back(std::move(combine));
  return net;
}

ReluNet build_quantizer_discrete(const QuantizerSpec& spec, int dims) {
  // Grid points sit at distance exactly 1/2 (in u units) from every ramp
  // center, so any delta < 1/2 makes the encoding exact on all of I^d.
  return build_quantizer(spec, dims);
}

}  // namespace relucc
