#include "relucc/words.hpp"

#include <stdexcept>

namespace relucc {

BitsWord encode_word(const Int& v, const FixedPointFormat& fmt) {
  if (!fmt.fits(v))
    throw std::out_of_range("encode_word: " + v.get_str() + " does not fit in " +
                            std::to_string(fmt.C) + " bits");
  Int u = v < 0 ? v + pow2(fmt.C) : v;
  BitsWord w;
  w.bits.resize(fmt.C);
  for (int b = 0; b < fmt.C; ++b)
    w.bits[b] = mpz_tstbit(u.get_mpz_t(), b) ? 1 : 0;
  return w;
}

Int decode_word(const BitsWord& w) {
  const int C = w.width();
  if (C == 0) throw std::invalid_argument("decode_word: empty word");
  Int v = 0;
  for (int b = 0; b < C - 1; ++b) {
    if (w.bits[b] != 0 && w.bits[b] != 1)
      throw std::invalid_argument("decode_word: non-binary bit");
    if (w.bits[b]) v += pow2(b);
  }
  if (w.bits[C - 1]) v -= pow2(C - 1);
  return v;
}

ThresholdCircuit const_block(const BitsWord& w, int input_bits) {
  ThresholdCircuit c;
  c.input_bits = input_bits;
  c.tag = "const_block";
  GateLayer layer;
  for (int bit : w.bits) {
    ThresholdGate g;
    g.bias = bit;  // fan-in 0, bias in {0,1}
    layer.push_back(g);
  }
  c.layers.push_back(std::move(layer));
  for (int i = 0; i < w.width(); ++i) c.output_indices.push_back(i);
  return c;
}

}  // namespace relucc
