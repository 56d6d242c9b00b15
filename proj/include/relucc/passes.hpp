#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relucc/net.hpp"

namespace relucc {

// The grid I = { j/p : -R*p <= j <= R*p }. R*p must be integral.
struct GridSpec {
  Rational R;
  long p = 1;

  Int half_count() const;                // R*p
  long point_count() const;              // 2*R*p + 1
  Rational point(long index) const;      // index 0 -> -R, ascending
  std::vector<Rational> points() const;  // all of I, ascending
};

// Rounds x onto the grid: nearest multiple of 1/p (ties toward +infinity),
// 0 outside [-R - 1/(2p), R + 1/(2p)].
Rational round_to_grid(const GridSpec& grid, const Rational& x);

// Appends the clipping layer: result computes clamp(net(x), -B, B) exactly,
// at depth(net) + 1, via [y+B]+ - [y-B]+ - B with a fan-in-0 bias-1 neuron
// carrying the constant.
ReluNet add_clip_layer(const ReluNet& net, const Rational& B);

// Duplicates hidden neurons until every one feeds exactly one successor.
ReluNet expand_fanout_one(const ReluNet& net);

// Normalizes all weights in layers 2..k to {-1,0,+1} by rescaling predecessor
// neurons; requires a fan-out-1 net. Zero-weight edges (dead neurons) are
// removed first.
ReluNet push_weights_first_layer(const ReluNet& net);

struct RationalizeOptions {
  long grid_cap = 200000;     // exhaustive grid verification up to this many points
  long sample_count = 4096;   // seeded sample size above the cap
  std::uint64_t seed = 1;
  int max_doublings = 64;
  int start_bits = 8;
  long max_exact_lcm_bits = 64;  // use t = lcm of denominators when this small
};

struct GridResidual {
  std::vector<long> grid_index;  // per-coordinate index into I
  Rational residual;
};

struct RationalizedNet {
  ReluNet net;  // N'': weights/biases share denominator t
  Int t = 1;
  Int numerator_bound;          // max |s| over all weights/biases s/t
  Rational worst_residual;      // max |N'' - N| over verified in-band grid points
  std::vector<GridResidual> certificate;      // worst residuals, canonical order
  std::vector<std::vector<long>> near_boundary;  // grid points with |N| within 1/p' of B
  bool exhaustive = false;      // whether every grid point was checked
  int refinement_doublings = 0;
};

// Produces N'' with weights and biases of the form s/t satisfying, on every
// verified grid point: |N''-N| <= 1/p' where N is in [-B,B]; N'' >= B where
// N > B; N'' <= -B where N < -B. Throws when the precision-refinement loop
// hits its cap without satisfying the contract.
RationalizedNet rationalize(const ReluNet& net, const GridSpec& grid, const Rational& B,
                            long p_prime, const RationalizeOptions& opts = {});

}  // namespace relucc
