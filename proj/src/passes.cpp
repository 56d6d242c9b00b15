#include "relucc/passes.hpp"

#include <algorithm>
#include <stdexcept>

#include "relucc/measure.hpp"

namespace relucc {

Int GridSpec::half_count() const {
  Rational rp = R * Rational(Int(p));
  if (!rp.is_integer())
    throw std::invalid_argument("GridSpec: R*p = " + rp.str() + " is not integral");
  return rp.num();
}

long GridSpec::point_count() const {
  Int n = 2 * half_count() + 1;
  if (!n.fits_slong_p()) throw std::overflow_error("GridSpec: grid too large");
  return n.get_si();
}

Rational GridSpec::point(long index) const {
  Int j = Int(index) - half_count();
  return Rational(j, Int(p));
}

std::vector<Rational> GridSpec::points() const {
  std::vector<Rational> out;
  long n = point_count();
  out.reserve(n);
  for (long i = 0; i < n; ++i) out.push_back(point(i));
  return out;
}

Rational round_to_grid(const GridSpec& grid, const Rational& x) {
  Rational half_step(1, 2 * grid.p);
  if (x < -grid.R - half_step || x > grid.R + half_step) return Rational(0);
  Int j = round_half_up(x * Rational(Int(grid.p)));
  Int rp = grid.half_count();
  if (j > rp) j = rp;
  if (j < -rp) j = -rp;
  return Rational(j, Int(grid.p));
}

ReluNet add_clip_layer(const ReluNet& net, const Rational& B) {
  if (net.output_dim() != 1)
    throw std::invalid_argument("add_clip_layer: network must have scalar output");
  if (B.sign() <= 0) throw std::invalid_argument("add_clip_layer: B must be positive");
  if (net.layers.empty()) throw std::invalid_argument("add_clip_layer: empty network");

  ReluNet out;
  out.input_dim = net.input_dim;
  out.label = net.label;
  out.layers.assign(net.layers.begin(), net.layers.end() - 1);

  // Replace the final linear layer y = w*prev with a hidden layer computing
  // [y+B]+, [y-B]+ and the constant 1, then recombine.
  const NetLayer& last = net.layers.back();
  NetLayer hidden;
  hidden.act = Activation::Relu;
  hidden.in_dim = last.in_dim;
  hidden.rows = {last.rows[0], last.rows[0], {}};
  hidden.biases = {B, -B, Rational(1)};
  out.layers.push_back(std::move(hidden));

  NetLayer final_lin;
  final_lin.act = Activation::Linear;
  final_lin.in_dim = 3;
  final_lin.rows = {{{0, Rational(1)}, {1, Rational(-1)}, {2, -B}}};
  final_lin.biases = {Rational(0)};
  out.layers.push_back(std::move(final_lin));
  return out;
}

ReluNet expand_fanout_one(const ReluNet& net) {
  ReluNet out = net;
  // Proceed from the output toward the input: each hidden neuron with fan-out
  // c > 1 is duplicated c times, one copy per consumer.
  for (int l = (int)out.layers.size() - 1; l >= 1; --l) {
    NetLayer& consumer = out.layers[l];
    const NetLayer& producer = out.layers[l - 1];

    std::vector<std::vector<std::pair<int, int>>> uses(producer.out_dim());
    for (int r = 0; r < (int)consumer.rows.size(); ++r)
      for (int k = 0; k < (int)consumer.rows[r].size(); ++k)
        uses[consumer.rows[r][k].first].emplace_back(r, k);

    NetLayer new_producer;
    new_producer.act = producer.act;
    new_producer.in_dim = producer.in_dim;
    NetLayer new_consumer = consumer;
    for (int n = 0; n < producer.out_dim(); ++n) {
      if (uses[n].empty()) continue;  // dead neuron: drop
      for (const auto& [r, k] : uses[n]) {
        new_producer.rows.push_back(producer.rows[n]);
        new_producer.biases.push_back(producer.biases[n]);
        new_consumer.rows[r][k].first = new_producer.out_dim() - 1;
      }
    }
    for (auto& row : new_consumer.rows)
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    new_consumer.in_dim = new_producer.out_dim();
    out.layers[l - 1] = std::move(new_producer);
    out.layers[l] = std::move(new_consumer);
  }
  return out;
}

ReluNet push_weights_first_layer(const ReluNet& net) {
  ReluNet out = net;
  // Zero-weight edges are deleted before pushing (division by |w|).
  for (auto& layer : out.layers)
    for (auto& row : layer.rows)
      std::erase_if(row, [](const auto& e) { return e.second.is_zero(); });
  // Check fan-out-1: every producer column appears in at most one consumer row.
  for (int l = 1; l < (int)out.layers.size(); ++l) {
    std::vector<int> count(out.layers[l - 1].out_dim(), 0);
    for (const auto& row : out.layers[l].rows)
      for (const auto& [c, w] : row) {
        (void)w;
        if (++count[c] > 1)
          throw std::invalid_argument("push_weights_first_layer: net is not fan-out-1");
      }
  }
  // From the output toward the input: move each edge magnitude into the
  // producing neuron; ReLU is positively homogeneous so values are unchanged.
  for (int l = (int)out.layers.size() - 1; l >= 1; --l) {
    NetLayer& consumer = out.layers[l];
    NetLayer& producer = out.layers[l - 1];
    for (auto& row : consumer.rows) {
      for (auto& [c, w] : row) {
        Rational mag = abs(w);
        if (mag == Rational(1)) continue;
        for (auto& [pc, pw] : producer.rows[c]) {
          (void)pc;
          pw *= mag;
        }
        producer.biases[c] *= mag;
        w = Rational(w.sign());
      }
    }
  }
  return out;
}

namespace {

Rational snap(const Rational& x, const Int& t) {
  // Nearest multiple of 1/t, ties toward +infinity.
  return Rational(round_half_up(x * Rational(t)), t);
}

ReluNet snap_net(const ReluNet& net, const Int& t) {
  ReluNet out = net;
  bool first = true;
  for (auto& layer : out.layers) {
    if (first) {
      for (auto& row : layer.rows)
        for (auto& [c, w] : row) {
          (void)c;
          w = snap(w, t);
        }
      first = false;
    }
    for (auto& b : layer.biases) b = snap(b, t);
  }
  return out;
}

Int common_denominator_lcm(const ReluNet& net) {
  Int t = 1;
  for (const auto& layer : net.layers) {
    for (const auto& row : layer.rows)
      for (const auto& [c, w] : row) {
        (void)c;
        t = lcm(t, w.den());
      }
    for (const auto& b : layer.biases) t = lcm(t, b.den());
  }
  return t;
}

struct ClauseCheck {
  bool ok = true;
  Rational residual;       // |N''-N| when N in band, else 0
  bool near_boundary = false;
  bool strict_flip = false;
};

// Activation-pattern comparison: a strict sign flip is z > 0 vs z' < 0 (or
// the mirror). Pre-activations touching zero on either side are exempt.
bool strict_pattern_flip(const ReluNet& a, const ReluNet& b, const std::vector<Rational>& x) {
  std::vector<Rational> sa = x, sb = x;
  for (size_t l = 0; l < a.layers.size(); ++l) {
    const NetLayer& la = a.layers[l];
    const NetLayer& lb = b.layers[l];
    std::vector<Rational> za(la.out_dim()), zb(lb.out_dim());
    for (int r = 0; r < la.out_dim(); ++r) {
      Rational va = la.biases[r], vb = lb.biases[r];
      for (const auto& [c, w] : la.rows[r]) va += w * sa[c];
      for (const auto& [c, w] : lb.rows[r]) vb += w * sb[c];
      if (la.act == Activation::Relu && va.sign() * vb.sign() < 0) return true;
      za[r] = la.act == Activation::Relu ? relu(va) : va;
      zb[r] = lb.act == Activation::Relu ? relu(vb) : vb;
    }
    sa = std::move(za);
    sb = std::move(zb);
  }
  return false;
}

ClauseCheck check_point(const ReluNet& orig, const ReluNet& snapped, const Rational& B,
                        const Rational& tol, const std::vector<Rational>& x) {
  ClauseCheck res;
  Rational n = eval_net_exact(orig, x)[0];
  Rational npp = eval_net_exact(snapped, x)[0];
  if (n >= -B && n <= B) {
    res.residual = abs(npp - n);
    res.ok = res.residual <= tol;
  } else if (n > B) {
    res.ok = npp >= B;
  } else {
    res.ok = npp <= -B;
  }
  if (abs(abs(n) - B) <= tol) res.near_boundary = true;
  if (res.ok) res.strict_flip = strict_pattern_flip(orig, snapped, x);
  return res;
}

}  // namespace

RationalizedNet rationalize(const ReluNet& net, const GridSpec& grid, const Rational& B,
                            long p_prime, const RationalizeOptions& opts) {
  if (net.output_dim() != 1)
    throw std::invalid_argument("rationalize: network must have scalar output");
  if (p_prime <= 0) throw std::invalid_argument("rationalize: p' must be positive");

  const int d = net.input_dim;
  const long per_axis = grid.point_count();
  double total_log = d * std::log2((double)per_axis);
  bool exhaustive = total_log <= std::log2((double)opts.grid_cap);

  // Enumerate the verification set of grid points (multi-indices).
  std::vector<std::vector<long>> indices;
  if (exhaustive) {
    std::vector<long> idx(d, 0);
    while (true) {
      indices.push_back(idx);
      int axis = d - 1;
      while (axis >= 0 && ++idx[axis] == per_axis) idx[axis--] = 0;
      if (axis < 0) break;
    }
  } else {
    CounterRng rng(opts.seed);
    for (long s = 0; s < opts.sample_count; ++s) {
      std::vector<long> idx(d);
      for (int i = 0; i < d; ++i)
        idx[i] = (long)(rng.next() % (std::uint64_t)per_axis);
      indices.push_back(idx);
    }
  }

  const Rational tol(1, p_prime);

  auto verify = [&](const ReluNet& candidate, RationalizedNet& result) {
    result.certificate.clear();
    result.near_boundary.clear();
    result.worst_residual = Rational(0);
    std::vector<Rational> x(d);
    for (const auto& idx : indices) {
      for (int i = 0; i < d; ++i) x[i] = grid.point(idx[i]);
      ClauseCheck c = check_point(net, candidate, B, tol, x);
      if (c.near_boundary) result.near_boundary.push_back(idx);
      if (!c.ok || c.strict_flip) {
        result.certificate.push_back({idx, c.residual});
        return false;
      }
      if (c.residual > result.worst_residual) {
        result.worst_residual = c.residual;
        result.certificate.assign(1, {idx, c.residual});
      }
    }
    return true;
  };

  auto finish = [&](RationalizedNet& result, const ReluNet& candidate, const Int& t) {
    result.net = candidate;
    result.net.label = net.label;
    result.t = t;
    result.exhaustive = exhaustive;
    result.numerator_bound = t;  // interior +-1 weights are +-t/t
    bool first = true;
    for (const auto& layer : result.net.layers) {
      if (first) {
        for (const auto& row : layer.rows)
          for (const auto& [c, w] : row) {
            (void)c;
            Int s = w.num() * (t / w.den());
            if (abs(s) > result.numerator_bound) result.numerator_bound = abs(s);
          }
        first = false;
      }
      for (const auto& b : layer.biases) {
        Int s = b.num() * (t / b.den());
        if (abs(s) > result.numerator_bound) result.numerator_bound = abs(s);
      }
    }
  };

  // Exact path: when the least common denominator is small, N'' = N.
  Int exact_t = common_denominator_lcm(net);
  if ((long)bitlen(exact_t) <= opts.max_exact_lcm_bits) {
    RationalizedNet result;
    if (!verify(net, result))
      throw std::runtime_error("rationalize: exact candidate failed its own contract");
    finish(result, net, exact_t);
    return result;
  }

  // Rounding path: snap to denominator t = 2^bits, doubling until the grid
  // contract holds.
  RationalizedNet result;
  int bits = opts.start_bits;
  for (int round = 0; round <= opts.max_doublings; ++round, bits *= 2) {
    Int t = pow2(bits);
    ReluNet candidate = snap_net(net, t);
    result.refinement_doublings = round;
    if (verify(candidate, result)) {
      finish(result, candidate, t);
      return result;
    }
  }
  std::string witness;
  if (!result.certificate.empty()) {
    for (long i : result.certificate.front().grid_index)
      witness += (witness.empty() ? "" : ",") + std::to_string(i);
  }
  throw std::runtime_error(
      "rationalize: precision refinement hit the doubling cap; offending grid index (" +
      witness + ")");
}

}  // namespace relucc
