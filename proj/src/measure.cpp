#include "relucc/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace relucc {

std::uint64_t CounterRng::at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DistributionSpec DistributionSpec::uniform_grid(const GridSpec& g, int d) {
  DistributionSpec s;
  s.kind = Kind::UniformGrid;
  s.grid = g;
  s.dims = d;
  return s;
}

DistributionSpec DistributionSpec::uniform_box(const Rational& R, int d) {
  DistributionSpec s;
  s.kind = Kind::UniformBox;
  s.box_R = R;
  s.dims = d;
  return s;
}

DistributionSpec DistributionSpec::gaussian(std::vector<double> mean,
                                            std::vector<double> variance) {
  DistributionSpec s;
  s.kind = Kind::Gaussian;
  s.dims = (int)mean.size();
  s.mean = std::move(mean);
  s.variance = std::move(variance);
  return s;
}

DistributionSpec DistributionSpec::mixture(std::vector<double> weights,
                                           std::vector<DistributionSpec> components) {
  DistributionSpec s;
  s.kind = Kind::Mixture;
  s.mixture_weights = std::move(weights);
  s.components = std::move(components);
  s.dims = s.components.empty() ? 0 : s.components[0].dimension();
  return s;
}

int DistributionSpec::dimension() const {
  return kind == Kind::Mixture ? (components.empty() ? 0 : components[0].dimension()) : dims;
}

void DistributionSpec::validate() const {
  switch (kind) {
    case Kind::UniformGrid:
      (void)grid.point_count();
      if (dims < 1) throw std::invalid_argument("distribution: dims must be >= 1");
      break;
    case Kind::UniformBox:
      if (box_R.sign() <= 0) throw std::invalid_argument("distribution: R must be positive");
      if (dims < 1) throw std::invalid_argument("distribution: dims must be >= 1");
      break;
    case Kind::Gaussian:
      if (mean.size() != variance.size() || mean.empty())
        throw std::invalid_argument("distribution: gaussian mean/variance mismatch");
      for (double v : variance)
        if (v <= 0) throw std::invalid_argument("distribution: variance must be positive");
      break;
    case Kind::Mixture: {
      if (components.empty() || components.size() != mixture_weights.size())
        throw std::invalid_argument("distribution: mixture weights/components mismatch");
      double sum = 0;
      for (double w : mixture_weights) {
        if (w <= 0) throw std::invalid_argument("distribution: mixture weights must be positive");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("distribution: mixture weights must sum to 1");
      int d = components[0].dimension();
      for (const auto& c : components) {
        c.validate();
        if (c.dimension() != d)
          throw std::invalid_argument("distribution: mixture component dims differ");
      }
      break;
    }
  }
}

namespace {

// One point of the stream; every point consumes a fixed counter budget per
// coordinate so streams are independent of evaluation order.
constexpr std::uint64_t kDrawsPerCoord = 2;

std::vector<double> draw_point(const DistributionSpec& dist, std::uint64_t seed,
                               std::uint64_t point_index) {
  const int d = dist.dimension();
  std::vector<double> x(d);
  switch (dist.kind) {
    case DistributionSpec::Kind::UniformGrid: {
      long count = dist.grid.point_count();
      for (int i = 0; i < d; ++i) {
        std::uint64_t u = CounterRng::at(seed, point_index * d * kDrawsPerCoord + i);
        x[i] = dist.grid.point((long)(u % (std::uint64_t)count)).to_double();
      }
      break;
    }
    case DistributionSpec::Kind::UniformBox: {
      double R = dist.box_R.to_double();
      for (int i = 0; i < d; ++i) {
        std::uint64_t u = CounterRng::at(seed, point_index * d * kDrawsPerCoord + i);
        x[i] = ((double)(u >> 11) * 0x1.0p-53 * 2.0 - 1.0) * R;
      }
      break;
    }
    case DistributionSpec::Kind::Gaussian: {
      for (int i = 0; i < d; ++i) {
        std::uint64_t base = point_index * d * kDrawsPerCoord + i * kDrawsPerCoord;
        double u1 = ((double)(CounterRng::at(seed, base) >> 11) + 0.5) * 0x1.0p-53;
        double u2 = (double)(CounterRng::at(seed, base + 1) >> 11) * 0x1.0p-53;
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        x[i] = dist.mean[i] + std::sqrt(dist.variance[i]) * z;
      }
      break;
    }
    case DistributionSpec::Kind::Mixture: {
      double u = (double)(CounterRng::at(seed ^ 0xA5A5A5A5A5A5A5A5ULL, point_index) >> 11) *
                 0x1.0p-53;
      size_t pick = 0;
      double acc = 0;
      for (size_t k = 0; k < dist.mixture_weights.size(); ++k) {
        acc += dist.mixture_weights[k];
        if (u < acc) {
          pick = k;
          break;
        }
        pick = k;
      }
      x = draw_point(dist.components[pick], seed + 0x51ED2700 + pick, point_index);
      break;
    }
  }
  return x;
}

}  // namespace

std::vector<std::vector<double>> sample(const DistributionSpec& dist, long n,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  dist.validate();
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (long k = 0; k < n; ++k) out.push_back(draw_point(dist, seed, (std::uint64_t)k));
  return out;
}

std::vector<std::vector<Rational>> sample_grid_exact(const DistributionSpec& dist, long n,
                                                     std::uint64_t seed) {
  if (dist.kind != DistributionSpec::Kind::UniformGrid)
    throw std::invalid_argument("sample_grid_exact: distribution is not a grid");
  dist.validate();
  const int d = dist.dimension();
  long count = dist.grid.point_count();
  std::vector<std::vector<Rational>> out;
  out.reserve(n);
  for (long k = 0; k < n; ++k) {
    std::vector<Rational> x(d);
    for (int i = 0; i < d; ++i) {
      std::uint64_t u = CounterRng::at(seed, (std::uint64_t)k * d * kDrawsPerCoord + i);
      x[i] = dist.grid.point((long)(u % (std::uint64_t)count));
    }
    out.push_back(std::move(x));
  }
  return out;
}

Evaluable Evaluable::from_net(const ReluNet& net) {
  Evaluable e;
  e.dims = net.input_dim;
  ReluNet copy = net;
  e.approx = [copy](const std::vector<double>& x) { return eval_net_float(copy, x)[0]; };
  e.exact = [copy](const std::vector<Rational>& x) { return eval_net_exact(copy, x)[0]; };
  return e;
}

Evaluable Evaluable::from_net_float(const ReluNet& net) {
  Evaluable e;
  e.dims = net.input_dim;
  ReluNet copy = net;
  e.approx = [copy](const std::vector<double>& x) { return eval_net_float(copy, x)[0]; };
  return e;
}

double pairwise_sum(const std::vector<double>& xs) {
  std::function<double(size_t, size_t)> go = [&](size_t lo, size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0;
      for (size_t i = lo; i < hi; ++i) s += xs[i];
      return s;
    }
    size_t mid = lo + (hi - lo) / 2;
    return go(lo, mid) + go(mid, hi);
  };
  return xs.empty() ? 0.0 : go(0, xs.size());
}

ErrorReport estimate_l2_diff(const Evaluable& f, const Evaluable& g,
                             const DistributionSpec& dist, long n, std::uint64_t seed) {
  if (f.dims != dist.dimension() || g.dims != dist.dimension())
    throw std::invalid_argument("estimate_l2_diff: dimension mismatch");
  auto points = sample(dist, n, seed);

  std::vector<double> sq(points.size());
  for (size_t k = 0; k < points.size(); ++k) {
    double diff;
    try {
      diff = f.approx(points[k]) - g.approx(points[k]);
    } catch (const std::exception& ex) {
      std::string at = "(";
      for (size_t i = 0; i < points[k].size(); ++i)
        at += (i ? "," : "") + std::to_string(points[k][i]);
      throw std::runtime_error(std::string(ex.what()) + " at sample " + at + ")");
    }
    sq[k] = diff * diff;
  }

  double total = pairwise_sum(sq);
  double mean = total / (double)n;

  ErrorReport rep;
  rep.l2_estimate = std::sqrt(mean);
  rep.sample_count = n;
  rep.seed = seed;
  rep.mode = "monte_carlo";

  // Jackknife over theta_(i) = sqrt((S - x_i) / (n-1)).
  if (n > 1) {
    std::vector<double> theta(n);
    for (long i = 0; i < n; ++i) theta[i] = std::sqrt(std::max(0.0, (total - sq[i]) / (n - 1)));
    double tbar = pairwise_sum(theta) / n;
    std::vector<double> dev(n);
    for (long i = 0; i < n; ++i) dev[i] = (theta[i] - tbar) * (theta[i] - tbar);
    rep.standard_error = std::sqrt((double)(n - 1) / n * pairwise_sum(dev));
  }
  return rep;
}

ErrorReport exhaustive_grid_l2(const Evaluable& f, const Evaluable& g, const GridSpec& grid,
                               int d, const GridL2Options& opts) {
  const long per_axis = grid.point_count();
  double total_log = d * std::log2((double)per_axis);
  if (total_log > std::log2((double)opts.cap))
    throw std::invalid_argument("exhaustive_grid_l2: |I|^d exceeds the cap");
  long total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  if (!opts.weights.empty() && (long)opts.weights.size() != total)
    throw std::invalid_argument("exhaustive_grid_l2: weight count differs from grid size");

  const bool exact = (bool)f.exact && (bool)g.exact;
  Rational acc_sq, weight_sum;   // exact path accumulators
  double acc_sq_d = 0, weight_sum_d = 0;
  double worst = -1;
  std::vector<double> worst_x;

  std::vector<long> idx(d, 0);
  std::vector<Rational> x(d);
  std::vector<double> xd(d);
  for (long k = 0; k < total; ++k) {
    for (int i = 0; i < d; ++i) {
      x[i] = grid.point(idx[i]);
      xd[i] = x[i].to_double();
    }
    Rational w = opts.weights.empty() ? Rational(1) : opts.weights[k];
    double ad;
    if (exact) {
      Rational diff = f.exact(x) - g.exact(x);
      acc_sq += w * diff * diff;
      weight_sum += w;
      ad = std::abs(diff.to_double());
    } else {
      double diff = f.approx(xd) - g.approx(xd);
      acc_sq_d += w.to_double() * diff * diff;
      weight_sum_d += w.to_double();
      ad = std::abs(diff);
    }
    if (ad > worst) {
      worst = ad;
      worst_x = xd;
    }
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] == per_axis) idx[axis--] = 0;
  }

  ErrorReport rep;
  rep.sample_count = total;
  rep.mode = "exhaustive";
  rep.standard_error = 0;
  rep.exact_arithmetic = exact;
  rep.l2_estimate = exact ? std::sqrt((acc_sq / weight_sum).to_double())
                          : std::sqrt(acc_sq_d / weight_sum_d);
  rep.worst_residual = worst < 0 ? 0 : worst;
  rep.worst_point = worst_x;
  return rep;
}

}  // namespace relucc
