#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relucc/net.hpp"
#include "relucc/passes.hpp"

namespace relucc {

// Counter-based generator: the k-th draw is splitmix64(seed, k), so streams
// are reproducible across platforms and independent of worker count.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  static std::uint64_t at(std::uint64_t seed, std::uint64_t counter);

  std::uint64_t next() { return at(seed_, counter_++); }
  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return (double)(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

struct DistributionSpec {
  enum class Kind { UniformGrid, UniformBox, Gaussian, Mixture };
  Kind kind = Kind::UniformGrid;

  // UniformGrid
  GridSpec grid;
  int dims = 1;
  // UniformBox: uniform on [-R, R]^dims
  Rational box_R;
  // Gaussian: diagonal
  std::vector<double> mean;
  std::vector<double> variance;
  // Mixture
  std::vector<double> mixture_weights;
  std::vector<DistributionSpec> components;

  static DistributionSpec uniform_grid(const GridSpec& g, int d);
  static DistributionSpec uniform_box(const Rational& R, int d);
  static DistributionSpec gaussian(std::vector<double> mean, std::vector<double> variance);
  static DistributionSpec mixture(std::vector<double> weights,
                                  std::vector<DistributionSpec> components);

  int dimension() const;
  void validate() const;
};

std::vector<std::vector<double>> sample(const DistributionSpec& dist, long n,
                                        std::uint64_t seed);

// Grid samples drawn exactly (as rationals); only valid for UniformGrid.
std::vector<std::vector<Rational>> sample_grid_exact(const DistributionSpec& dist, long n,
                                                     std::uint64_t seed);

// A function under measurement; the exact path is optional.
struct Evaluable {
  int dims = 1;
  std::function<double(const std::vector<double>&)> approx;
  std::function<Rational(const std::vector<Rational>&)> exact;  // may be empty

  static Evaluable from_net(const ReluNet& net);
  static Evaluable from_net_float(const ReluNet& net);
};

struct ErrorReport {
  double l2_estimate = 0;
  double standard_error = 0;
  long sample_count = 0;
  std::uint64_t seed = 0;
  std::string mode;  // "monte_carlo" | "exhaustive"
  std::vector<double> worst_point;
  double worst_residual = 0;
  bool exact_arithmetic = false;  // expectation accumulated in rationals
};

// Monte Carlo estimate of sqrt(E (f-g)^2) with jackknife standard error.
ErrorReport estimate_l2_diff(const Evaluable& f, const Evaluable& g,
                             const DistributionSpec& dist, long n, std::uint64_t seed);

struct GridL2Options {
  long cap = 1000000;
  // Optional point weights in grid odometer order; uniform when empty.
  std::vector<Rational> weights;
};

// Exact expectation over the finite grid I^d; uses rational accumulation when
// both sides expose an exact path.
ErrorReport exhaustive_grid_l2(const Evaluable& f, const Evaluable& g, const GridSpec& grid,
                               int d, const GridL2Options& opts = {});

// Deterministic pairwise summation over a fixed order.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace relucc
