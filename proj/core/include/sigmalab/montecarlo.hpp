#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sigmalab/pathspace.hpp"
#include "sigmalab/process_spec.hpp"

namespace sigmalab {

struct MCEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(count); 0 when count == 1
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
};

using Rng = std::mt19937_64;

// Fills `path` with n child ranks.
using PathSampler = std::function<void(Rng&, int n, std::vector<int>& path)>;
// Evaluated on a path prefix of length n.
using PathFunctional = std::function<double(std::span<const int>)>;

// Sampling is split into a fixed number of streams, each seeded with
// derive_stream_seed(seed, stream). Results depend on (seed, count, streams)
// only, never on the thread count.
struct MCOptions {
  std::uint32_t streams = 16;
  unsigned threads = 0;  // 0: worker_count()
};

// splitmix64 finalizer applied to seed + (stream + 1) * 0x9E3779B97F4A7C15.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream);

// Fair +-1 coin flips: ranks 0 and 1 with probability 1/2 each.
PathSampler fair_coin_sampler();
// Children drawn by their transition probabilities (as doubles).
PathSampler tree_sampler(SpacePtr space);

PathFunctional gallery_functional(ProcessKind kind);
// Value of the process at the node reached by the path.
PathFunctional process_functional(const AdaptedProcess& x);
PathFunctional constant_functional(double value);

// Mean of F_n(path) * X_n(path) over paths sampled under P: an estimate of
// Q[F_n 1_{g<n}]. Throws std::invalid_argument for count == 0, n < 0 or
// zero streams.
MCEstimate estimate_q_functional(const PathSampler& sampler, const PathFunctional& weight, int n,
                                 const PathFunctional& functional, std::uint64_t count, std::uint64_t seed,
                                 const MCOptions& options = {});

// Random-walk scaling of Brownian motion: m steps per unit time, step 1/sqrt(m).
struct ScalingSpec {
  double t = 1.0;
  int steps_per_unit = 1;

  // round(t * m); throws std::invalid_argument for non-positive or
  // non-finite t, m < 1, or a horizon that rounds to 0.
  int horizon() const;
};

struct ScalingProbe {
  MCEstimate estimate;    // of E|W_H| / sqrt(m)
  int horizon = 0;
  double target = 0.0;         // E|B_t| = sqrt(2t/pi)
  double discrete_mean = 0.0;  // exact E|W_H| / sqrt(m)
  double discretization_bias = 0.0;  // discrete_mean - target
  double z_score = 0.0;              // (estimate - target) / standard_error; 0 if the error is 0
};

ScalingProbe estimate_q_g_tail(const ScalingSpec& scaling, std::uint64_t count, std::uint64_t seed,
                               const MCOptions& options = {});

// Exact E|S_n| for the simple symmetric walk, by summing the binomial law.
double mean_abs_walk(int steps);

}  // namespace sigmalab
