#include "sigmalab/montecarlo.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sigmalab/gallery.hpp"
#include "sigmalab/parallel.hpp"

namespace sigmalab {

namespace {

// Running mean and centered sum of squares (Welford), mergeable (Chan et al.).
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.n) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
  }
};

MCEstimate finish(const Moments& m, std::uint64_t seed) {
  MCEstimate out;
  out.estimate = m.mean;
  out.count = m.n;
  out.seed = seed;
  if (m.n > 1) {
    const double variance = std::max(0.0, m.m2 / static_cast<double>(m.n - 1));
    out.standard_error = std::sqrt(variance / static_cast<double>(m.n));
  }
  return out;
}

std::uint64_t stream_share(std::uint64_t count, std::uint32_t streams, std::uint32_t stream) {
  return count / streams + (stream < count % streams ? 1 : 0);
}

// Runs `body(rng, samples, moments)` per stream and merges in stream order.
template <typename Body>
Moments run_streams(std::uint64_t count, std::uint64_t seed, const MCOptions& options, const Body& body) {
  if (count == 0) throw std::invalid_argument("sample count must be at least 1");
  if (options.streams == 0) throw std::invalid_argument("stream count must be at least 1");
  std::vector<Moments> partial(options.streams);
  const unsigned threads = options.threads == 0 ? worker_count() : options.threads;
  parallel_for(options.streams, threads, [&](std::size_t s) {
    Rng rng(derive_stream_seed(seed, s));
    const auto samples = stream_share(count, options.streams, static_cast<std::uint32_t>(s));
    body(rng, samples, partial[s]);
  });
  Moments total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PathSampler fair_coin_sampler() {
  return [](Rng& rng, int n, std::vector<int>& path) {
    path.resize(static_cast<std::size_t>(n));
    std::uint64_t bits = 0;
    for (int i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      path[static_cast<std::size_t>(i)] = static_cast<int>(bits & 1U);
      bits >>= 1;
    }
  };
}

PathSampler tree_sampler(SpacePtr space) {
  // Cumulative child probabilities per internal node, as doubles.
  auto cumulative = std::make_shared<std::vector<std::vector<double>>>(space->node_count());
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    const NodeId v{space->id(), i};
    if (space->depth(v) == space->horizon()) continue;
    double acc = 0.0;
    for (std::size_t c = 0; c < space->child_count(v); ++c) {
      acc += to_double(space->edge_prob(space->child(v, c)));
      (*cumulative)[i].push_back(acc);
    }
  }
  return [space = std::move(space), cumulative](Rng& rng, int n, std::vector<int>& path) {
    if (n > space->horizon()) throw std::out_of_range("path longer than the tree horizon");
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    path.resize(static_cast<std::size_t>(n));
    NodeId v = space->root();
    for (int d = 0; d < n; ++d) {
      const auto& cdf = (*cumulative)[v.index];
      const double u = uniform(rng);
      std::size_t c = 0;
      while (c + 1 < cdf.size() && u >= cdf[c]) ++c;
      path[static_cast<std::size_t>(d)] = static_cast<int>(c);
      v = space->child(v, c);
    }
  };
}

PathFunctional gallery_functional(ProcessKind kind) {
  if (kind == ProcessKind::kCustom) throw std::invalid_argument("custom processes have no path formula");
  return [kind](std::span<const int> path) { return static_cast<double>(gallery_value(kind, path)); };
}

PathFunctional process_functional(const AdaptedProcess& x) {
  return [x](std::span<const int> path) { return to_double(x[x.space().node_at_path(path)]); };
}

PathFunctional constant_functional(double value) {
  return [value](std::span<const int>) { return value; };
}

MCEstimate estimate_q_functional(const PathSampler& sampler, const PathFunctional& weight, int n,
                                 const PathFunctional& functional, std::uint64_t count, std::uint64_t seed,
                                 const MCOptions& options) {
  if (n < 0) throw std::invalid_argument("time index must be nonnegative");
  const Moments m = run_streams(count, seed, options, [&](Rng& rng, std::uint64_t samples, Moments& acc) {
    std::vector<int> path;
    for (std::uint64_t i = 0; i < samples; ++i) {
      sampler(rng, n, path);
      const double f = functional(path);
      acc.add(f == 0.0 ? 0.0 : f * weight(path));
    }
  });
  return finish(m, seed);
}

int ScalingSpec::horizon() const {
  if (!std::isfinite(t) || t <= 0.0) throw std::invalid_argument("scaling time t must be positive and finite");
  if (steps_per_unit < 1) throw std::invalid_argument("steps per unit time must be at least 1");
  const double steps = std::round(t * steps_per_unit);
  if (steps < 1.0) throw std::invalid_argument("t * m rounds to zero steps");
  if (steps > 1e9) throw std::invalid_argument("t * m is too large");
  return static_cast<int>(steps);
}

ScalingProbe estimate_q_g_tail(const ScalingSpec& scaling, std::uint64_t count, std::uint64_t seed,
                               const MCOptions& options) {
  ScalingProbe probe;
  probe.horizon = scaling.horizon();
  const double scale = 1.0 / std::sqrt(static_cast<double>(scaling.steps_per_unit));
  const int steps = probe.horizon;

  const Moments m = run_streams(count, seed, options, [&](Rng& rng, std::uint64_t samples, Moments& acc) {
    for (std::uint64_t i = 0; i < samples; ++i) {
      int ups = 0;
      int remaining = steps;
      while (remaining >= 64) {
        ups += std::popcount(rng());
        remaining -= 64;
      }
      if (remaining > 0) ups += std::popcount(rng() >> (64 - remaining));
      acc.add(std::abs(2 * ups - steps) * scale);
    }
  });

  probe.estimate = finish(m, seed);
  probe.target = std::sqrt(2.0 * scaling.t / std::numbers::pi);
  probe.discrete_mean = mean_abs_walk(steps) * scale;
  probe.discretization_bias = probe.discrete_mean - probe.target;
  if (probe.estimate.standard_error > 0.0) {
    probe.z_score = (probe.estimate.estimate - probe.target) / probe.estimate.standard_error;
  }
  return probe;
}

double mean_abs_walk(int steps) {
  if (steps < 0) throw std::invalid_argument("negative step count");
  const long double n = steps;
  const long double log_half_n = n * std::log(0.5L);
  long double sum = 0.0L;
  for (int k = 0; k <= steps; ++k) {
    const int distance = std::abs(2 * k - steps);
    if (distance == 0) continue;
    const long double log_choose = std::lgamma(n + 1) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1);
    sum += distance * std::exp(log_choose + log_half_n);
  }
  return static_cast<double>(sum);
}

}  // namespace sigmalab
