#include "sigmalab/randomtimes.hpp"

#include <stdexcept>

namespace sigmalab {

namespace {

// Nodes on the root-to-leaf path, indexed by depth.
void fill_chain(const PathSpace& space, NodeId leaf, std::vector<NodeId>& chain) {
  chain.resize(static_cast<std::size_t>(space.horizon()) + 1);
  NodeId v = leaf;
  for (int d = space.horizon(); d > 0; --d) {
    chain[static_cast<std::size_t>(d)] = v;
    v = *space.parent(v);
  }
  chain[0] = v;
}

}  // namespace

RandomTime::RandomTime(SpacePtr space, std::vector<Value> per_leaf)
    : space_(std::move(space)), values_(std::move(per_leaf)) {
  if (!space_) throw std::invalid_argument("null path space");
  if (values_.size() != space_->leaf_count()) {
    throw std::invalid_argument("random time has " + std::to_string(values_.size()) + " values for " +
                                std::to_string(space_->leaf_count()) + " leaves");
  }
  for (const auto& v : values_) {
    if (v && (*v < 0 || *v > space_->horizon())) {
      throw std::invalid_argument("random time value " + std::to_string(*v) + " outside [0, horizon]");
    }
  }
}

RandomTime RandomTime::never(SpacePtr space) {
  const std::size_t n = space->leaf_count();
  return RandomTime(std::move(space), std::vector<Value>(n));
}

RandomTime RandomTime::constant(SpacePtr space, int value) {
  const std::size_t n = space->leaf_count();
  return RandomTime(std::move(space), std::vector<Value>(n, value));
}

bool is_stopping_time(const RandomTime& tau) {
  const PathSpace& space = tau.space();
  for (int n = 0; n <= space.horizon(); ++n) {
    for (std::size_t k = 0; k < space.level_size(n); ++k) {
      const auto [first, last] = space.leaves_below(space.at_level(n, k));
      const bool hit = tau.at_leaf(first) == n;
      for (std::size_t i = first + 1; i < last; ++i) {
        if ((tau.at_leaf(i) == n) != hit) return false;
      }
    }
  }
  return true;
}

RandomTime first_zero_after(const AdaptedProcess& x, int n) {
  const PathSpace& space = x.space();
  if (n < 0 || n >= space.horizon()) {
    throw std::out_of_range("first_zero_after: time " + std::to_string(n) + " outside [0, " +
                            std::to_string(space.horizon() - 1) + "]");
  }
  std::vector<RandomTime::Value> out(space.leaf_count());
  std::vector<NodeId> chain;
  for (std::size_t i = 0; i < out.size(); ++i) {
    fill_chain(space, space.leaf(i), chain);
    for (int p = n + 1; p <= space.horizon(); ++p) {
      if (sgn(x[chain[static_cast<std::size_t>(p)]]) == 0) {
        out[i] = p;
        break;
      }
    }
  }
  return RandomTime(x.space_ptr(), std::move(out));
}

RandomTime last_zero(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  std::vector<RandomTime::Value> out(space.leaf_count());
  std::vector<NodeId> chain;
  for (std::size_t i = 0; i < out.size(); ++i) {
    fill_chain(space, space.leaf(i), chain);
    for (int p = space.horizon(); p >= 0; --p) {
      if (sgn(x[chain[static_cast<std::size_t>(p)]]) == 0) {
        out[i] = p;
        break;
      }
    }
  }
  return RandomTime(x.space_ptr(), std::move(out));
}

std::vector<bool> last_zero_before(const RandomTime& g, int n) {
  std::vector<bool> out(g.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = !g.at_leaf(i) || *g.at_leaf(i) < n;
  return out;
}

std::vector<bool> last_zero_at_most(const RandomTime& g, int n) {
  std::vector<bool> out(g.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = !g.at_leaf(i) || *g.at_leaf(i) <= n;
  return out;
}

AdaptedProcess stop_process(const AdaptedProcess& x, const RandomTime& tau) {
  const PathSpace& space = x.space();
  if (tau.space().id() != space.id()) throw std::invalid_argument("random time belongs to another space");
  if (!is_stopping_time(tau)) throw std::invalid_argument("stop_process: random time is not a stopping time");
  std::vector<Rational> out(space.node_count());
  for (std::uint32_t i = 0; i < space.node_count(); ++i) {
    const NodeId v{space.id(), i};
    const int depth = space.depth(v);
    // Stopped before this depth is decided at the stopping depth, so every
    // leaf below agrees and the first one is representative.
    const auto& t = tau.at_leaf(space.leaves_below(v).first);
    out[i] = (t && *t < depth) ? x[space.ancestor(v, *t)] : x[v];
  }
  return AdaptedProcess(x.space_ptr(), std::move(out));
}

std::string format_time(const RandomTime::Value& value) { return value ? std::to_string(*value) : "never"; }

}  // namespace sigmalab
