#include "sigmalab/pathspace.hpp"

#include <atomic>
#include <limits>
#include <stdexcept>
#include <string>

namespace sigmalab {

namespace {

std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

constexpr int kMaxBinaryHorizon = 24;

void check_depth(const PathSpace& space, int n, int max_depth, const char* what) {
  if (n < 0 || n > max_depth) {
    throw std::out_of_range(std::string(what) + ": depth " + std::to_string(n) + " outside [0, " +
                            std::to_string(max_depth) + "] for horizon " + std::to_string(space.horizon()));
  }
}

void check_same_space(const PathSpace& a, const PathSpace& b) {
  if (a.id() != b.id()) throw std::invalid_argument("processes live on different path spaces");
}

}  // namespace

// --- PathSpace --------------------------------------------------------------

SpacePtr PathSpace::from_branching(const Branching& branching) {
  if (branching.empty()) throw std::invalid_argument("horizon must be at least 1");

  std::shared_ptr<PathSpace> space(new PathSpace());
  space->id_ = next_space_id();
  space->horizon_ = static_cast<int>(branching.size());
  space->level_offsets_.push_back(0);

  Node root;
  root.edge_prob = 1;
  root.prob = 1;
  space->nodes_.push_back(std::move(root));
  space->level_offsets_.push_back(1);

  for (int d = 0; d < space->horizon_; ++d) {
    const auto& level = branching[static_cast<std::size_t>(d)];
    const std::size_t first = space->level_offsets_[static_cast<std::size_t>(d)];
    const std::size_t count = space->level_offsets_[static_cast<std::size_t>(d) + 1] - first;
    if (level.size() != count) {
      throw std::invalid_argument("depth " + std::to_string(d) + " has " + std::to_string(count) +
                                  " nodes but branching lists " + std::to_string(level.size()));
    }
    for (std::size_t k = 0; k < count; ++k) {
      const auto& probs = level[k];
      if (probs.empty()) {
        throw std::invalid_argument("node " + std::to_string(k) + " at depth " + std::to_string(d) +
                                    " has no children before the horizon");
      }
      Rational sum = 0;
      for (const auto& p : probs) {
        if (sgn(p) <= 0) {
          throw std::invalid_argument("non-positive transition probability " + to_string(p) + " at depth " +
                                      std::to_string(d) + ", node " + std::to_string(k));
        }
        sum += p;
      }
      if (sum != 1) {
        throw std::invalid_argument("transition probabilities at depth " + std::to_string(d) + ", node " +
                                    std::to_string(k) + " sum to " + to_string(sum) + ", not 1");
      }
      if (space->nodes_.size() + probs.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("path space too large");
      }
      const std::size_t parent_index = first + k;
      space->nodes_[parent_index].first_child = static_cast<std::uint32_t>(space->nodes_.size());
      space->nodes_[parent_index].child_count = static_cast<std::uint32_t>(probs.size());
      for (std::size_t c = 0; c < probs.size(); ++c) {
        Node child;
        child.parent = static_cast<std::uint32_t>(parent_index);
        child.child_rank = static_cast<std::uint32_t>(c);
        child.depth = d + 1;
        child.edge_prob = probs[c];
        child.prob = space->nodes_[parent_index].prob * probs[c];
        space->nodes_.push_back(std::move(child));
      }
    }
    space->level_offsets_.push_back(space->nodes_.size());
  }

  // Leaf ranges, bottom-up. Children are contiguous and ordered, so each
  // node's leaves run from its first child's first leaf to its last child's last.
  const std::size_t leaf_start = space->level_offsets_[static_cast<std::size_t>(space->horizon_)];
  for (std::size_t i = space->nodes_.size(); i-- > 0;) {
    Node& n = space->nodes_[i];
    if (i >= leaf_start) {
      n.leaf_begin = static_cast<std::uint32_t>(i - leaf_start);
      n.leaf_end = n.leaf_begin + 1;
    } else {
      n.leaf_begin = space->nodes_[n.first_child].leaf_begin;
      n.leaf_end = space->nodes_[n.first_child + n.child_count - 1].leaf_end;
    }
  }
  return space;
}

SpacePtr PathSpace::fair_binary(int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (horizon > kMaxBinaryHorizon) {
    throw std::length_error("binary horizon " + std::to_string(horizon) + " exceeds " +
                            std::to_string(kMaxBinaryHorizon));
  }
  const Rational half(1, 2);
  Branching branching;
  std::size_t width = 1;
  for (int d = 0; d < horizon; ++d) {
    branching.emplace_back(width, std::vector<Rational>{half, half});
    width *= 2;
  }
  return from_branching(branching);
}

std::size_t PathSpace::level_size(int depth) const {
  check_depth(*this, depth, horizon_, "level_size");
  return level_offsets_[static_cast<std::size_t>(depth) + 1] - level_offsets_[static_cast<std::size_t>(depth)];
}

std::size_t PathSpace::level_offset(int depth) const {
  check_depth(*this, depth, horizon_, "level_offset");
  return level_offsets_[static_cast<std::size_t>(depth)];
}

const PathSpace::Node& PathSpace::node(NodeId id) const {
  if (!contains(id)) throw std::invalid_argument("node does not belong to this path space");
  return nodes_[id.index];
}

int PathSpace::depth(NodeId id) const { return node(id).depth; }
const Rational& PathSpace::prob(NodeId id) const { return node(id).prob; }
const Rational& PathSpace::edge_prob(NodeId id) const { return node(id).edge_prob; }

std::optional<NodeId> PathSpace::parent(NodeId id) const {
  if (node(id).depth == 0) return std::nullopt;
  return NodeId{id_, nodes_[id.index].parent};
}

std::size_t PathSpace::child_count(NodeId id) const { return node(id).child_count; }

NodeId PathSpace::child(NodeId id, std::size_t k) const {
  const Node& n = node(id);
  if (k >= n.child_count) throw std::out_of_range("child rank out of range");
  return {id_, static_cast<std::uint32_t>(n.first_child + k)};
}

std::vector<NodeId> PathSpace::children(NodeId id) const {
  const Node& n = node(id);
  std::vector<NodeId> out;
  out.reserve(n.child_count);
  for (std::uint32_t c = 0; c < n.child_count; ++c) out.push_back({id_, n.first_child + c});
  return out;
}

NodeId PathSpace::ancestor(NodeId id, int target_depth) const {
  const Node* n = &node(id);
  if (target_depth < 0 || target_depth > n->depth) throw std::out_of_range("ancestor depth out of range");
  std::uint32_t index = id.index;
  while (n->depth > target_depth) {
    index = n->parent;
    n = &nodes_[index];
  }
  return {id_, index};
}

std::size_t PathSpace::child_rank(NodeId id) const { return node(id).child_rank; }

std::vector<int> PathSpace::path_of(NodeId id) const {
  std::vector<int> path(static_cast<std::size_t>(node(id).depth));
  std::uint32_t index = id.index;
  for (std::size_t i = path.size(); i-- > 0;) {
    path[i] = static_cast<int>(nodes_[index].child_rank);
    index = nodes_[index].parent;
  }
  return path;
}

NodeId PathSpace::node_at_path(std::span<const int> path) const {
  NodeId current = root();
  for (int rank : path) {
    if (rank < 0) throw std::out_of_range("negative child rank in path");
    current = child(current, static_cast<std::size_t>(rank));
  }
  return current;
}

std::size_t PathSpace::level_index(NodeId id) const {
  return id.index - level_offsets_[static_cast<std::size_t>(node(id).depth)];
}

NodeId PathSpace::at_level(int depth, std::size_t k) const {
  if (k >= level_size(depth)) throw std::out_of_range("atom index out of range");
  return {id_, static_cast<std::uint32_t>(level_offsets_[static_cast<std::size_t>(depth)] + k)};
}

std::pair<std::size_t, std::size_t> PathSpace::leaves_below(NodeId id) const {
  const Node& n = node(id);
  return {n.leaf_begin, n.leaf_end};
}

// --- AdaptedProcess -----------------------------------------------------------

AdaptedProcess::AdaptedProcess(SpacePtr space, std::vector<Rational> values)
    : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("null path space");
  if (values.size() != space_->node_count()) {
    throw std::invalid_argument("process has " + std::to_string(values.size()) + " values for " +
                                std::to_string(space_->node_count()) + " nodes");
  }
  values_ = std::make_shared<const std::vector<Rational>>(std::move(values));
}

AdaptedProcess AdaptedProcess::constant(SpacePtr space, const Rational& value) {
  const std::size_t n = space->node_count();
  return AdaptedProcess(std::move(space), std::vector<Rational>(n, value));
}

AdaptedProcess AdaptedProcess::from_function(SpacePtr space, const std::function<Rational(NodeId)>& fn) {
  std::vector<Rational> values;
  values.reserve(space->node_count());
  for (std::uint32_t i = 0; i < space->node_count(); ++i) values.push_back(fn(NodeId{space->id(), i}));
  return AdaptedProcess(std::move(space), std::move(values));
}

const Rational& AdaptedProcess::operator[](NodeId node) const {
  if (!space_->contains(node)) throw std::invalid_argument("node does not belong to the process's space");
  return (*values_)[node.index];
}

std::span<const Rational> AdaptedProcess::level(int depth) const {
  const std::size_t first = space_->level_offset(depth);
  return std::span<const Rational>(*values_).subspan(first, space_->level_size(depth));
}

AdaptedProcess operator+(const AdaptedProcess& a, const AdaptedProcess& b) {
  check_same_space(a.space(), b.space());
  std::vector<Rational> out(a.values_->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*a.values_)[i] + (*b.values_)[i];
  return AdaptedProcess(a.space_, std::move(out));
}

AdaptedProcess operator-(const AdaptedProcess& a, const AdaptedProcess& b) {
  check_same_space(a.space(), b.space());
  std::vector<Rational> out(a.values_->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*a.values_)[i] - (*b.values_)[i];
  return AdaptedProcess(a.space_, std::move(out));
}

AdaptedProcess AdaptedProcess::operator-() const {
  std::vector<Rational> out(values_->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -(*values_)[i];
  return AdaptedProcess(space_, std::move(out));
}

bool operator==(const AdaptedProcess& a, const AdaptedProcess& b) {
  return a.space_->id() == b.space_->id() && *a.values_ == *b.values_;
}

// --- PathMeasure --------------------------------------------------------------

PathMeasure::PathMeasure(SpacePtr space, std::vector<Rational> leaf_weights)
    : space_(std::move(space)), weights_(std::move(leaf_weights)) {
  if (!space_) throw std::invalid_argument("null path space");
  if (weights_.size() != space_->leaf_count()) {
    throw std::invalid_argument("measure has " + std::to_string(weights_.size()) + " weights for " +
                                std::to_string(space_->leaf_count()) + " leaves");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (sgn(weights_[i]) < 0) {
      throw std::invalid_argument("negative weight " + to_string(weights_[i]) + " on leaf " + std::to_string(i));
    }
  }
}

PathMeasure PathMeasure::probability(SpacePtr space) {
  std::vector<Rational> weights;
  weights.reserve(space->leaf_count());
  for (std::size_t i = 0; i < space->leaf_count(); ++i) weights.push_back(space->prob(space->leaf(i)));
  return PathMeasure(std::move(space), std::move(weights));
}

PathMeasure PathMeasure::zero(SpacePtr space) {
  const std::size_t n = space->leaf_count();
  return PathMeasure(std::move(space), std::vector<Rational>(n));
}

Rational PathMeasure::mass(NodeId atom) const {
  const auto [first, last] = space_->leaves_below(atom);
  Rational sum = 0;
  for (std::size_t i = first; i < last; ++i) sum += weights_[i];
  return sum;
}

Rational PathMeasure::mass(std::span<const NodeId> atoms) const {
  Rational sum = 0;
  for (NodeId a : atoms) sum += mass(a);
  return sum;
}

Rational PathMeasure::total() const {
  Rational sum = 0;
  for (const auto& w : weights_) sum += w;
  return sum;
}

bool operator==(const PathMeasure& a, const PathMeasure& b) {
  return a.space_->id() == b.space_->id() && a.weights_ == b.weights_;
}

// --- free functions -------------------------------------------------------------

SpacePtr build_space(const ProcessSpec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (spec.kind == ProcessKind::kCustom && spec.edge_probs) {
    if (static_cast<int>(spec.edge_probs->size()) != spec.horizon) {
      throw std::invalid_argument("edge_probs lists " + std::to_string(spec.edge_probs->size()) +
                                  " levels for horizon " + std::to_string(spec.horizon));
    }
    return PathSpace::from_branching(*spec.edge_probs);
  }
  return PathSpace::fair_binary(spec.horizon);
}

std::vector<NodeId> atoms(const PathSpace& space, int n) {
  check_depth(space, n, space.horizon(), "atoms");
  std::vector<NodeId> out;
  out.reserve(space.level_size(n));
  for (std::size_t k = 0; k < space.level_size(n); ++k) out.push_back(space.at_level(n, k));
  return out;
}

Rational prob(const PathSpace& space, NodeId node) { return space.prob(node); }

std::vector<Rational> cond_exp(const AdaptedProcess& proc, int n) {
  const PathSpace& space = proc.space();
  check_depth(space, n, space.horizon() - 1, "cond_exp");
  std::vector<Rational> out;
  out.reserve(space.level_size(n));
  for (std::size_t k = 0; k < space.level_size(n); ++k) {
    const NodeId v = space.at_level(n, k);
    Rational sum = 0;
    for (std::size_t c = 0; c < space.child_count(v); ++c) {
      const NodeId child = space.child(v, c);
      sum += space.edge_prob(child) * proc[child];
    }
    out.push_back(std::move(sum));
  }
  return out;
}

std::vector<Rational> cond_exp(const AdaptedProcess& proc, int n, int m) {
  const PathSpace& space = proc.space();
  check_depth(space, n, space.horizon(), "cond_exp");
  check_depth(space, m, n, "cond_exp");
  auto values = std::vector<Rational>(proc.level(n).begin(), proc.level(n).end());
  for (int d = n - 1; d >= m; --d) {
    std::vector<Rational> up(space.level_size(d));
    for (std::size_t k = 0; k < up.size(); ++k) {
      const NodeId v = space.at_level(d, k);
      for (std::size_t c = 0; c < space.child_count(v); ++c) {
        const NodeId child = space.child(v, c);
        up[k] += space.edge_prob(child) * values[space.level_index(child)];
      }
    }
    values = std::move(up);
  }
  return values;
}

Rational expect(const AdaptedProcess& proc, int n) {
  const PathSpace& space = proc.space();
  check_depth(space, n, space.horizon(), "expect");
  Rational sum = 0;
  for (std::size_t k = 0; k < space.level_size(n); ++k) {
    const NodeId v = space.at_level(n, k);
    sum += space.prob(v) * proc[v];
  }
  return sum;
}

Rational expect(const AdaptedProcess& proc, int n, const PathMeasure& mu) {
  const PathSpace& space = proc.space();
  check_same_space(space, mu.space());
  check_depth(space, n, space.horizon(), "expect");
  Rational sum = 0;
  for (std::size_t k = 0; k < space.level_size(n); ++k) {
    const NodeId v = space.at_level(n, k);
    sum += mu.mass(v) * proc[v];
  }
  return sum;
}

bool is_predictable(const AdaptedProcess& proc) {
  const PathSpace& space = proc.space();
  for (int d = 0; d < space.horizon(); ++d) {
    for (std::size_t k = 0; k < space.level_size(d); ++k) {
      const NodeId v = space.at_level(d, k);
      const Rational& first = proc[space.child(v, 0)];
      for (std::size_t c = 1; c < space.child_count(v); ++c) {
        if (proc[space.child(v, c)] != first) return false;
      }
    }
  }
  return true;
}

}  // namespace sigmalab
