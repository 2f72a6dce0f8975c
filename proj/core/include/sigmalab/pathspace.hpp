#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sigmalab/process_spec.hpp"
#include "sigmalab/rational.hpp"

namespace sigmalab {

// Handle to a node of a particular PathSpace. The space tag lets every
// accessor reject nodes that belong to another space.
struct NodeId {
  std::uint64_t space = 0;
  std::uint32_t index = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Finite filtered probability space given as an event tree of depth H.
//
// Nodes are stored level by level, left to right, so the atoms of F_n are a
// contiguous block and the leaves below any node form a contiguous range of
// leaf ordinals. Immutable once built; share it through shared_ptr.
class PathSpace {
 public:
  // branching[d][k] = child transition probabilities of the k-th depth-d node.
  // branching.size() is the horizon.
  using Branching = std::vector<std::vector<std::vector<Rational>>>;

  static std::shared_ptr<const PathSpace> from_branching(const Branching& branching);
  static std::shared_ptr<const PathSpace> fair_binary(int horizon);

  int horizon() const { return horizon_; }
  std::uint64_t id() const { return id_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const { return level_size(horizon_); }
  std::size_t level_size(int depth) const;

  NodeId root() const { return {id_, 0}; }
  bool contains(NodeId node) const { return node.space == id_ && node.index < nodes_.size(); }

  int depth(NodeId node) const;
  const Rational& prob(NodeId node) const;
  const Rational& edge_prob(NodeId node) const;
  std::optional<NodeId> parent(NodeId node) const;
  std::size_t child_count(NodeId node) const;
  NodeId child(NodeId node, std::size_t k) const;
  std::vector<NodeId> children(NodeId node) const;
  NodeId ancestor(NodeId node, int depth) const;
  // Position of the node among its siblings; 0 for the root.
  std::size_t child_rank(NodeId node) const;
  // Child ranks along the root-to-node path.
  std::vector<int> path_of(NodeId node) const;
  NodeId node_at_path(std::span<const int> path) const;

  // Position of the node inside its level (its atom index).
  std::size_t level_index(NodeId node) const;
  NodeId at_level(int depth, std::size_t k) const;

  // Leaf ordinals [first, last) below the node.
  std::pair<std::size_t, std::size_t> leaves_below(NodeId node) const;
  NodeId leaf(std::size_t ordinal) const { return at_level(horizon_, ordinal); }

  // Dense index helpers for per-node storage.
  std::size_t level_offset(int depth) const;

 private:
  struct Node {
    std::uint32_t parent = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    std::uint32_t child_rank = 0;
    std::uint32_t leaf_begin = 0;
    std::uint32_t leaf_end = 0;
    int depth = 0;
    Rational edge_prob;
    Rational prob;
  };

  PathSpace() = default;
  const Node& node(NodeId id) const;

  std::uint64_t id_ = 0;
  int horizon_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::size_t> level_offsets_;
};

using SpacePtr = std::shared_ptr<const PathSpace>;

// Rational value attached to every node of a space. Copies share storage.
class AdaptedProcess {
 public:
  AdaptedProcess(SpacePtr space, std::vector<Rational> values);

  static AdaptedProcess constant(SpacePtr space, const Rational& value);
  static AdaptedProcess from_function(SpacePtr space, const std::function<Rational(NodeId)>& fn);

  const PathSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  const Rational& operator[](NodeId node) const;
  std::span<const Rational> values() const { return *values_; }
  // Values of the depth-n nodes, left to right.
  std::span<const Rational> level(int depth) const;

  friend AdaptedProcess operator+(const AdaptedProcess& a, const AdaptedProcess& b);
  friend AdaptedProcess operator-(const AdaptedProcess& a, const AdaptedProcess& b);
  AdaptedProcess operator-() const;
  friend bool operator==(const AdaptedProcess& a, const AdaptedProcess& b);

 private:
  SpacePtr space_;
  std::shared_ptr<const std::vector<Rational>> values_;
};

// Nonnegative weight per leaf. Masses of F_n events are sums over the
// leaves below their atoms.
class PathMeasure {
 public:
  PathMeasure(SpacePtr space, std::vector<Rational> leaf_weights);

  // The reference probability P: leaf weight = product of edge probabilities.
  static PathMeasure probability(SpacePtr space);
  static PathMeasure zero(SpacePtr space);

  const PathSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const Rational> weights() const { return weights_; }
  const Rational& weight(std::size_t leaf_ordinal) const { return weights_.at(leaf_ordinal); }

  Rational mass(NodeId atom) const;
  Rational mass(std::span<const NodeId> atoms) const;
  Rational total() const;

  friend bool operator==(const PathMeasure& a, const PathMeasure& b);

 private:
  SpacePtr space_;
  std::vector<Rational> weights_;
};

// Builds the tree a spec describes: the fair binary tree for gallery kinds
// and for custom specs without edge_probs.
SpacePtr build_space(const ProcessSpec& spec);

// Depth-n nodes, left to right.
std::vector<NodeId> atoms(const PathSpace& space, int n);
Rational prob(const PathSpace& space, NodeId node);

// E[proc_{n+1} | F_n] at each depth-n node, left to right.
std::vector<Rational> cond_exp(const AdaptedProcess& proc, int n);
// E[proc_n | F_m] at each depth-m node, for m <= n.
std::vector<Rational> cond_exp(const AdaptedProcess& proc, int n, int m);

// E_P[proc_n].
Rational expect(const AdaptedProcess& proc, int n);
// Integral of proc_n against an arbitrary path measure.
Rational expect(const AdaptedProcess& proc, int n, const PathMeasure& mu);

// True iff siblings always carry equal values (value at depth n is F_{n-1}-measurable).
bool is_predictable(const AdaptedProcess& proc);

}  // namespace sigmalab
