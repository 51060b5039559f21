#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nofinetune/ci_statement.hpp"

namespace nft {

enum class NodeKind { observed, latent };

struct NodeId {
  std::string name;
  NodeKind kind = NodeKind::observed;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// Bit i set <=> node with index i is a member.
using NodeMask = std::uint64_t;

inline constexpr NodeMask bit(std::size_t i) { return NodeMask{1} << i; }

using Edge = std::pair<std::string, std::string>;

/// Immutable directed acyclic graph over at most 64 named nodes. Node indices
/// follow insertion order.
class Dag {
 public:
  static constexpr std::size_t kMaxNodes = 64;

  Dag() = default;

  /// Validates and builds the graph. Throws DuplicateNodeError,
  /// UnknownNodeError (edge endpoint not declared), DuplicateEdgeError, or
  /// CycleError (self-loops included).
  Dag(std::vector<NodeId> nodes, std::span<const Edge> edges);

  /// Index-based construction used by enumerators; same validation.
  Dag(std::vector<NodeId> nodes, std::vector<NodeMask> parents);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node(std::size_t i) const { return nodes_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws UnknownNodeError.
  std::size_t index_of(std::string_view name) const;

  NodeMask parents(std::size_t i) const { return parents_[i]; }
  NodeMask children(std::size_t i) const { return children_[i]; }
  bool has_edge(std::size_t from, std::size_t to) const {
    return (parents_[to] & bit(from)) != 0;
  }
  std::size_t edge_count() const;

  /// Edges as (parent, child) index pairs ordered by parent then child.
  std::vector<std::pair<std::size_t, std::size_t>> edge_indices() const;
  std::vector<Edge> edges() const;

  NodeMask all_nodes() const;
  NodeMask observed_nodes() const;
  NodeMask latent_nodes() const;

  /// Throws UnknownNodeError.
  NodeMask mask_of(std::span<const std::string> names) const;
  /// Names of the members, sorted lexicographically.
  std::vector<std::string> names_of(NodeMask mask) const;

  /// Parents-first order, ties broken by index.
  std::vector<std::size_t> topological_order() const;

  /// Returns a copy with one more edge. Throws like the constructor.
  Dag with_edge(std::size_t from, std::size_t to) const;

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.nodes_ == b.nodes_ && a.parents_ == b.parents_;
  }

 private:
  void validate_acyclic() const;

  std::vector<NodeId> nodes_;
  std::vector<NodeMask> parents_;
  std::vector<NodeMask> children_;
};

Dag build_dag(std::vector<NodeId> nodes, const std::vector<Edge>& edges);

/// Pa, An, De and Nd for every node, indexed like the graph.
struct Genealogy {
  std::vector<NodeMask> parents;
  std::vector<NodeMask> ancestors;
  std::vector<NodeMask> descendants;
  std::vector<NodeMask> non_descendants;
};

Genealogy genealogy(const Dag& g);

/// Ancestors of the members of `mask`, members included.
NodeMask ancestral_closure(const Dag& g, NodeMask mask);

/// d-separation of s1 and s2 given z, decided by reachability with
/// collider bookkeeping. Throws DisjointnessError when the sets overlap or
/// s1/s2 is empty.
bool d_separated(const Dag& g, NodeMask s1, NodeMask s2, NodeMask z);

bool d_separated(const Dag& g, const std::vector<std::string>& s1,
                 const std::vector<std::string>& s2,
                 const std::vector<std::string>& z);

bool d_separated(const Dag& g, const CIStatement& ci);

/// Every canonical triple over `observed` (names) that is a d-separation in
/// g, sorted canonically. Latent nodes may still lie on paths.
std::vector<CIStatement> all_d_separations(const Dag& g,
                                           const std::vector<std::string>& observed);

}  // namespace nft
