#include "nofinetune/dag.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "nofinetune/error.hpp"

namespace nft {

namespace {

std::size_t lowest(NodeMask m) { return static_cast<std::size_t>(std::countr_zero(m)); }

void check_names(const std::vector<NodeId>& nodes) {
  if (nodes.size() > Dag::kMaxNodes) {
    throw std::invalid_argument("graph exceeds 64 nodes");
  }
  std::unordered_set<std::string> names;
  for (const auto& n : nodes) {
    if (!names.insert(n.name).second) {
      throw DuplicateNodeError("duplicate node '" + n.name + "'");
    }
  }
}

}  // namespace

Dag::Dag(std::vector<NodeId> nodes, std::span<const Edge> edges)
    : nodes_(std::move(nodes)) {
  check_names(nodes_);
  parents_.assign(nodes_.size(), 0);
  children_.assign(nodes_.size(), 0);
  for (const auto& [from, to] : edges) {
    const std::size_t u = index_of(from);
    const std::size_t v = index_of(to);
    if (u == v) throw CycleError("self-loop on '" + from + "'");
    if (parents_[v] & bit(u)) {
      throw DuplicateEdgeError("duplicate edge " + from + " -> " + to);
    }
    parents_[v] |= bit(u);
    children_[u] |= bit(v);
  }
  validate_acyclic();
}

Dag::Dag(std::vector<NodeId> nodes, std::vector<NodeMask> parents)
    : nodes_(std::move(nodes)), parents_(std::move(parents)) {
  check_names(nodes_);
  if (parents_.size() != nodes_.size()) {
    throw std::invalid_argument("parent list size does not match node count");
  }
  children_.assign(nodes_.size(), 0);
  const NodeMask all = all_nodes();
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (parents_[v] & ~all) throw UnknownNodeError("parent index out of range");
    if (parents_[v] & bit(v)) throw CycleError("self-loop on '" + nodes_[v].name + "'");
    for (NodeMask m = parents_[v]; m; m &= m - 1) children_[lowest(m)] |= bit(v);
  }
  validate_acyclic();
}

void Dag::validate_acyclic() const {
  // Kahn's algorithm; any node left over lies on or behind a cycle.
  NodeMask done = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      if (!(done & bit(v)) && (parents_[v] & ~done) == 0) {
        done |= bit(v);
        progress = true;
      }
    }
  }
  if (done != all_nodes()) {
    throw CycleError("edges contain a directed cycle");
  }
}

std::optional<std::size_t> Dag::find(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Dag::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UnknownNodeError("unknown node '" + std::string(name) + "'");
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (auto p : parents_) n += static_cast<std::size_t>(std::popcount(p));
  return n;
}

std::vector<std::pair<std::size_t, std::size_t>> Dag::edge_indices() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < nodes_.size(); ++u) {
    for (NodeMask m = children_[u]; m; m &= m - 1) out.emplace_back(u, lowest(m));
  }
  return out;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (auto [u, v] : edge_indices()) out.emplace_back(nodes_[u].name, nodes_[v].name);
  return out;
}

NodeMask Dag::all_nodes() const {
  return nodes_.size() == 64 ? ~NodeMask{0} : bit(nodes_.size()) - 1;
}

NodeMask Dag::observed_nodes() const {
  NodeMask m = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == NodeKind::observed) m |= bit(i);
  }
  return m;
}

NodeMask Dag::latent_nodes() const { return all_nodes() & ~observed_nodes(); }

NodeMask Dag::mask_of(std::span<const std::string> names) const {
  NodeMask m = 0;
  for (const auto& n : names) m |= bit(index_of(n));
  return m;
}

std::vector<std::string> Dag::names_of(NodeMask mask) const {
  std::vector<std::string> out;
  for (NodeMask m = mask; m; m &= m - 1) out.push_back(nodes_.at(lowest(m)).name);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Dag::topological_order() const {
  std::vector<std::size_t> order;
  NodeMask done = 0;
  while (order.size() < nodes_.size()) {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      if (!(done & bit(v)) && (parents_[v] & ~done) == 0) {
        order.push_back(v);
        done |= bit(v);
        break;
      }
    }
  }
  return order;
}

Dag Dag::with_edge(std::size_t from, std::size_t to) const {
  if (from >= size() || to >= size()) throw UnknownNodeError("edge endpoint out of range");
  if (has_edge(from, to)) {
    throw DuplicateEdgeError("duplicate edge " + nodes_[from].name + " -> " + nodes_[to].name);
  }
  auto parents = parents_;
  parents[to] |= bit(from);
  return Dag(nodes_, std::move(parents));
}

Dag build_dag(std::vector<NodeId> nodes, const std::vector<Edge>& edges) {
  return Dag(std::move(nodes), std::span<const Edge>(edges));
}

Genealogy genealogy(const Dag& g) {
  const std::size_t n = g.size();
  Genealogy out;
  out.parents.resize(n);
  out.ancestors.assign(n, 0);
  out.descendants.assign(n, 0);
  out.non_descendants.resize(n);
  for (std::size_t v : g.topological_order()) {
    out.parents[v] = g.parents(v);
    for (NodeMask m = g.parents(v); m; m &= m - 1) {
      const std::size_t p = lowest(m);
      out.ancestors[v] |= out.ancestors[p] | bit(p);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (NodeMask m = out.ancestors[v]; m; m &= m - 1) out.descendants[lowest(m)] |= bit(v);
  }
  for (std::size_t v = 0; v < n; ++v) {
    out.non_descendants[v] = g.all_nodes() & ~(out.descendants[v] | bit(v));
  }
  return out;
}

NodeMask ancestral_closure(const Dag& g, NodeMask mask) {
  NodeMask closure = mask;
  NodeMask frontier = mask;
  while (frontier) {
    NodeMask next = 0;
    for (NodeMask m = frontier; m; m &= m - 1) next |= g.parents(lowest(m));
    frontier = next & ~closure;
    closure |= next;
  }
  return closure;
}

bool d_separated(const Dag& g, NodeMask s1, NodeMask s2, NodeMask z) {
  if (s1 == 0 || s2 == 0) throw DisjointnessError("d-separation query needs nonempty sets");
  if ((s1 & s2) || (s1 & z) || (s2 & z)) {
    throw DisjointnessError("d-separation query sets overlap");
  }
  const NodeMask all = g.all_nodes();
  if ((s1 | s2 | z) & ~all) throw UnknownNodeError("query mentions unknown node index");

  // A collider is active iff it is in z or has a descendant in z.
  const NodeMask active_colliders = ancestral_closure(g, z);

  // Traversal states: arrived from a child (moving up) or from a parent
  // (moving down).
  NodeMask up_seen = 0;
  NodeMask down_seen = 0;
  NodeMask up_frontier = s1;
  NodeMask down_frontier = 0;
  NodeMask reached = 0;
  while (up_frontier | down_frontier) {
    NodeMask next_up = 0;
    NodeMask next_down = 0;
    for (NodeMask m = up_frontier & ~up_seen; m; m &= m - 1) {
      const std::size_t v = lowest(m);
      up_seen |= bit(v);
      if (z & bit(v)) continue;
      reached |= bit(v);
      next_up |= g.parents(v);
      next_down |= g.children(v);
    }
    for (NodeMask m = down_frontier & ~down_seen; m; m &= m - 1) {
      const std::size_t v = lowest(m);
      down_seen |= bit(v);
      if (!(z & bit(v))) {
        reached |= bit(v);
        next_down |= g.children(v);
      }
      if (active_colliders & bit(v)) next_up |= g.parents(v);
    }
    up_frontier = next_up & ~up_seen;
    down_frontier = next_down & ~down_seen;
  }
  return (reached & s2) == 0;
}

bool d_separated(const Dag& g, const std::vector<std::string>& s1,
                 const std::vector<std::string>& s2, const std::vector<std::string>& z) {
  auto to_mask = [&](const std::vector<std::string>& names) {
    NodeMask m = 0;
    for (const auto& n : names) {
      const NodeMask b = bit(g.index_of(n));
      if (m & b) throw DisjointnessError("node '" + n + "' repeated in a query set");
      m |= b;
    }
    return m;
  };
  return d_separated(g, to_mask(s1), to_mask(s2), to_mask(z));
}

bool d_separated(const Dag& g, const CIStatement& ci) {
  return d_separated(g, ci.s1, ci.s2, ci.z);
}

std::vector<CIStatement> all_d_separations(const Dag& g,
                                           const std::vector<std::string>& observed) {
  for (const auto& n : observed) g.index_of(n);
  std::vector<CIStatement> out;
  for (auto& ci : canonical_triples(observed)) {
    if (d_separated(g, ci)) out.push_back(std::move(ci));
  }
  return out;
}

}  // namespace nft
