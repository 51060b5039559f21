#include "nofinetune/distribution.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "nofinetune/error.hpp"

namespace nft {

std::size_t Alphabet::index_of(std::string_view value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return i;
  }
  throw UnknownVariableError("value '" + std::string(value) + "' not in alphabet of '" +
                             variable + "'");
}

Alphabet make_alphabet(std::string variable, std::vector<std::string> values) {
  if (values.empty()) {
    throw InvalidDistributionError("alphabet of '" + variable + "' is empty");
  }
  std::set<std::string> seen(values.begin(), values.end());
  if (seen.size() != values.size()) {
    throw InvalidDistributionError("alphabet of '" + variable + "' repeats a label");
  }
  return Alphabet{std::move(variable), std::move(values)};
}

Alphabet numbered_alphabet(std::string variable, std::size_t n) {
  std::vector<std::string> values;
  for (std::size_t i = 0; i < n; ++i) values.push_back(std::to_string(i));
  return make_alphabet(std::move(variable), std::move(values));
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::vector<Alphabet> alphabets,
                                     std::vector<Rational> weights, Mode mode,
                                     double epsilon)
    : alphabets_(std::move(alphabets)), weights_(std::move(weights)), mode_(mode),
      epsilon_(epsilon) {
  if (!(epsilon_ > 0)) throw InvalidDistributionError("epsilon must be positive");
  std::set<std::string> names;
  std::size_t size = 1;
  for (const auto& a : alphabets_) {
    make_alphabet(a.variable, a.values);
    if (!names.insert(a.variable).second) {
      throw InvalidDistributionError("variable '" + a.variable + "' listed twice");
    }
    size *= a.size();
  }
  if (weights_.size() != size) {
    throw InvalidDistributionError("table has " + std::to_string(weights_.size()) +
                                   " entries, expected " + std::to_string(size));
  }
  strides_.assign(alphabets_.size(), 1);
  for (std::size_t i = alphabets_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * alphabets_[i].size();
  }
  Rational total = 0;
  for (auto& w : weights_) {
    w.canonicalize();
    if (w < 0) throw InvalidDistributionError("negative weight");
    total += w;
  }
  if (!close(total, Rational(1))) {
    throw InvalidDistributionError("weights sum to " + to_string(total) + ", not 1");
  }
}

JointDistribution JointDistribution::point_mass(std::vector<Alphabet> alphabets,
                                                const Assignment& at) {
  std::size_t size = 1;
  for (const auto& a : alphabets) size *= a.size();
  std::vector<Rational> w(size, 0);
  JointDistribution shape(alphabets, std::vector<Rational>(size, Rational(1, size)));
  w[shape.encode(at)] = 1;
  return JointDistribution(std::move(alphabets), std::move(w));
}

JointDistribution JointDistribution::uniform(std::vector<Alphabet> alphabets) {
  std::size_t size = 1;
  for (const auto& a : alphabets) size *= a.size();
  return JointDistribution(std::move(alphabets),
                           std::vector<Rational>(size, Rational(1, size)));
}

std::vector<std::string> JointDistribution::variables() const {
  std::vector<std::string> out;
  for (const auto& a : alphabets_) out.push_back(a.variable);
  return out;
}

bool JointDistribution::has_variable(std::string_view name) const {
  return std::any_of(alphabets_.begin(), alphabets_.end(),
                     [&](const Alphabet& a) { return a.variable == name; });
}

std::size_t JointDistribution::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < alphabets_.size(); ++i) {
    if (alphabets_[i].variable == name) return i;
  }
  throw UnknownVariableError("unknown variable '" + std::string(name) + "'");
}

const Rational& JointDistribution::weight(const NamedAssignment& a) const {
  if (a.size() != alphabets_.size()) {
    throw UnknownVariableError("named assignment must cover every variable");
  }
  Assignment idx(alphabets_.size());
  for (std::size_t i = 0; i < alphabets_.size(); ++i) {
    auto it = a.find(alphabets_[i].variable);
    if (it == a.end()) {
      throw UnknownVariableError("assignment misses '" + alphabets_[i].variable + "'");
    }
    idx[i] = alphabets_[i].index_of(it->second);
  }
  return weights_[encode(idx)];
}

std::size_t JointDistribution::encode(const Assignment& a) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < alphabets_.size(); ++i) {
    if (a.at(i) >= alphabets_[i].size()) throw UnknownVariableError("value index out of range");
    index += a[i] * strides_[i];
  }
  return index;
}

Assignment JointDistribution::decode(std::size_t index) const {
  Assignment a(alphabets_.size());
  for (std::size_t i = 0; i < alphabets_.size(); ++i) {
    a[i] = (index / strides_[i]) % alphabets_[i].size();
  }
  return a;
}

JointDistribution JointDistribution::with_mode(Mode mode, double epsilon) const {
  return JointDistribution(alphabets_, weights_, mode, epsilon);
}

bool JointDistribution::close(const Rational& a, const Rational& b) const {
  if (mode_ == Mode::exact) return a == b;
  return nft::abs(a - b) <= from_double(epsilon_);
}

bool JointDistribution::approx_equal(const JointDistribution& other) const {
  if (alphabets_ != other.alphabets_) return false;
  const bool exact = mode_ == Mode::exact && other.mode_ == Mode::exact;
  const Rational eps = from_double(std::max(epsilon_, other.epsilon_));
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (exact ? weights_[i] != other.weights_[i]
              : nft::abs(weights_[i] - other.weights_[i]) > eps) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Marginals and conditionals

namespace {

/// Projection of full-table indices onto the index of a sub-table whose
/// variables are `positions` of p (in that order).
std::vector<std::size_t> projection(const JointDistribution& p,
                                    const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> sub_strides(positions.size(), 1);
  for (std::size_t i = positions.size(); i-- > 1;) {
    sub_strides[i - 1] = sub_strides[i] * p.alphabets()[positions[i]].size();
  }
  std::vector<std::size_t> out(p.table_size(), 0);
  Assignment a(p.alphabets().size(), 0);
  for (std::size_t idx = 0; idx < p.table_size(); ++idx) {
    std::size_t sub = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) sub += a[positions[i]] * sub_strides[i];
    out[idx] = sub;
    for (std::size_t i = a.size(); i-- > 0;) {
      if (++a[i] < p.alphabets()[i].size()) break;
      a[i] = 0;
    }
  }
  return out;
}

std::vector<std::size_t> positions_of(const JointDistribution& p,
                                      const std::vector<std::string>& names) {
  std::vector<std::size_t> pos;
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw UnknownVariableError("variable '" + n + "' repeated");
    pos.push_back(p.variable_index(n));
  }
  return pos;
}

/// Unnormalized marginal weights over `positions`.
std::vector<Rational> marginal_weights(const JointDistribution& p,
                                       const std::vector<std::size_t>& positions) {
  std::size_t size = 1;
  for (auto i : positions) size *= p.alphabets()[i].size();
  std::vector<Rational> out(size, 0);
  const auto proj = projection(p, positions);
  for (std::size_t idx = 0; idx < p.table_size(); ++idx) {
    if (sgn(p.weight(idx)) != 0) out[proj[idx]] += p.weight(idx);
  }
  return out;
}

}  // namespace

JointDistribution marginalize(const JointDistribution& p,
                              const std::vector<std::string>& keep) {
  const auto pos = positions_of(p, keep);
  std::vector<Alphabet> alphabets;
  for (auto i : pos) alphabets.push_back(p.alphabets()[i]);
  return JointDistribution(std::move(alphabets), marginal_weights(p, pos), p.mode(),
                           p.epsilon());
}

JointDistribution condition(const JointDistribution& p, const NamedAssignment& on) {
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, value] : on) {
    const std::size_t v = p.variable_index(name);
    fixed.emplace_back(v, p.alphabets()[v].index_of(value));
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < p.alphabets().size(); ++i) {
    if (!on.count(p.alphabets()[i].variable)) rest.push_back(i);
  }
  std::size_t size = 1;
  std::vector<Alphabet> alphabets;
  for (auto i : rest) {
    alphabets.push_back(p.alphabets()[i]);
    size *= p.alphabets()[i].size();
  }
  std::vector<Rational> w(size, 0);
  const auto proj = projection(p, rest);
  Rational total = 0;
  for (std::size_t idx = 0; idx < p.table_size(); ++idx) {
    const auto a = p.decode(idx);
    const bool match = std::all_of(fixed.begin(), fixed.end(),
                                   [&](auto f) { return a[f.first] == f.second; });
    if (!match) continue;
    w[proj[idx]] += p.weight(idx);
    total += p.weight(idx);
  }
  if (sgn(total) == 0) throw ZeroProbabilityEvent("conditioning event has probability zero");
  for (auto& x : w) x /= total;
  return JointDistribution(std::move(alphabets), std::move(w), p.mode(), p.epsilon());
}

namespace {

/// Marginal over s1, s2, z laid out as [s1][s2][z] with block sizes.
struct CiTable {
  std::vector<Rational> joint;
  std::size_t n1 = 1, n2 = 1, nz = 1;
};

CiTable ci_table(const JointDistribution& p, const CIStatement& ci) {
  CiTable t;
  std::vector<std::string> order;
  for (const auto& v : ci.s1) {
    order.push_back(v);
    t.n1 *= p.alphabet(v).size();
  }
  for (const auto& v : ci.s2) {
    order.push_back(v);
    t.n2 *= p.alphabet(v).size();
  }
  for (const auto& v : ci.z) {
    order.push_back(v);
    t.nz *= p.alphabet(v).size();
  }
  t.joint = marginal_weights(p, positions_of(p, order));
  return t;
}

}  // namespace

bool is_conditionally_independent(const JointDistribution& p, const CIStatement& ci) {
  const auto t = ci_table(p, ci);
  const Rational eps = from_double(p.epsilon());
  const bool exact = p.mode() == Mode::exact;
  for (std::size_t k = 0; k < t.nz; ++k) {
    Rational pz = 0;
    std::vector<Rational> p1(t.n1, 0), p2(t.n2, 0);
    for (std::size_t i = 0; i < t.n1; ++i) {
      for (std::size_t j = 0; j < t.n2; ++j) {
        const Rational& w = t.joint[(i * t.n2 + j) * t.nz + k];
        p1[i] += w;
        p2[j] += w;
        pz += w;
      }
    }
    if (exact ? sgn(pz) == 0 : pz <= eps) continue;
    for (std::size_t i = 0; i < t.n1; ++i) {
      for (std::size_t j = 0; j < t.n2; ++j) {
        const Rational& w = t.joint[(i * t.n2 + j) * t.nz + k];
        if (exact) {
          if (w * pz != p1[i] * p2[j]) return false;
        } else {
          const Rational diff = w / pz - (p1[i] / pz) * (p2[j] / pz);
          if (nft::abs(diff) > eps) return false;
        }
      }
    }
  }
  return true;
}

bool holds_by_determinism(const JointDistribution& p, const CIStatement& ci) {
  const auto t = ci_table(p, ci);
  for (std::size_t k = 0; k < t.nz; ++k) {
    std::size_t support1 = 0, support2 = 0;
    std::vector<Rational> p1(t.n1, 0), p2(t.n2, 0);
    Rational pz = 0;
    for (std::size_t i = 0; i < t.n1; ++i) {
      for (std::size_t j = 0; j < t.n2; ++j) {
        const Rational& w = t.joint[(i * t.n2 + j) * t.nz + k];
        p1[i] += w;
        p2[j] += w;
        pz += w;
      }
    }
    if (sgn(pz) == 0) continue;
    for (const auto& w : p1) support1 += sgn(w) != 0;
    for (const auto& w : p2) support2 += sgn(w) != 0;
    if (support1 > 1 && support2 > 1) return false;
  }
  return true;
}

std::vector<CIStatement> ci_scan(const JointDistribution& p,
                                 const std::vector<std::string>& over, bool full_subsets) {
  for (const auto& v : over) p.variable_index(v);
  std::vector<CIStatement> out;
  for (auto& ci : canonical_triples(over, !full_subsets)) {
    if (is_conditionally_independent(p, ci)) out.push_back(std::move(ci));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernels and the Markov factorization

void validate_kernel(const Kernel& k) {
  std::size_t rows = 1;
  for (const auto& a : k.parents) rows *= a.size();
  if (k.rows.size() != rows) {
    throw KernelMismatchError("kernel for '" + k.child.variable + "' has " +
                              std::to_string(k.rows.size()) + " rows, expected " +
                              std::to_string(rows));
  }
  for (const auto& row : k.rows) {
    if (row.size() != k.child.size()) {
      throw KernelMismatchError("kernel row for '" + k.child.variable + "' has wrong width");
    }
    Rational total = 0;
    for (const auto& w : row) {
      if (w < 0) throw KernelMismatchError("negative kernel entry for '" + k.child.variable + "'");
      total += w;
    }
    if (total != 1) {
      throw KernelMismatchError("kernel row for '" + k.child.variable + "' does not sum to 1");
    }
  }
}

Kernel uniform_kernel(Alphabet child, std::vector<Alphabet> parents) {
  std::size_t rows = 1;
  for (const auto& a : parents) rows *= a.size();
  const std::size_t n = child.size();
  return Kernel{std::move(child), std::move(parents),
                std::vector<std::vector<Rational>>(rows, std::vector<Rational>(n, Rational(1, n)))};
}

JointDistribution markov_factorize(const Dag& g, const std::vector<Kernel>& kernels) {
  const std::size_t n = g.size();
  std::vector<const Kernel*> by_node(n, nullptr);
  for (const auto& k : kernels) {
    const auto v = g.find(k.child.variable);
    if (!v) throw KernelMismatchError("kernel for unknown node '" + k.child.variable + "'");
    if (by_node[*v]) throw KernelMismatchError("two kernels for '" + k.child.variable + "'");
    validate_kernel(k);
    by_node[*v] = &k;
  }
  std::vector<Alphabet> alphabets(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!by_node[v]) throw KernelMismatchError("no kernel for '" + g.node(v).name + "'");
    alphabets[v] = by_node[v]->child;
  }
  // Per kernel: graph positions of its parents, checked against Pa(v).
  std::vector<std::vector<std::size_t>> parent_pos(n);
  for (std::size_t v = 0; v < n; ++v) {
    NodeMask seen = 0;
    for (const auto& pa : by_node[v]->parents) {
      const auto u = g.find(pa.variable);
      if (!u || !(g.parents(v) & bit(*u)) || (seen & bit(*u))) {
        throw KernelMismatchError("kernel parents of '" + g.node(v).name +
                                  "' disagree with the graph");
      }
      if (pa != alphabets[*u]) {
        throw KernelMismatchError("kernel parent alphabet for '" + pa.variable +
                                  "' disagrees with that node's kernel");
      }
      seen |= bit(*u);
      parent_pos[v].push_back(*u);
    }
    if (seen != g.parents(v)) {
      throw KernelMismatchError("kernel parents of '" + g.node(v).name +
                                "' disagree with the graph");
    }
  }

  std::size_t size = 1;
  for (const auto& a : alphabets) size *= a.size();
  std::vector<Rational> weights(size, 0);
  Assignment a(n, 0);
  Rational w;
  for (std::size_t idx = 0; idx < size; ++idx) {
    w = 1;
    for (std::size_t v = 0; v < n && sgn(w) != 0; ++v) {
      std::size_t row = 0;
      for (auto u : parent_pos[v]) row = row * alphabets[u].size() + a[u];
      w *= by_node[v]->rows[row][a[v]];
    }
    weights[idx] = w;
    for (std::size_t i = n; i-- > 0;) {
      if (++a[i] < alphabets[i].size()) break;
      a[i] = 0;
    }
  }
  return JointDistribution(std::move(alphabets), std::move(weights));
}

bool is_compatible(const JointDistribution& p, const Dag& g) {
  if (p.alphabets().size() != g.size()) return false;
  for (const auto& node : g.nodes()) {
    if (!p.has_variable(node.name)) return false;
  }
  const auto gen = genealogy(g);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const NodeMask rest = gen.non_descendants[v] & ~gen.parents[v];
    if (rest == 0) continue;
    const auto ci = make_ci({g.node(v).name}, g.names_of(rest), g.names_of(gen.parents[v]));
    if (!is_conditionally_independent(p, ci)) return false;
  }
  return true;
}

std::vector<Kernel> random_kernels(const Dag& g, const std::vector<Alphabet>& alphabets,
                                   std::uint64_t seed, std::uint32_t grid) {
  if (grid < 1) throw std::invalid_argument("grid must be at least 1");
  std::vector<const Alphabet*> by_node(g.size(), nullptr);
  for (const auto& a : alphabets) {
    if (auto v = g.find(a.variable)) by_node[*v] = &a;
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!by_node[v]) throw UnknownVariableError("no alphabet for node '" + g.node(v).name + "'");
  }
  // mt19937_64 output is fixed by the standard; the reduction below avoids
  // library-specific distribution objects so draws are portable.
  std::mt19937_64 rng(seed);
  std::vector<Kernel> kernels;
  for (std::size_t v = 0; v < g.size(); ++v) {
    Kernel k{*by_node[v], {}, {}};
    std::size_t rows = 1;
    for (NodeMask m = g.parents(v); m; m &= m - 1) {
      const auto& pa = *by_node[static_cast<std::size_t>(std::countr_zero(m))];
      k.parents.push_back(pa);
      rows *= pa.size();
    }
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<Rational> row(k.child.size());
      mpz_class total = 0;
      for (auto& x : row) {
        x = Rational(1 + static_cast<unsigned long>(rng() % grid));
        total += x.get_num();
      }
      for (auto& x : row) {
        x /= total;
        x.canonicalize();
      }
      k.rows.push_back(std::move(row));
    }
    kernels.push_back(std::move(k));
  }
  return kernels;
}

JointDistribution random_compatible(const Dag& g, const std::vector<Alphabet>& alphabets,
                                    std::uint64_t seed, std::uint32_t grid) {
  return markov_factorize(g, random_kernels(g, alphabets, seed, grid));
}

}  // namespace nft
