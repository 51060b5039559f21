#pragma once

#include <compare>
#include <string>
#include <vector>

namespace nft {

/// A conditional-independence statement (s1 _||_ s2 | z) over named
/// variables. Canonical form: each set sorted, duplicate-free, and s1 < s2
/// lexicographically.
struct CIStatement {
  std::vector<std::string> s1;
  std::vector<std::string> s2;
  std::vector<std::string> z;

  friend auto operator<=>(const CIStatement&, const CIStatement&) = default;
  friend bool operator==(const CIStatement&, const CIStatement&) = default;
};

/// Builds the canonical form. Throws DisjointnessError when the sets overlap
/// or when s1 or s2 is empty.
CIStatement make_ci(std::vector<std::string> s1, std::vector<std::string> s2,
                    std::vector<std::string> z = {});

/// "(A _||_ Y | X)"; the conditioning bar is omitted when z is empty.
std::string to_string(const CIStatement& ci);

/// Every canonical triple over `variables`, sorted. With `singletons_only`,
/// s1 and s2 range over single variables; z always ranges over all subsets of
/// the remaining variables.
std::vector<CIStatement> canonical_triples(std::vector<std::string> variables,
                                           bool singletons_only = false);

}  // namespace nft
