#include "nofinetune/ci_statement.hpp"

#include <algorithm>
#include <set>

#include "nofinetune/error.hpp"

namespace nft {

namespace {

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return !out.empty();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

}  // namespace

CIStatement make_ci(std::vector<std::string> s1, std::vector<std::string> s2,
                    std::vector<std::string> z) {
  sort_unique(s1);
  sort_unique(s2);
  sort_unique(z);
  if (s1.empty() || s2.empty()) {
    throw DisjointnessError("CI statement needs nonempty s1 and s2");
  }
  if (intersects(s1, s2) || intersects(s1, z) || intersects(s2, z)) {
    throw DisjointnessError("CI statement sets overlap");
  }
  if (s2 < s1) std::swap(s1, s2);
  return CIStatement{std::move(s1), std::move(s2), std::move(z)};
}

std::string to_string(const CIStatement& ci) {
  std::string out = "(" + join(ci.s1) + " _||_ " + join(ci.s2);
  if (!ci.z.empty()) out += " | " + join(ci.z);
  return out + ")";
}

std::vector<CIStatement> canonical_triples(std::vector<std::string> variables,
                                           bool singletons_only) {
  sort_unique(variables);
  const std::size_t n = variables.size();
  // Each variable goes to s1 (1), s2 (2), z (3) or nowhere (0).
  std::set<CIStatement> seen;
  std::vector<int> role(n, 0);
  while (true) {
    std::vector<std::string> s1, s2, z;
    for (std::size_t i = 0; i < n; ++i) {
      if (role[i] == 1) s1.push_back(variables[i]);
      if (role[i] == 2) s2.push_back(variables[i]);
      if (role[i] == 3) z.push_back(variables[i]);
    }
    const bool shape_ok = !s1.empty() && !s2.empty() &&
                          (!singletons_only || (s1.size() == 1 && s2.size() == 1));
    if (shape_ok && s1 < s2) seen.insert(CIStatement{s1, s2, z});

    std::size_t i = 0;
    while (i < n && role[i] == 3) role[i++] = 0;
    if (i == n) break;
    ++role[i];
  }
  return {seen.begin(), seen.end()};
}

}  // namespace nft
