#pragma once

// Weights live in the fundamental-weight basis of the full Cartan; one
// lattice serves the group, every Levi, and the central torus.

#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace flagquiver {

using Weight = std::vector<std::int64_t>;

/// Finite character: weight -> multiplicity >= 1.
using WeightMultiset = std::map<Weight, std::int64_t>;

inline Weight weight_add(const Weight& a, const Weight& b) {
  Weight c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

inline Weight weight_sub(const Weight& a, const Weight& b) {
  Weight c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

inline Weight weight_neg(const Weight& a) {
  Weight c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
  return c;
}

inline Weight weight_zero(std::size_t rank) { return Weight(rank, 0); }

inline bool weight_is_zero(const Weight& a) {
  for (auto x : a) if (x != 0) return false;
  return true;
}

inline std::int64_t multiset_mass(const WeightMultiset& ch) {
  std::int64_t m = 0;
  for (const auto& [w, k] : ch) m += k;
  return m;
}

inline void multiset_add(WeightMultiset& ch, const Weight& w, std::int64_t k) {
  auto it = ch.find(w);
  if (it == ch.end()) {
    if (k != 0) ch.emplace(w, k);
    return;
  }
  it->second += k;
  if (it->second == 0) ch.erase(it);
}

inline std::string weight_to_string(const Weight& w) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ",";
    os << w[i];
  }
  os << ")";
  return os.str();
}

}  // namespace flagquiver
