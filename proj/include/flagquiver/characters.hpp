#pragma once

// Exact character calculus over a root system or any of its Levi
// subsystems: Weyl dimension (product formula), weight multiplicities
// (Freudenthal recursion over the dominant cone), Brauer-Klimyk tensor
// decomposition, isotypical peel-off, exterior square of a character.
//
// Weyl dimension and Freudenthal are deliberately independent routes; their
// agreement is asserted in the test suite, not assumed here.

#include "flagquiver/root_system.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flagquiver {

using Subsystem = std::vector<int>;  // sorted simple-root indices

inline std::uint64_t subsystem_mask(const Subsystem& s) {
  std::uint64_t m = 0;
  for (int i : s) m |= (std::uint64_t{1} << i);
  return m;
}

/// Root system plus memoized character data. Caches are safe for concurrent
/// readers; writers are serialized.
class LieContext {
 public:
  explicit LieContext(RootSystem rs) : rs_(std::move(rs)) {}

  const RootSystem& rs() const { return rs_; }
  int rank() const { return rs_.rank(); }

  /// dim M_lambda by the Weyl product formula over the subsystem.
  std::int64_t weyl_dim(const Subsystem& sub, const Weight& lambda) const {
    require_dominant(sub, lambda);
    Weight rho = rs_.rho(sub);
    Weight lr = weight_add(lambda, rho);
    Rat dim(1);
    for (const auto& alpha : rs_.positive_roots_of(sub))
      dim *= rs_.inner_with_root(lr, alpha) / rs_.inner_with_root(rho, alpha);
    if (dim.get_den() != 1 || dim <= 0)
      throw std::logic_error("Weyl dimension came out non-integral");
    if (!dim.get_num().fits_slong_p()) throw std::overflow_error("Weyl dimension too large");
    return dim.get_num().get_si();
  }

  /// Multiplicities of the dominant weights of M_lambda (Freudenthal).
  std::shared_ptr<const WeightMultiset> dominant_multiplicities(const Subsystem& sub,
                                                                const Weight& lambda) const {
    require_dominant(sub, lambda);
    CacheKey key{subsystem_mask(sub), lambda};
    {
      std::shared_lock lock(mu_);
      auto it = freudenthal_.find(key);
      if (it != freudenthal_.end()) return it->second;
    }
    auto table = std::make_shared<WeightMultiset>(compute_freudenthal(sub, lambda));
    std::unique_lock lock(mu_);
    auto [it, inserted] = freudenthal_.emplace(key, table);
    return it->second;
  }

  /// Full weight multiset of M_lambda (dominant table expanded by Weyl orbits).
  std::shared_ptr<const WeightMultiset> weight_multiplicities(const Subsystem& sub,
                                                              const Weight& lambda) const {
    CacheKey key{subsystem_mask(sub), lambda};
    {
      std::shared_lock lock(mu_);
      auto it = full_char_.find(key);
      if (it != full_char_.end()) return it->second;
    }
    auto dom = dominant_multiplicities(sub, lambda);
    auto full = std::make_shared<WeightMultiset>();
    for (const auto& [w, m] : *dom)
      for (const auto& orb : rs_.weyl_orbit(w, sub)) (*full)[orb] = m;
    std::unique_lock lock(mu_);
    auto [it, inserted] = full_char_.emplace(key, full);
    return it->second;
  }

  /// Klimyk alternating sum: decomposition of ch (x) M_mu, where ch is the
  /// character of some module of the subsystem. With ch = char(M_lambda)
  /// this is the tensor product M_lambda (x) M_mu.
  std::map<Weight, std::int64_t> tensor_with_character(const Subsystem& sub,
                                                       const WeightMultiset& ch,
                                                       const Weight& mu) const {
    require_dominant(sub, mu);
    std::map<Weight, std::int64_t> acc;
    for (const auto& [w, m] : ch) {
      auto sd = rs_.dominant_conjugate_shifted(weight_add(mu, w), sub);
      if (sd.singular) continue;
      acc[sd.weight] += sd.sign * m;
    }
    for (auto it = acc.begin(); it != acc.end();) {
      if (it->second < 0)
        throw std::logic_error("Klimyk produced a negative multiplicity");
      if (it->second == 0) it = acc.erase(it);
      else ++it;
    }
    return acc;
  }

  /// Multiplicities C^nu_{lambda mu} of M_nu in M_lambda (x) M_mu.
  std::map<Weight, std::int64_t> tensor_decompose(const Subsystem& sub, const Weight& lambda,
                                                  const Weight& mu) const {
    require_dominant(sub, lambda);
    return tensor_with_character(sub, *weight_multiplicities(sub, lambda), mu);
  }

  /// Isotypical decomposition of a character by repeated peel-off of the
  /// highest surviving dominant weight. Throws if ch is not a character.
  std::vector<std::pair<Weight, std::int64_t>> decompose_character(const Subsystem& sub,
                                                                   WeightMultiset ch) const {
    std::vector<std::pair<Weight, std::int64_t>> out;
    Weight rho = rs_.rho(sub);
    while (!ch.empty()) {
      // A weight maximizing (., rho_S) among the support is automatically
      // S-dominant when ch is a genuine character.
      const Weight* best = nullptr;
      Rat best_f;
      for (const auto& [w, m] : ch) {
        Rat f = rs_.inner(w, rho);
        if (!best || f > best_f || (f == best_f && w > *best)) {
          best = &w;
          best_f = f;
        }
      }
      Weight top = *best;
      if (!rs_.is_dominant(top, sub))
        throw std::invalid_argument("multiset is not a Levi character (non-dominant peak)");
      std::int64_t mult = ch.at(top);
      if (mult < 0)
        throw std::invalid_argument("multiset is not a Levi character (negative multiplicity)");
      auto piece = weight_multiplicities(sub, top);
      for (const auto& [w, m] : *piece) {
        multiset_add(ch, w, -mult * m);
        auto it = ch.find(w);
        if (it != ch.end() && it->second < 0)
          throw std::invalid_argument("multiset is not a Levi character (peel went negative)");
      }
      out.emplace_back(std::move(top), mult);
    }
    return out;
  }

  void require_dominant(const Subsystem& sub, const Weight& w) const {
    if (!rs_.is_dominant(w, sub))
      throw std::invalid_argument("weight " + weight_to_string(w) +
                                  " is not dominant for the subsystem");
  }

 private:
  struct CacheKey {
    std::uint64_t mask;
    Weight lambda;
    bool operator<(const CacheKey& o) const {
      if (mask != o.mask) return mask < o.mask;
      return lambda < o.lambda;
    }
  };

  WeightMultiset compute_freudenthal(const Subsystem& sub, const Weight& lambda) const {
    auto pos = rs_.positive_roots_of(sub);
    // Dominant weights below lambda: closure under subtracting positive
    // roots while staying dominant (every dominant weight of the module is
    // reachable through dominant weights this way).
    std::vector<Weight> cone{lambda};
    std::map<Weight, std::size_t> index{{lambda, 0}};
    for (std::size_t q = 0; q < cone.size(); ++q) {
      Weight cur = cone[q];
      for (const auto& alpha : pos) {
        Weight down = weight_sub(cur, alpha.fund);
        if (!rs_.is_dominant(down, sub) || index.count(down)) continue;
        index.emplace(down, cone.size());
        cone.push_back(std::move(down));
      }
    }
    // Order by depth = height of lambda - nu in the subsystem root lattice.
    std::vector<std::pair<std::int64_t, Weight>> ordered;
    ordered.reserve(cone.size());
    for (const auto& nu : cone) ordered.emplace_back(cone_depth(sub, lambda, nu), nu);
    std::sort(ordered.begin(), ordered.end());

    WeightMultiset table;
    Weight rho = rs_.rho(sub);
    Weight lam_rho = weight_add(lambda, rho);
    Rat lam_norm = rs_.inner(lam_rho, lam_rho);
    for (const auto& [depth, nu] : ordered) {
      if (depth == 0) {
        table[nu] = 1;
        continue;
      }
      Rat rhs(0);
      for (const auto& alpha : pos) {
        for (std::int64_t k = 1;; ++k) {
          Weight up = nu;
          for (int j = 0; j < rs_.rank(); ++j) up[j] += k * alpha.fund[j];
          if (cone_depth_or_negative(sub, lambda, up) < 0) break;
          Weight dom = rs_.dominant_conjugate(up, sub);
          auto it = table.find(dom);
          if (it == table.end()) continue;
          rhs += Rat(2) * Rat(it->second) * rs_.inner_with_root(up, alpha);
        }
      }
      Weight nu_rho = weight_add(nu, rho);
      Rat denom = lam_norm - rs_.inner(nu_rho, nu_rho);
      if (denom <= 0) throw std::logic_error("Freudenthal denominator not positive");
      Rat m = rhs / denom;
      if (m.get_den() != 1 || m <= 0)
        throw std::logic_error("Freudenthal multiplicity not a positive integer");
      table[nu] = m.get_num().get_si();
    }
    return table;
  }

  /// Height of delta = lambda - nu written in the subsystem's simple roots;
  /// throws if delta is not in the nonnegative cone.
  std::int64_t cone_depth(const Subsystem& sub, const Weight& lambda, const Weight& nu) const {
    auto d = cone_depth_or_negative(sub, lambda, nu);
    if (d < 0) throw std::logic_error("weight not in the dominance cone");
    return d;
  }

  /// Returns -1 when lambda - nu is not a nonnegative integer combination of
  /// the subsystem's simple roots.
  std::int64_t cone_depth_or_negative(const Subsystem& sub, const Weight& lambda,
                                      const Weight& nu) const {
    Weight delta = weight_sub(lambda, nu);
    if (sub.empty()) return weight_is_zero(delta) ? 0 : -1;
    // Solve A_SS k = delta_S, then check the full expansion matches.
    QMat a(sub.size(), sub.size());
    for (std::size_t r = 0; r < sub.size(); ++r)
      for (std::size_t c = 0; c < sub.size(); ++c) a(r, c) = Rat(rs_.cartan(sub[r], sub[c]));
    std::vector<Rat> b(sub.size());
    for (std::size_t r = 0; r < sub.size(); ++r) b[r] = Rat(delta[sub[r]]);
    auto k = a.solve(b);
    if (!k) return -1;
    std::int64_t height = 0;
    Weight recon(rs_.rank(), 0);
    for (std::size_t c = 0; c < sub.size(); ++c) {
      if ((*k)[c].get_den() != 1 || (*k)[c] < 0) return -1;
      std::int64_t kc = (*k)[c].get_num().get_si();
      height += kc;
      Weight alpha = rs_.simple_root(sub[c]);
      for (int j = 0; j < rs_.rank(); ++j) recon[j] += kc * alpha[j];
    }
    return recon == delta ? height : -1;
  }

  RootSystem rs_;
  mutable std::shared_mutex mu_;
  mutable std::map<CacheKey, std::shared_ptr<const WeightMultiset>> freudenthal_;
  mutable std::map<CacheKey, std::shared_ptr<const WeightMultiset>> full_char_;
};

/// Character of the second exterior power: pairwise sums over unordered
/// distinct index pairs of the expanded multiset.
inline WeightMultiset exterior_square(const WeightMultiset& ch) {
  std::vector<Weight> flat;
  for (const auto& [w, m] : ch)
    for (std::int64_t k = 0; k < m; ++k) flat.push_back(w);
  WeightMultiset out;
  for (std::size_t i = 0; i < flat.size(); ++i)
    for (std::size_t j = i + 1; j < flat.size(); ++j)
      multiset_add(out, weight_add(flat[i], flat[j]), 1);
  return out;
}

}  // namespace flagquiver
