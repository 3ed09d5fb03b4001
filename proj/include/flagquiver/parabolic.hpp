#pragma once

// From a root system and a set Sigma of crossed-out simple roots: the Levi
// datum, the nilradical as an L-module, arrow multiplicities n_{mu lambda} =
// dim Hom_L(u (x) M_lambda, M_mu), relation counts m_{mu lambda} from the
// exterior square, finite quiver windows, and the stability parameters
// tau'_lambda. Arrows lower weights: u carries the weights -alpha for
// alpha in Delta_+(r).

#include "flagquiver/characters.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flagquiver {

struct LeviDatum {
  std::shared_ptr<const LieContext> ctx;
  std::vector<int> sigma;        // crossed-out simple roots, sorted
  Subsystem levi_simple;         // complement of sigma, sorted
  std::vector<Root> delta_plus_r;
  WeightMultiset u_character;    // weights of the nilradical, each multiplicity 1

  const RootSystem& rs() const { return ctx->rs(); }
  bool is_vertex_weight(const Weight& w) const { return rs().is_dominant(w, levi_simple); }
};

inline LeviDatum levi_datum(std::shared_ptr<const LieContext> ctx, std::vector<int> sigma) {
  if (sigma.empty()) throw std::invalid_argument("sigma empty: P = G is not parabolic");
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
  const RootSystem& rs = ctx->rs();
  for (int i : sigma)
    if (i < 0 || i >= rs.rank()) throw std::invalid_argument("sigma index out of range");

  LeviDatum ld;
  ld.ctx = std::move(ctx);
  ld.sigma = sigma;
  std::set<int> in_sigma(sigma.begin(), sigma.end());
  for (int i = 0; i < rs.rank(); ++i)
    if (!in_sigma.count(i)) ld.levi_simple.push_back(i);
  for (const auto& alpha : rs.positive_roots()) {
    bool meets_sigma = false;
    for (int i : sigma)
      if (alpha.simple[i] != 0) { meets_sigma = true; break; }
    if (meets_sigma) {
      ld.delta_plus_r.push_back(alpha);
      multiset_add(ld.u_character, weight_neg(alpha.fund), 1);
    }
  }
  if (multiset_mass(ld.u_character) != static_cast<std::int64_t>(ld.delta_plus_r.size()))
    throw std::logic_error("nilradical weights are not multiplicity-free");
  return ld;
}

/// Isotypical decomposition of u as an L-module.
inline std::vector<std::pair<Weight, std::int64_t>> nilradical_as_levi_module(const LeviDatum& ld) {
  return ld.ctx->decompose_character(ld.levi_simple, ld.u_character);
}

/// All targets mu with n_{mu lambda} > 0, with their multiplicities.
inline std::map<Weight, std::int64_t> arrow_counts_from(const LeviDatum& ld, const Weight& lambda) {
  return ld.ctx->tensor_with_character(ld.levi_simple, ld.u_character, lambda);
}

inline std::int64_t arrow_count(const LeviDatum& ld, const Weight& lambda, const Weight& mu) {
  ld.ctx->require_dominant(ld.levi_simple, mu);
  auto counts = arrow_counts_from(ld, lambda);
  auto it = counts.find(mu);
  return it == counts.end() ? 0 : it->second;
}

inline std::map<Weight, std::int64_t> relation_counts_from(const LeviDatum& ld, const Weight& lambda) {
  return ld.ctx->tensor_with_character(ld.levi_simple, exterior_square(ld.u_character), lambda);
}

inline std::int64_t relation_count(const LeviDatum& ld, const Weight& lambda, const Weight& mu) {
  ld.ctx->require_dominant(ld.levi_simple, mu);
  auto counts = relation_counts_from(ld, lambda);
  auto it = counts.find(mu);
  return it == counts.end() ? 0 : it->second;
}

/// One summand of a relation r^{(p)}_{mu lambda}: either the length-2 path
/// a^{(j)}_{mu via} a^{(i)}_{via lambda} or the direct arrow a^{(k)}_{mu lambda}.
struct RelationTerm {
  bool is_path2 = false;
  Weight via;  // intermediate vertex (paths only)
  int i = 0;   // arrow index lambda -> via (1-based)
  int j = 0;   // arrow index via -> mu (1-based)
  int k = 0;   // direct arrow index (1-based, length-1 terms)
  CRat coeff;
};

struct Relation {
  Weight tail, head;
  int p = 1;  // which basis relation of the pair, 1..m_{mu lambda}
  std::vector<RelationTerm> terms;
};

using RelationSet = std::vector<Relation>;

struct QuiverArrow {
  Weight tail, head;
  int index;  // 1..n_{head,tail}
};

struct QuiverData {
  std::shared_ptr<const LieContext> ctx;
  std::vector<int> sigma;
  Subsystem levi_simple;
  std::vector<Weight> vertices;  // sorted
  std::vector<QuiverArrow> arrows;
  std::map<std::pair<Weight, Weight>, std::int64_t> arrow_mult;      // (tail, head) -> n
  std::map<std::pair<Weight, Weight>, std::int64_t> relation_counts; // (tail, head) -> m > 0
  std::map<Weight, std::int64_t> n;  // n_lambda = dim M_lambda
  std::optional<std::map<Weight, Rat>> tau;
  std::optional<RelationSet> relations;
  std::vector<Weight> seeds;
  int radius = 0;
  bool window_closed = false;

  const RootSystem& rs() const { return ctx->rs(); }

  bool has_vertex(const Weight& w) const {
    return std::binary_search(vertices.begin(), vertices.end(), w);
  }

  std::int64_t arrows_between(const Weight& tail, const Weight& head) const {
    auto it = arrow_mult.find({tail, head});
    return it == arrow_mult.end() ? 0 : it->second;
  }

  std::int64_t dim_m(const Weight& v) const { return n.at(v); }
};

/// Finite sub-quiver reachable from the seeds by at most `radius` arrow
/// steps, forward or backward. Deterministic: vertices and arrows sorted.
inline QuiverData build_quiver_window(const LeviDatum& ld, const std::vector<Weight>& seeds,
                                      int radius) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  for (const auto& s : seeds) ld.ctx->require_dominant(ld.levi_simple, s);

  std::set<Weight> window(seeds.begin(), seeds.end());
  std::vector<Weight> frontier(window.begin(), window.end());
  for (int step = 0; step < radius && !frontier.empty(); ++step) {
    std::vector<Weight> next;
    for (const auto& lam : frontier) {
      for (const auto& [mu, cnt] : arrow_counts_from(ld, lam))
        if (window.insert(mu).second) next.push_back(mu);
      // backward reach: nu with an arrow nu -> lam; necessarily nu = lam - w
      // for a u-weight w (weight filter)
      for (const auto& [w, m1] : ld.u_character) {
        Weight nu = weight_sub(lam, w);
        if (!ld.is_vertex_weight(nu) || window.count(nu)) continue;
        auto counts = arrow_counts_from(ld, nu);
        if (counts.count(lam)) {
          window.insert(nu);
          next.push_back(nu);
        }
      }
    }
    frontier = std::move(next);
  }

  QuiverData q;
  q.ctx = ld.ctx;
  q.sigma = ld.sigma;
  q.levi_simple = ld.levi_simple;
  q.vertices.assign(window.begin(), window.end());
  q.seeds = seeds;
  q.radius = radius;
  q.window_closed = true;
  for (const auto& lam : q.vertices) {
    q.n[lam] = ld.ctx->weyl_dim(ld.levi_simple, lam);
    for (const auto& [mu, cnt] : arrow_counts_from(ld, lam)) {
      // weight filter: targets of arrows differ by a u-weight
      if (!ld.u_character.count(weight_sub(mu, lam)))
        throw std::logic_error("arrow target violates the u-weight filter");
      if (!window.count(mu)) {
        q.window_closed = false;
        continue;
      }
      q.arrow_mult[{lam, mu}] = cnt;
      for (int i = 1; i <= cnt; ++i) q.arrows.push_back({lam, mu, i});
    }
    for (const auto& [mu, cnt] : relation_counts_from(ld, lam))
      if (window.count(mu)) q.relation_counts[{lam, mu}] = cnt;
  }
  return q;
}

/// Weights of the nilradical attached to a quiver's parabolic choice.
inline WeightMultiset quiver_u_weights(const QuiverData& q) {
  WeightMultiset out;
  for (const auto& alpha : q.rs().positive_roots()) {
    bool meets = false;
    for (int i : q.sigma)
      if (alpha.simple[i] != 0) { meets = true; break; }
    if (meets) multiset_add(out, weight_neg(alpha.fund), 1);
  }
  return out;
}

/// Derived Kaehler coefficient eps_alpha = sum_beta eps_beta <omega_beta, alpha^vee>.
inline Rat derived_epsilon(const LeviDatum& ld, const std::map<int, Rat>& eps, const Root& alpha) {
  Rat e(0);
  for (const auto& [beta, val] : eps)
    e += val * ld.rs().pairing(ld.rs().fundamental_weight(beta), alpha);
  return e;
}

inline void check_eps(const LeviDatum& ld, const std::map<int, Rat>& eps) {
  if (eps.size() != ld.sigma.size())
    throw std::invalid_argument("eps must assign one value per element of sigma");
  for (int b : ld.sigma) {
    auto it = eps.find(b);
    if (it == eps.end()) throw std::invalid_argument("eps missing a sigma index");
    if (it->second <= 0) throw std::invalid_argument("eps values must be positive");
  }
}

/// tau'_lambda = -n_lambda sum_{alpha in Delta_+(r)} eps_alpha^{-1} <lambda, alpha^vee>.
inline Rat tau_prime(const LeviDatum& ld, const std::map<int, Rat>& eps, const Weight& lambda) {
  check_eps(ld, eps);
  ld.ctx->require_dominant(ld.levi_simple, lambda);
  Rat sum(0);
  for (const auto& alpha : ld.delta_plus_r) {
    Rat ea = derived_epsilon(ld, eps, alpha);
    if (ea <= 0) throw std::logic_error("derived eps_alpha not positive");
    sum += ld.rs().pairing(lambda, alpha) / ea;
  }
  return Rat(-ld.ctx->weyl_dim(ld.levi_simple, lambda)) * sum;
}

/// Populate tau'_lambda for every window vertex.
inline void attach_tau(QuiverData& q, const LeviDatum& ld, const std::map<int, Rat>& eps) {
  std::map<Weight, Rat> t;
  for (const auto& v : q.vertices) t[v] = tau_prime(ld, eps, v);
  q.tau = std::move(t);
}

}  // namespace flagquiver
