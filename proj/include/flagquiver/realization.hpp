#pragma once

// Explicit matrix realizations for groups of rank <= 2: irreducible modules
// by the highest-weight construction (lowering words, dependencies removed
// through the Shapovalov form), root vectors inside the smallest faithful
// fundamental representation with extraspecial-pair normalization, bases of
// the equivariant Hom spaces A_{mu lambda} / B_{mu lambda}, the psi maps and
// the relation coefficients.
//
// Everything here is exact rational arithmetic; bases are canonical reduced
// echelon solutions of the equivariance systems with lexicographic word
// ordering, so repeated runs emit identical coefficients.

#include "flagquiver/parabolic.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flagquiver {

struct IrrepRealization {
  Weight lambda;
  Subsystem sub;  // acting semisimple directions (empty for a torus module)
  std::int64_t dim = 0;
  std::vector<Weight> basis_weights;           // full-lattice weight per basis vector
  std::vector<std::vector<int>> basis_words;   // PBW monomial labels (lowering words)
  std::map<int, QMat> e, f;                    // per subsystem index
  std::vector<QMat> h;                         // per full Cartan index, diagonal

  const QMat& h_mat(int j) const { return h[j]; }
};

namespace detail {

using Word = std::vector<int>;

/// Shapovalov-form workhorse for one (subsystem, lambda): the contravariant
/// pairing of lowering words and the rewriting e_i f_w v into lowering words.
class VermaPairer {
 public:
  VermaPairer(const LieContext& ctx, Subsystem sub, Weight lambda)
      : ctx_(ctx), sub_(std::move(sub)), lambda_(std::move(lambda)) {}

  Weight word_weight(const Word& w) const {
    Weight out = lambda_;
    for (int i : w) {
      Weight alpha = ctx_.rs().simple_root(i);
      out = weight_sub(out, alpha);
    }
    return out;
  }

  const std::map<Word, Rat>& e_act(int i, const Word& w) {
    auto key = std::make_pair(i, w);
    auto it = eact_.find(key);
    if (it != eact_.end()) return it->second;
    std::map<Word, Rat> out;
    if (!w.empty()) {
      int j = w.front();
      Word rest(w.begin() + 1, w.end());
      // e_i f_j = f_j e_i + delta_ij h_i
      for (const auto& [u, c] : e_act(i, rest)) {
        Word extended;
        extended.reserve(u.size() + 1);
        extended.push_back(j);
        extended.insert(extended.end(), u.begin(), u.end());
        Rat& slot = out[extended];
        slot += c;
        if (slot == 0) out.erase(extended);
      }
      if (i == j) {
        Weight wt = word_weight(rest);
        if (wt[i] != 0) {
          Rat& slot = out[rest];
          slot += Rat(wt[i]);
          if (slot == 0) out.erase(rest);
        }
      }
    }
    return eact_.emplace(std::move(key), std::move(out)).first->second;
  }

  Rat pair(const Word& a, const Word& b) {
    if (a.empty()) return b.empty() ? Rat(1) : Rat(0);
    if (b.empty()) return Rat(0);
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = pair_.find(key);
    if (it != pair_.end()) return it->second;
    int i = a.front();
    Word rest(a.begin() + 1, a.end());
    Rat out(0);
    for (const auto& [u, c] : e_act(i, b)) out += c * pair(rest, u);
    pair_.emplace(std::move(key), out);
    return out;
  }

  Rat pair_combo(const Word& a, const std::map<Word, Rat>& combo) {
    Rat out(0);
    for (const auto& [u, c] : combo) out += c * pair(a, u);
    return out;
  }

 private:
  const LieContext& ctx_;
  Subsystem sub_;
  Weight lambda_;
  std::map<std::pair<int, Word>, std::map<Word, Rat>> eact_;
  std::map<std::pair<Word, Word>, Rat> pair_;
};

}  // namespace detail

/// Highest-weight construction of M_lambda for the given subsystem, with all
/// Cartan directions of the ambient group acting. Basis vectors are chosen
/// lowering words (lexicographically first independent set per weight
/// space, independence decided by the Shapovalov form).
inline IrrepRealization build_irrep(const LieContext& ctx, const Subsystem& sub,
                                    const Weight& lambda, std::int64_t dim_budget = 256) {
  if (ctx.rank() > 2)
    throw std::invalid_argument("explicit realizations are capped at rank 2");
  ctx.require_dominant(sub, lambda);
  std::int64_t dim = ctx.weyl_dim(sub, lambda);
  if (dim > dim_budget)
    throw std::invalid_argument("irrep dimension " + std::to_string(dim) +
                                " exceeds budget " + std::to_string(dim_budget));
  auto mults = ctx.weight_multiplicities(sub, lambda);

  detail::VermaPairer vp(ctx, sub, lambda);
  using detail::Word;

  // layer-by-layer basis selection
  std::map<Weight, std::vector<Word>> basis;   // per weight space
  std::map<Weight, QMat> gram;                 // Gram matrix of the chosen words
  std::vector<std::pair<Weight, Word>> flat;   // global ordering
  std::vector<std::vector<Word>> layers;
  layers.push_back({Word{}});
  basis[lambda] = {Word{}};
  {
    QMat g(1, 1);
    g(0, 0) = Rat(1);
    gram[lambda] = g;
  }
  flat.emplace_back(lambda, Word{});

  while (!layers.back().empty()) {
    const auto& prev = layers.back();
    std::map<Weight, std::vector<Word>> candidates;
    for (const auto& w : prev)
      for (int i : sub) {
        Word nw;
        nw.push_back(i);
        nw.insert(nw.end(), w.begin(), w.end());
        candidates[vp.word_weight(nw)].push_back(nw);
      }
    std::vector<Word> chosen_layer;
    for (auto& [wt, words] : candidates) {
      auto mit = mults->find(wt);
      if (mit == mults->end()) continue;
      std::int64_t want = mit->second;
      std::sort(words.begin(), words.end());
      words.erase(std::unique(words.begin(), words.end()), words.end());
      std::vector<Word> chosen;
      for (const auto& cand : words) {
        if (static_cast<std::int64_t>(chosen.size()) == want) break;
        std::vector<Word> trial = chosen;
        trial.push_back(cand);
        QMat g(trial.size(), trial.size());
        for (std::size_t r = 0; r < trial.size(); ++r)
          for (std::size_t c = r; c < trial.size(); ++c) {
            g(r, c) = vp.pair(trial[r], trial[c]);
            g(c, r) = g(r, c);
          }
        if (g.rank() == trial.size()) chosen = std::move(trial);
      }
      if (static_cast<std::int64_t>(chosen.size()) != want)
        throw std::logic_error("weight space dimension mismatch against Freudenthal");
      QMat g(chosen.size(), chosen.size());
      for (std::size_t r = 0; r < chosen.size(); ++r)
        for (std::size_t c = 0; c < chosen.size(); ++c) g(r, c) = vp.pair(chosen[r], chosen[c]);
      gram[wt] = std::move(g);
      basis[wt] = chosen;
      for (const auto& w : chosen) {
        flat.emplace_back(wt, w);
        chosen_layer.push_back(w);
      }
    }
    layers.push_back(std::move(chosen_layer));
  }

  IrrepRealization out;
  out.lambda = lambda;
  out.sub = sub;
  out.dim = static_cast<std::int64_t>(flat.size());
  if (out.dim != dim) throw std::logic_error("basis count disagrees with Weyl dimension");

  std::map<std::pair<Weight, Word>, std::size_t> pos;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    pos[flat[k]] = k;
    out.basis_weights.push_back(flat[k].first);
    out.basis_words.push_back(flat[k].second);
  }

  int rank = ctx.rank();
  for (int j = 0; j < rank; ++j) {
    QMat hj(out.dim, out.dim);
    for (std::size_t k = 0; k < flat.size(); ++k) hj(k, k) = Rat(flat[k].first[j]);
    out.h.push_back(std::move(hj));
  }

  // project a lowering-word combination onto the chosen basis of one space
  auto project = [&](const Weight& wt, const std::map<Word, Rat>& combo,
                     QMat& target, std::size_t col) {
    auto bit = basis.find(wt);
    if (bit == basis.end()) {
      // outside the weight diagram: the combination must be a null vector
      Rat self(0);
      for (const auto& [u, cu] : combo)
        for (const auto& [v, cv] : combo) self += cu * cv * vp.pair(u, v);
      if (self != 0) throw std::logic_error("nonzero vector outside the weight diagram");
      return;
    }
    const auto& bw = bit->second;
    std::vector<Rat> rhs(bw.size());
    for (std::size_t r = 0; r < bw.size(); ++r) rhs[r] = vp.pair_combo(bw[r], combo);
    auto x = gram.at(wt).solve(rhs);
    if (!x) throw std::logic_error("Gram projection failed");
    for (std::size_t r = 0; r < bw.size(); ++r) target(pos.at({wt, bw[r]}), col) = (*x)[r];
  };

  for (int i : sub) {
    QMat fi(out.dim, out.dim), ei(out.dim, out.dim);
    Weight alpha = ctx.rs().simple_root(i);
    for (std::size_t k = 0; k < flat.size(); ++k) {
      const auto& [wt, w] = flat[k];
      Word lowered;
      lowered.push_back(i);
      lowered.insert(lowered.end(), w.begin(), w.end());
      project(weight_sub(wt, alpha), {{lowered, Rat(1)}}, fi, k);
      project(weight_add(wt, alpha), vp.e_act(i, w), ei, k);
    }
    out.f[i] = std::move(fi);
    out.e[i] = std::move(ei);
  }
  return out;
}

/// x = c*y for matrices; throws when x is not proportional to y (or y = 0
/// while x != 0).
inline Rat proportionality(const QMat& x, const QMat& y) {
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j)
      if (!(y(i, j) == Rat(0))) {
        Rat c = x(i, j) / y(i, j);
        QMat check = y;
        check *= c;
        if (!(check == x)) throw std::logic_error("matrices are not proportional");
        return c;
      }
  if (!x.is_zero()) throw std::logic_error("proportionality against the zero matrix");
  return Rat(0);
}

/// Root vectors of the full algebra realized in the smallest faithful
/// fundamental representation. e_gamma for non-simple gamma is
/// [e_i, e_{gamma - alpha_i}] / (p+1) with i minimal (extraspecial pairs get
/// the positive sign); f analogously with the opposite sign. The Chevalley
/// identities are verified exactly in the test suite.
struct ChevalleyBasis {
  std::shared_ptr<const LieContext> ctx;
  IrrepRealization rep;           // faithful fundamental representation
  std::vector<QMat> e_root;       // aligned with ctx->rs().positive_roots()
  std::vector<QMat> f_root;
  std::vector<QMat> h_simple;     // h_i matrices in the faithful rep

  /// Coroot of a positive root expressed in the simple coroots (integers).
  static std::vector<Rat> coroot_coords(const RootSystem& rs, const Root& gamma) {
    std::vector<Rat> c(rs.rank());
    for (int j = 0; j < rs.rank(); ++j)
      c[j] = Rat(gamma.simple[j]) * rs.symmetrizer()[j] / gamma.half_norm;
    return c;
  }
};

/// Matrices of the Chevalley root vectors e_gamma / f_gamma acting on any
/// realized full-system module. The recursion is through elements of the
/// universal enveloping algebra, so it is representation-independent: the
/// same formal e_gamma acts in every module.
inline std::pair<std::vector<QMat>, std::vector<QMat>> root_vector_matrices(
    const LieContext& ctx, const IrrepRealization& rep) {
  const RootSystem& rs = ctx.rs();
  const auto& pos = rs.positive_roots();
  std::vector<QMat> es(pos.size()), fs(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const Root& gamma = pos[k];
    int simple_idx = -1;
    for (int i = 0; i < rs.rank(); ++i) {
      bool is_simple = true;
      for (int j = 0; j < rs.rank(); ++j)
        if (gamma.simple[j] != (j == i ? 1 : 0)) { is_simple = false; break; }
      if (is_simple) { simple_idx = i; break; }
    }
    if (simple_idx >= 0) {
      es[k] = rep.e.at(simple_idx);
      fs[k] = rep.f.at(simple_idx);
      continue;
    }
    int i_min = -1, rest_idx = -1;
    for (int i = 0; i < rs.rank(); ++i) {
      std::vector<std::int64_t> rest = gamma.simple;
      rest[i] -= 1;
      if (rest[i] < 0) continue;
      int idx = rs.root_index(rest);
      if (idx >= 0) { i_min = i; rest_idx = idx; break; }
    }
    if (i_min < 0) throw std::logic_error("positive root without a simple summand");
    // p-string of alpha_i through gamma - alpha_i
    std::int64_t p = 0;
    std::vector<std::int64_t> probe = pos[rest_idx].simple;
    while (true) {
      probe[i_min] -= 1;
      if (!rs.is_root(probe)) break;
      ++p;
    }
    Rat inv = Rat(1) / Rat(p + 1);
    QMat ecand = matmul_commutator(rep.e.at(i_min), es[rest_idx]);
    QMat fcand = matmul_commutator(rep.f.at(i_min), fs[rest_idx]);
    ecand *= inv;
    fcand *= -inv;
    es[k] = std::move(ecand);
    fs[k] = std::move(fcand);
  }
  return {std::move(es), std::move(fs)};
}

inline ChevalleyBasis build_chevalley(std::shared_ptr<const LieContext> ctx) {
  const RootSystem& rs = ctx->rs();
  if (rs.rank() > 2)
    throw std::invalid_argument("explicit realizations are capped at rank 2");
  auto full = rs.full_subsystem();
  // smallest fundamental representation is faithful for a simple algebra
  int best = 0;
  std::int64_t best_dim = -1;
  for (int i = 0; i < rs.rank(); ++i) {
    std::int64_t d = ctx->weyl_dim(full, rs.fundamental_weight(i));
    if (best_dim < 0 || d < best_dim) { best = i; best_dim = d; }
  }
  ChevalleyBasis cb;
  cb.ctx = ctx;
  cb.rep = build_irrep(*ctx, full, rs.fundamental_weight(best), 64);
  for (int i = 0; i < rs.rank(); ++i) cb.h_simple.push_back(cb.rep.h_mat(i));
  auto [es, fs] = root_vector_matrices(*ctx, cb.rep);
  cb.e_root = std::move(es);
  cb.f_root = std::move(fs);
  return cb;
}

/// Levi generator label: full-Cartan 'H' j, or 'E'/'F' i with i a Levi
/// simple index.
struct LeviGen {
  char type;  // 'H', 'E', 'F'
  int idx;
  bool operator<(const LeviGen& o) const {
    if (type != o.type) return type < o.type;
    return idx < o.idx;
  }
};

/// The nilradical realized as matrices, with brackets and the Levi action
/// expanded in its root-vector basis u_a = e_{-gamma_a}.
struct NilradicalRealization {
  std::shared_ptr<const LieContext> ctx;
  std::vector<int> sigma;
  Subsystem levi_simple;
  std::vector<int> root_idx;       // positions of Delta_+(r) in positive_roots()
  std::vector<Weight> u_weights;   // -gamma_a in fundamental coordinates
  int k = 0;
  // [u_a, u_b] = sum_c bracket[a][b][c] u_c (a < b; antisymmetric fill)
  std::vector<std::vector<std::vector<Rat>>> bracket;
  std::vector<LeviGen> gens;                  // H_0..H_{r-1}, E_i, F_i (i Levi)
  std::map<LeviGen, QMat> ad_u;               // k x k action on u
  std::map<LeviGen, QMat> ad_wedge;           // action on wedge^2 u
  std::vector<std::pair<int, int>> pairs;     // wedge basis (a,b), a < b

  int pair_index(int a, int b) const {
    for (std::size_t t = 0; t < pairs.size(); ++t)
      if (pairs[t] == std::make_pair(a, b)) return static_cast<int>(t);
    throw std::logic_error("bad wedge pair");
  }
};

inline NilradicalRealization build_nilradical(const ChevalleyBasis& cb, const LeviDatum& ld) {
  const RootSystem& rs = cb.ctx->rs();
  NilradicalRealization nr;
  nr.ctx = cb.ctx;
  nr.sigma = ld.sigma;
  nr.levi_simple = ld.levi_simple;
  for (std::size_t k = 0; k < rs.positive_roots().size(); ++k) {
    const Root& gamma = rs.positive_roots()[k];
    bool meets = false;
    for (int i : ld.sigma)
      if (gamma.simple[i] != 0) { meets = true; break; }
    if (meets) {
      nr.root_idx.push_back(static_cast<int>(k));
      nr.u_weights.push_back(weight_neg(gamma.fund));
    }
  }
  nr.k = static_cast<int>(nr.root_idx.size());

  auto u_mat = [&](int a) -> const QMat& { return cb.f_root[nr.root_idx[a]]; };

  // expand an element of u (given as a matrix) in the u basis
  std::size_t n2 = cb.rep.dim * cb.rep.dim;
  QMat ubasis(n2, nr.k);
  for (int a = 0; a < nr.k; ++a) {
    auto v = u_mat(a).vec();
    for (std::size_t i = 0; i < n2; ++i) ubasis(i, a) = v[i];
  }
  auto expand_u = [&](const QMat& x) {
    auto sol = ubasis.solve(x.vec());
    if (!sol) throw std::logic_error("element does not lie in u");
    return *sol;
  };

  nr.bracket.assign(nr.k, std::vector<std::vector<Rat>>(nr.k, std::vector<Rat>(nr.k, Rat(0))));
  for (int a = 0; a < nr.k; ++a)
    for (int b = a + 1; b < nr.k; ++b) {
      auto coeffs = expand_u(matmul_commutator(u_mat(a), u_mat(b)));
      for (int c = 0; c < nr.k; ++c) {
        nr.bracket[a][b][c] = coeffs[c];
        nr.bracket[b][a][c] = -coeffs[c];
      }
    }

  for (int j = 0; j < rs.rank(); ++j) nr.gens.push_back({'H', j});
  for (int i : ld.levi_simple) nr.gens.push_back({'E', i});
  for (int i : ld.levi_simple) nr.gens.push_back({'F', i});

  for (const auto& g : nr.gens) {
    const QMat& gm = g.type == 'H'   ? cb.h_simple[g.idx]
                     : g.type == 'E' ? cb.rep.e.at(g.idx)
                                     : cb.rep.f.at(g.idx);
    QMat act(nr.k, nr.k);
    for (int a = 0; a < nr.k; ++a) {
      auto coeffs = expand_u(matmul_commutator(gm, u_mat(a)));
      for (int c = 0; c < nr.k; ++c) act(c, a) = coeffs[c];
    }
    nr.ad_u[g] = std::move(act);
  }

  for (int a = 0; a < nr.k; ++a)
    for (int b = a + 1; b < nr.k; ++b) nr.pairs.emplace_back(a, b);
  for (const auto& g : nr.gens) {
    const QMat& m = nr.ad_u.at(g);
    QMat act(nr.pairs.size(), nr.pairs.size());
    for (std::size_t t = 0; t < nr.pairs.size(); ++t) {
      auto [a, b] = nr.pairs[t];
      for (int c = 0; c < nr.k; ++c) {
        // (ad x u_a) ^ u_b
        if (!(m(c, a) == Rat(0)) && c != b) {
          int lo = std::min(c, b), hi = std::max(c, b);
          Rat sign = c < b ? Rat(1) : Rat(-1);
          act(nr.pair_index(lo, hi), t) += sign * m(c, a);
        }
        // u_a ^ (ad x u_b)
        if (!(m(c, b) == Rat(0)) && c != a) {
          int lo = std::min(a, c), hi = std::max(a, c);
          Rat sign = a < c ? Rat(1) : Rat(-1);
          act(nr.pair_index(lo, hi), t) += sign * m(c, b);
        }
      }
    }
    nr.ad_wedge[g] = std::move(act);
  }
  return nr;
}

enum class HomSource { U, Wedge2U };

struct HomBasis {
  HomSource source;
  Weight lambda, mu;
  // each map: dim_mu x (k_src * dim_lambda), source slot s and lambda index l
  // flattened as column s * dim_lambda + l
  std::vector<QMat> maps;
};

/// Caches realizations and equivariant Hom bases for one root system.
/// Thread-safe: concurrent readers, serialized writers.
class RealizationContext {
 public:
  explicit RealizationContext(std::shared_ptr<const LieContext> ctx, std::int64_t budget = 256)
      : ctx_(std::move(ctx)), budget_(budget) {}

  const LieContext& lie() const { return *ctx_; }
  std::shared_ptr<const LieContext> lie_ptr() const { return ctx_; }

  std::shared_ptr<const IrrepRealization> irrep(const Subsystem& sub, const Weight& lambda) {
    auto key = std::make_pair(subsystem_mask(sub), lambda);
    std::lock_guard lock(mu_);
    auto it = irreps_.find(key);
    if (it != irreps_.end()) return it->second;
    auto rep = std::make_shared<IrrepRealization>(build_irrep(*ctx_, sub, lambda, budget_));
    irreps_.emplace(key, rep);
    return rep;
  }

  const ChevalleyBasis& chevalley() {
    std::lock_guard lock(mu_);
    if (!chev_) chev_ = std::make_shared<ChevalleyBasis>(build_chevalley(ctx_));
    return *chev_;
  }

  std::shared_ptr<const NilradicalRealization> nilradical(const LeviDatum& ld) {
    const ChevalleyBasis& cb = chevalley();
    std::uint64_t mask = 0;
    for (int i : ld.sigma) mask |= (std::uint64_t{1} << i);
    std::lock_guard lock(mu_);
    auto it = nilrads_.find(mask);
    if (it != nilrads_.end()) return it->second;
    auto nr = std::make_shared<NilradicalRealization>(build_nilradical(cb, ld));
    nilrads_.emplace(mask, nr);
    return nr;
  }

  /// Canonical basis of Hom_L(u (x) M_lambda, M_mu) or
  /// Hom_L(wedge^2 u (x) M_lambda, M_mu).
  std::shared_ptr<const HomBasis> hom_basis(const LeviDatum& ld, const Weight& lambda,
                                            const Weight& mu, HomSource source) {
    auto nr = nilradical(ld);
    HomKey key{subsystem_mask_of_sigma(ld), lambda, mu, source};
    {
      std::lock_guard lock(mu_);
      auto it = homs_.find(key);
      if (it != homs_.end()) return it->second;
    }
    auto hb = std::make_shared<HomBasis>(solve_hom_basis(*nr, ld, lambda, mu, source));
    std::lock_guard lock(mu_);
    auto [it, ins] = homs_.emplace(key, hb);
    return it->second;
  }

  /// Canonical basis of Hom_L(M_lambda, M_mu (x) M_nu): Clebsch-Gordan
  /// injections, each (dim_mu * dim_nu) x dim_lambda.
  std::shared_ptr<const std::vector<QMat>> cg_injections(const Subsystem& levi, const Weight& mu,
                                                         const Weight& nu, const Weight& lambda) {
    CgKey key{mu, nu, lambda};
    {
      std::lock_guard lock(mu_);
      auto it = cgs_.find(key);
      if (it != cgs_.end()) return it->second;
    }
    auto val = std::make_shared<std::vector<QMat>>(solve_cg(levi, mu, nu, lambda));
    std::lock_guard lock(mu_);
    auto [it, ins] = cgs_.emplace(key, val);
    return it->second;
  }

 private:
  static std::uint64_t subsystem_mask_of_sigma(const LeviDatum& ld) {
    std::uint64_t m = 0;
    for (int i : ld.sigma) m |= (std::uint64_t{1} << i);
    return m;
  }

  struct HomKey {
    std::uint64_t sigma_mask;
    Weight lambda, mu;
    HomSource source;
    bool operator<(const HomKey& o) const {
      if (sigma_mask != o.sigma_mask) return sigma_mask < o.sigma_mask;
      if (lambda != o.lambda) return lambda < o.lambda;
      if (mu != o.mu) return mu < o.mu;
      return source < o.source;
    }
  };
  struct CgKey {
    Weight mu, nu, lambda;
    bool operator<(const CgKey& o) const {
      if (mu != o.mu) return mu < o.mu;
      if (nu != o.nu) return nu < o.nu;
      return lambda < o.lambda;
    }
  };

  HomBasis solve_hom_basis(const NilradicalRealization& nr, const LeviDatum& ld,
                           const Weight& lambda, const Weight& mu, HomSource source) {
    auto rl = irrep(ld.levi_simple, lambda);
    auto rm = irrep(ld.levi_simple, mu);
    std::vector<Weight> src_weights;
    if (source == HomSource::U) {
      src_weights = nr.u_weights;
    } else {
      for (auto [a, b] : nr.pairs)
        src_weights.push_back(weight_add(nr.u_weights[a], nr.u_weights[b]));
    }
    int ks = static_cast<int>(src_weights.size());

    std::int64_t dl = rl->dim, dm = rm->dim;
    // unknown entries restricted by the torus filter
    std::vector<std::array<std::int64_t, 3>> unknowns;  // (row r, slot s, col l)
    std::map<std::array<std::int64_t, 3>, std::size_t> upos;
    for (std::int64_t r = 0; r < dm; ++r)
      for (int s = 0; s < ks; ++s)
        for (std::int64_t l = 0; l < dl; ++l) {
          Weight wt = weight_add(src_weights[s], rl->basis_weights[l]);
          if (wt == rm->basis_weights[r]) {
            upos[{r, s, l}] = unknowns.size();
            unknowns.push_back({r, s, l});
          }
        }

    std::vector<std::vector<Rat>> rows;
    auto add_constraints = [&](const LeviGen& g) {
      if (g.type == 'H') return;  // torus equivariance is the filter
      const QMat& src_act =
          source == HomSource::U ? nr.ad_u.at(g) : nr.ad_wedge.at(g);
      const QMat& xl = g.type == 'E' ? rl->e.at(g.idx) : rl->f.at(g.idx);
      const QMat& xm = g.type == 'E' ? rm->e.at(g.idx) : rm->f.at(g.idx);
      // rho_mu(x) A - A (ad(x) (x) I + I (x) rho_lambda(x)) = 0
      for (std::int64_t r = 0; r < dm; ++r)
        for (int s = 0; s < ks; ++s)
          for (std::int64_t l = 0; l < dl; ++l) {
            std::vector<Rat> row(unknowns.size(), Rat(0));
            bool nontrivial = false;
            for (std::int64_t r2 = 0; r2 < dm; ++r2) {
              if (xm(r, r2) == Rat(0)) continue;
              auto it = upos.find({r2, s, l});
              if (it == upos.end()) continue;
              row[it->second] += xm(r, r2);
              nontrivial = true;
            }
            for (int s2 = 0; s2 < ks; ++s2) {
              if (src_act(s2, s) == Rat(0)) continue;
              auto it = upos.find({r, s2, l});
              if (it == upos.end()) continue;
              row[it->second] -= src_act(s2, s);
              nontrivial = true;
            }
            for (std::int64_t l2 = 0; l2 < dl; ++l2) {
              if (xl(l2, l) == Rat(0)) continue;
              auto it = upos.find({r, s, l2});
              if (it == upos.end()) continue;
              row[it->second] -= xl(l2, l);
              nontrivial = true;
            }
            if (nontrivial) rows.push_back(std::move(row));
          }
    };
    for (const auto& g : nr.gens) add_constraints(g);

    QMat sys(rows.size(), unknowns.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < unknowns.size(); ++c) sys(r, c) = rows[r][c];
    QMat null = unknowns.empty() ? QMat(0, 0) : sys.nullspace();

    HomBasis hb;
    hb.source = source;
    hb.lambda = lambda;
    hb.mu = mu;
    for (std::size_t c = 0; c < null.cols(); ++c) {
      QMat m(dm, ks * dl);
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        auto [r, s, l] = unknowns[u];
        m(r, s * dl + l) = null(u, c);
      }
      hb.maps.push_back(std::move(m));
    }

    // cross-module consistency against the character counts
    std::int64_t expected = source == HomSource::U ? arrow_count(ld, lambda, mu)
                                                   : relation_count(ld, lambda, mu);
    if (static_cast<std::int64_t>(hb.maps.size()) != expected)
      throw std::logic_error("Hom basis cardinality disagrees with character count");
    return hb;
  }

  std::vector<QMat> solve_cg(const Subsystem& levi, const Weight& mu, const Weight& nu,
                             const Weight& lambda) {
    auto rm = irrep(levi, mu);
    auto rn = irrep(levi, nu);
    auto rl = irrep(levi, lambda);
    std::int64_t dm = rm->dim, dn = rn->dim, dl = rl->dim;
    std::vector<std::array<std::int64_t, 3>> unknowns;  // (row_mu, row_nu, col_lambda)
    std::map<std::array<std::int64_t, 3>, std::size_t> upos;
    for (std::int64_t a = 0; a < dm; ++a)
      for (std::int64_t b = 0; b < dn; ++b)
        for (std::int64_t l = 0; l < dl; ++l)
          if (weight_add(rm->basis_weights[a], rn->basis_weights[b]) == rl->basis_weights[l]) {
            upos[{a, b, l}] = unknowns.size();
            unknowns.push_back({a, b, l});
          }
    std::vector<std::vector<Rat>> rows;
    for (int i : levi)
      for (char t : {'E', 'F'}) {
        const QMat& xm = t == 'E' ? rm->e.at(i) : rm->f.at(i);
        const QMat& xn = t == 'E' ? rn->e.at(i) : rn->f.at(i);
        const QMat& xl = t == 'E' ? rl->e.at(i) : rl->f.at(i);
        // (x (x) I + I (x) x) T - T x = 0
        for (std::int64_t a = 0; a < dm; ++a)
          for (std::int64_t b = 0; b < dn; ++b)
            for (std::int64_t l = 0; l < dl; ++l) {
              std::vector<Rat> row(unknowns.size(), Rat(0));
              bool nontrivial = false;
              for (std::int64_t a2 = 0; a2 < dm; ++a2) {
                if (xm(a, a2) == Rat(0)) continue;
                auto it = upos.find({a2, b, l});
                if (it == upos.end()) continue;
                row[it->second] += xm(a, a2);
                nontrivial = true;
              }
              for (std::int64_t b2 = 0; b2 < dn; ++b2) {
                if (xn(b, b2) == Rat(0)) continue;
                auto it = upos.find({a, b2, l});
                if (it == upos.end()) continue;
                row[it->second] += xn(b, b2);
                nontrivial = true;
              }
              for (std::int64_t l2 = 0; l2 < dl; ++l2) {
                if (xl(l2, l) == Rat(0)) continue;
                auto it = upos.find({a, b, l2});
                if (it == upos.end()) continue;
                row[it->second] -= xl(l2, l);
                nontrivial = true;
              }
              if (nontrivial) rows.push_back(std::move(row));
            }
      }
    QMat sys(rows.size(), unknowns.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < unknowns.size(); ++c) sys(r, c) = rows[r][c];
    QMat null = unknowns.empty() ? QMat(0, 0) : sys.nullspace();
    std::vector<QMat> out;
    for (std::size_t c = 0; c < null.cols(); ++c) {
      QMat t(dm * dn, dl);
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        auto [a, b, l] = unknowns[u];
        t(a * dn + b, l) = null(u, c);
      }
      out.push_back(std::move(t));
    }
    return out;
  }

  std::shared_ptr<const LieContext> ctx_;
  std::int64_t budget_;
  std::mutex mu_;
  std::map<std::pair<std::uint64_t, Weight>, std::shared_ptr<const IrrepRealization>> irreps_;
  std::shared_ptr<ChevalleyBasis> chev_;
  std::map<std::uint64_t, std::shared_ptr<const NilradicalRealization>> nilrads_;
  std::map<HomKey, std::shared_ptr<const HomBasis>> homs_;
  std::map<CgKey, std::shared_ptr<const std::vector<QMat>>> cgs_;
};

/// Expand an equivariant map wedge^2 u (x) M_lambda -> M_mu in the B basis.
/// Exact and consistent by construction; inconsistency is a hard failure.
inline std::vector<Rat> expand_in_basis(const std::vector<QMat>& basis, const QMat& target) {
  if (basis.empty()) {
    if (!target.is_zero()) throw std::logic_error("nonzero element of a zero Hom space");
    return {};
  }
  std::size_t n = target.rows() * target.cols();
  QMat sys(n, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    auto v = basis[c].vec();
    for (std::size_t r = 0; r < n; ++r) sys(r, c) = v[r];
  }
  auto sol = sys.solve(target.vec());
  if (!sol) throw std::logic_error("element does not lie in the Hom-space span");
  return *sol;
}

/// psi_{mu lambda}(a)(e, e') = -a([e, e']): the matrix of one A-basis map
/// pushed into the wedge^2 source.
inline QMat psi_of_map(const NilradicalRealization& nr, const QMat& a, std::int64_t dim_lambda) {
  std::size_t np = nr.pairs.size();
  QMat out(a.rows(), np * dim_lambda);
  for (std::size_t t = 0; t < np; ++t) {
    auto [x, y] = nr.pairs[t];
    for (int c = 0; c < nr.k; ++c) {
      Rat coef = nr.bracket[x][y][c];
      if (coef == 0) continue;
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::int64_t l = 0; l < dim_lambda; ++l)
          out(r, t * dim_lambda + l) -= coef * a(r, c * dim_lambda + l);
    }
  }
  return out;
}

/// psi_{mu nu lambda}(a'' (x) a') = a'' ^ a' evaluated on wedge pairs.
inline QMat psi2_of_maps(const NilradicalRealization& nr, const QMat& a2 /* mu <- nu */,
                         const QMat& a1 /* nu <- lambda */, std::int64_t dim_lambda,
                         std::int64_t dim_nu) {
  std::size_t np = nr.pairs.size();
  QMat out(a2.rows(), np * dim_lambda);
  auto block = [&](const QMat& m, int slot, std::int64_t dcol) {
    QMat b(m.rows(), dcol);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::int64_t c = 0; c < dcol; ++c) b(r, c) = m(r, slot * dcol + c);
    return b;
  };
  for (std::size_t t = 0; t < np; ++t) {
    auto [x, y] = nr.pairs[t];
    QMat term = block(a2, x, dim_nu) * block(a1, y, dim_lambda) -
                block(a2, y, dim_nu) * block(a1, x, dim_lambda);
    for (std::size_t r = 0; r < term.rows(); ++r)
      for (std::int64_t l = 0; l < dim_lambda; ++l) out(r, t * dim_lambda + l) = term(r, l);
  }
  return out;
}

/// Matrix of psi_{mu lambda} in the canonical bases: column k holds the
/// B-coefficients of psi(a^{(k)}).
inline QMat psi_matrix(RealizationContext& rc, const LeviDatum& ld, const Weight& lambda,
                       const Weight& mu) {
  auto nr = rc.nilradical(ld);
  auto ab = rc.hom_basis(ld, lambda, mu, HomSource::U);
  auto bb = rc.hom_basis(ld, lambda, mu, HomSource::Wedge2U);
  std::int64_t dl = rc.irrep(ld.levi_simple, lambda)->dim;
  QMat out(bb->maps.size(), ab->maps.size());
  for (std::size_t k = 0; k < ab->maps.size(); ++k) {
    auto coeffs = expand_in_basis(bb->maps, psi_of_map(*nr, ab->maps[k], dl));
    for (std::size_t p = 0; p < coeffs.size(); ++p) out(p, k) = coeffs[p];
  }
  return out;
}

/// Intermediate vertices nu with n_{nu lambda} > 0 and n_{mu nu} > 0.
inline std::vector<Weight> relation_intermediates(const LeviDatum& ld, const Weight& lambda,
                                                  const Weight& mu) {
  std::vector<Weight> out;
  for (const auto& [nu, c1] : arrow_counts_from(ld, lambda)) {
    if (arrow_count(ld, nu, mu) > 0) out.push_back(nu);
  }
  return out;
}

/// All relations r^{(p)}_{mu lambda}, p = 1..m_{mu lambda}, with exact
/// coefficients in the canonical bases. If a window is supplied, every
/// intermediate vertex must lie inside it.
inline std::vector<Relation> relation_coefficients(RealizationContext& rc, const LeviDatum& ld,
                                                   const Weight& lambda, const Weight& mu,
                                                   const std::vector<Weight>* window = nullptr) {
  auto nr = rc.nilradical(ld);
  auto bb = rc.hom_basis(ld, lambda, mu, HomSource::Wedge2U);
  std::size_t m = bb->maps.size();
  if (m == 0) return {};
  auto intermediates = relation_intermediates(ld, lambda, mu);
  if (window) {
    std::vector<Weight> missing;
    for (const auto& nu : intermediates)
      if (!std::binary_search(window->begin(), window->end(), nu)) missing.push_back(nu);
    if (!missing.empty()) {
      std::string msg = "window misses relation intermediates:";
      for (const auto& nu : missing) msg += " " + weight_to_string(nu);
      throw std::invalid_argument(msg);
    }
  }

  std::vector<Relation> rels(m);
  for (std::size_t p = 0; p < m; ++p) {
    rels[p].tail = lambda;
    rels[p].head = mu;
    rels[p].p = static_cast<int>(p + 1);
  }

  std::int64_t dl = rc.irrep(ld.levi_simple, lambda)->dim;
  auto ab = rc.hom_basis(ld, lambda, mu, HomSource::U);
  for (std::size_t k = 0; k < ab->maps.size(); ++k) {
    auto coeffs = expand_in_basis(bb->maps, psi_of_map(*nr, ab->maps[k], dl));
    for (std::size_t p = 0; p < m; ++p)
      if (coeffs[p] != 0) {
        RelationTerm t;
        t.is_path2 = false;
        t.k = static_cast<int>(k + 1);
        t.coeff = CRat(coeffs[p]);
        rels[p].terms.push_back(std::move(t));
      }
  }
  for (const auto& nu : intermediates) {
    auto a1 = rc.hom_basis(ld, lambda, nu, HomSource::U);
    auto a2 = rc.hom_basis(ld, nu, mu, HomSource::U);
    std::int64_t dn = rc.irrep(ld.levi_simple, nu)->dim;
    for (std::size_t i = 0; i < a1->maps.size(); ++i)
      for (std::size_t j = 0; j < a2->maps.size(); ++j) {
        auto coeffs =
            expand_in_basis(bb->maps, psi2_of_maps(*nr, a2->maps[j], a1->maps[i], dl, dn));
        for (std::size_t p = 0; p < m; ++p)
          if (coeffs[p] != 0) {
            RelationTerm t;
            t.is_path2 = true;
            t.via = nu;
            t.i = static_cast<int>(i + 1);
            t.j = static_cast<int>(j + 1);
            t.coeff = CRat(coeffs[p]);
            rels[p].terms.push_back(std::move(t));
          }
      }
  }
  return rels;
}

/// Relations for every vertex pair of a window with m_{mu lambda} > 0.
/// Two-path terms are enumerated over ALL intermediates (a module supported
/// inside the window evaluates out-of-window paths to zero), so the emitted
/// set is complete for any module living on the window.
inline RelationSet window_relations(RealizationContext& rc, const LeviDatum& ld,
                                    const QuiverData& q) {
  RelationSet out;
  for (const auto& [pair, count] : q.relation_counts) {
    auto rels = relation_coefficients(rc, ld, pair.first, pair.second);
    for (auto& r : rels) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace flagquiver
