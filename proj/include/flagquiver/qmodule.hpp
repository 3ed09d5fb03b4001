#pragma once

// The category of (Q,K)-modules with its Tannakian operations: direct sum,
// dual, tensor product, unit object, fibre functor, morphism spaces,
// relation checking, indecomposability, and the CR2 bracket cross-check.
//
// Conventions pinned here: the twist lines C_lambda are trivialized so that
// the dual of arrow (lambda -> mu, i) is minus the transpose of arrow
// (mu* -> lambda*, i) and double dual is the identity on the nose; tensor
// blocks are ordered lexicographically in (mu, nu, multiplicity index).

#include "flagquiver/realization.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace flagquiver {

struct ArrowKey {
  Weight tail, head;
  int index = 1;
  bool operator<(const ArrowKey& o) const {
    if (tail != o.tail) return tail < o.tail;
    if (head != o.head) return head < o.head;
    return index < o.index;
  }
  bool operator==(const ArrowKey& o) const {
    return tail == o.tail && head == o.head && index == o.index;
  }
};

struct QModule {
  std::shared_ptr<const QuiverData> quiver;
  std::map<Weight, std::int64_t> dims;  // positive entries only
  std::map<ArrowKey, CMat> mats;        // absent arrows are zero

  std::int64_t dim_at(const Weight& v) const {
    auto it = dims.find(v);
    return it == dims.end() ? 0 : it->second;
  }

  CMat mat_or_zero(const ArrowKey& a) const {
    auto it = mats.find(a);
    if (it != mats.end()) return it->second;
    return CMat(dim_at(a.head), dim_at(a.tail));
  }

  bool is_zero() const { return dims.empty(); }

  void validate() const {
    for (const auto& [v, d] : dims) {
      if (d <= 0) throw std::invalid_argument("dims must be positive on the support");
      if (!quiver->has_vertex(v))
        throw std::invalid_argument("module support leaves the quiver window at " +
                                    weight_to_string(v));
    }
    for (const auto& [a, m] : mats) {
      if (quiver->arrows_between(a.tail, a.head) < a.index)
        throw std::invalid_argument("matrix attached to a non-existent arrow");
      if (m.rows() != static_cast<std::size_t>(dim_at(a.head)) ||
          m.cols() != static_cast<std::size_t>(dim_at(a.tail)))
        throw std::invalid_argument("arrow matrix shape mismatch");
    }
  }
};

struct QMorphism {
  std::map<Weight, CMat> components;

  CMat at_or_zero(const Weight& v, std::int64_t rows, std::int64_t cols) const {
    auto it = components.find(v);
    if (it != components.end()) return it->second;
    return CMat(rows, cols);
  }
};

/// Exact intertwining check: phi'_a f_ta = f_ha phi_a on every arrow.
inline bool is_morphism(const QModule& src, const QModule& dst, const QMorphism& f) {
  for (const auto& arrow : src.quiver->arrows) {
    ArrowKey a{arrow.tail, arrow.head, arrow.index};
    std::int64_t st = src.dim_at(a.tail), sh = src.dim_at(a.head);
    std::int64_t dt = dst.dim_at(a.tail), dh = dst.dim_at(a.head);
    if ((st == 0 || dh == 0) && (sh == 0 || dh == 0) && (st == 0 || dt == 0)) continue;
    CMat lhs = dst.mat_or_zero(a) * f.at_or_zero(a.tail, dt, st);
    CMat rhs = f.at_or_zero(a.head, dh, sh) * src.mat_or_zero(a);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

/// The identity object: one dimension at the trivial-character vertex.
inline QModule unit_module(std::shared_ptr<const QuiverData> q) {
  Weight zero = weight_zero(q->rs().rank());
  if (!q->has_vertex(zero))
    throw std::invalid_argument("trivial-character vertex is outside the window");
  QModule m;
  m.quiver = std::move(q);
  m.dims[zero] = 1;
  return m;
}

inline std::int64_t fibre_dim(const QModule& m) {
  std::int64_t total = 0;
  for (const auto& [v, d] : m.dims) total += d * m.quiver->dim_m(v);
  return total;
}

/// lambda* : the isomorphism class of the dual irreducible L-module.
inline Weight dual_vertex(const QuiverData& q, const Weight& lambda) {
  return q.rs().dominant_conjugate(weight_neg(lambda), q.levi_simple);
}

inline QModule direct_sum(const QModule& a, const QModule& b) {
  if (a.quiver != b.quiver) throw std::invalid_argument("direct sum across different quivers");
  QModule out;
  out.quiver = a.quiver;
  std::set<Weight> support;
  for (const auto& [v, d] : a.dims) support.insert(v);
  for (const auto& [v, d] : b.dims) support.insert(v);
  for (const auto& v : support) out.dims[v] = a.dim_at(v) + b.dim_at(v);
  for (const auto& arrow : a.quiver->arrows) {
    ArrowKey k{arrow.tail, arrow.head, arrow.index};
    std::int64_t at = a.dim_at(k.tail), ah = a.dim_at(k.head);
    std::int64_t bt = b.dim_at(k.tail), bh = b.dim_at(k.head);
    if ((at + bt) == 0 || (ah + bh) == 0) continue;
    CMat ma = a.mat_or_zero(k), mb = b.mat_or_zero(k);
    if (ma.is_zero() && mb.is_zero()) continue;
    CMat m(ah + bh, at + bt);
    for (std::int64_t i = 0; i < ah; ++i)
      for (std::int64_t j = 0; j < at; ++j) m(i, j) = ma(i, j);
    for (std::int64_t i = 0; i < bh; ++i)
      for (std::int64_t j = 0; j < bt; ++j) m(ah + i, at + j) = mb(i, j);
    out.mats[k] = std::move(m);
  }
  return out;
}

/// Dual module: dims at lambda* transported back, arrow matrices the negated
/// transposes of the starred-reversed arrows.
inline QModule dual(const QModule& m) {
  const QuiverData& q = *m.quiver;
  QModule out;
  out.quiver = m.quiver;
  for (const auto& [v, d] : m.dims) {
    Weight vd = dual_vertex(q, v);
    if (!q.has_vertex(vd))
      throw std::invalid_argument("window not closed under duals at " + weight_to_string(v));
    out.dims[vd] = d;
  }
  for (const auto& [vd, d] : out.dims) {
    (void)d;
    // arrows out of vd in the dual module
    for (const auto& [pair, n] : q.arrow_mult) {
      if (pair.first != vd) continue;
      const Weight& mu = pair.second;
      if (!out.dims.count(mu)) continue;
      Weight tail_star = dual_vertex(q, mu);
      Weight head_star = dual_vertex(q, vd);
      if (q.arrows_between(tail_star, head_star) != n)
        throw std::logic_error("arrow multiplicities are not dual-symmetric");
      for (int i = 1; i <= n; ++i) {
        ArrowKey src{tail_star, head_star, i};
        auto it = m.mats.find(src);
        if (it == m.mats.end()) continue;
        CMat t = it->second.transpose();
        out.mats[{vd, mu, i}] = -t;
      }
    }
  }
  return out;
}

namespace tensor_detail {

struct Block {
  Weight mu, nu;
  int c;  // 1..C^lambda_{mu nu}
  std::int64_t offset, size;
};

struct Layout {
  std::map<Weight, std::vector<Block>> blocks;  // per result vertex
  std::map<Weight, std::int64_t> dims;
};

inline Layout make_layout(const LieContext& ctx, const Subsystem& levi, const QModule& a,
                          const QModule& b, const QuiverData& q) {
  Layout lay;
  std::vector<Weight> missing;
  for (const auto& [mu, da] : a.dims)
    for (const auto& [nu, db] : b.dims) {
      std::map<Weight, std::int64_t> prods;
      if (levi.empty()) {
        prods[weight_add(mu, nu)] = 1;  // torus: characters multiply
      } else {
        prods = ctx.tensor_decompose(levi, mu, nu);
      }
      for (const auto& [lam, c] : prods) {
        if (!q.has_vertex(lam)) {
          missing.push_back(lam);
          continue;
        }
        for (int k = 1; k <= c; ++k) {
          auto& list = lay.blocks[lam];
          list.push_back({mu, nu, k, 0, da * db});
        }
      }
    }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "tensor product needs vertices outside the window:";
    for (const auto& v : missing) msg += " " + weight_to_string(v);
    throw std::invalid_argument(msg);
  }
  for (auto& [lam, list] : lay.blocks) {
    std::sort(list.begin(), list.end(), [](const Block& x, const Block& y) {
      if (x.mu != y.mu) return x.mu < y.mu;
      if (x.nu != y.nu) return x.nu < y.nu;
      return x.c < y.c;
    });
    std::int64_t off = 0;
    for (auto& blk : list) {
      blk.offset = off;
      off += blk.size;
    }
    lay.dims[lam] = off;
  }
  return lay;
}

/// Expansion data for one Leibniz term: the equivariant map
/// u (x) M_lam -> M_f1 (x) M_f2 written in the canonical basis
/// { iota_{c'} o a^{(i')}_{target lam} } over all arrow targets of lam.
struct LeibnizTerm {
  Weight target;
  int c;  // multiplicity index into C^{target}_{f1 f2}
  int i;  // arrow index lam -> target
  Rat coeff;
};

inline std::vector<LeibnizTerm> expand_leibniz(RealizationContext& rc, const LeviDatum& ld,
                                               const Weight& lam, const Weight& f1,
                                               const Weight& f2, const QMat& big) {
  const Subsystem& levi = ld.levi_simple;
  auto nr = rc.nilradical(ld);
  std::int64_t dl = rc.irrep(levi, lam)->dim;
  std::vector<QMat> basis;
  std::vector<LeibnizTerm> labels;
  for (const auto& [target, n] : arrow_counts_from(ld, lam)) {
    auto cg = rc.cg_injections(levi, f1, f2, target);
    if (cg->empty()) continue;
    auto hb = rc.hom_basis(ld, lam, target, HomSource::U);
    std::int64_t dt = rc.irrep(levi, target)->dim;
    for (std::size_t c2 = 0; c2 < cg->size(); ++c2)
      for (std::size_t i2 = 0; i2 < hb->maps.size(); ++i2) {
        QMat bm(big.rows(), nr->k * dl);
        for (int s = 0; s < nr->k; ++s) {
          QMat slice(dt, dl);
          for (std::int64_t r = 0; r < dt; ++r)
            for (std::int64_t cc = 0; cc < dl; ++cc) slice(r, cc) = hb->maps[i2](r, s * dl + cc);
          QMat comp = (*cg)[c2] * slice;
          for (std::size_t r = 0; r < comp.rows(); ++r)
            for (std::int64_t cc = 0; cc < dl; ++cc) bm(r, s * dl + cc) = comp(r, cc);
        }
        basis.push_back(std::move(bm));
        labels.push_back({target, static_cast<int>(c2 + 1), static_cast<int>(i2 + 1), Rat(0)});
      }
  }
  auto coeffs = expand_in_basis(basis, big);
  std::vector<LeibnizTerm> out;
  for (std::size_t t = 0; t < coeffs.size(); ++t)
    if (coeffs[t] != 0) {
      LeibnizTerm lt = labels[t];
      lt.coeff = coeffs[t];
      out.push_back(std::move(lt));
    }
  return out;
}

}  // namespace tensor_detail

/// Tensor product of (Q,K)-modules. Torus Levis are canonical; otherwise the
/// multiplicity spaces come from the rank<=2 realization machinery and a
/// RealizationContext is required.
inline QModule tensor(const QModule& a, const QModule& b, RealizationContext* rc = nullptr) {
  if (a.quiver != b.quiver) throw std::invalid_argument("tensor across different quivers");
  const QuiverData& q = *a.quiver;
  const LieContext& ctx = *q.ctx;
  bool torus = q.levi_simple.empty();
  if (!torus && rc == nullptr)
    throw std::invalid_argument(
        "tensor over a non-torus Levi requires explicit realizations (rank <= 2)");

  auto lay = tensor_detail::make_layout(ctx, q.levi_simple, a, b, q);
  QModule out;
  out.quiver = a.quiver;
  for (const auto& [lam, d] : lay.dims)
    if (d > 0) out.dims[lam] = d;

  LeviDatum ld;
  std::shared_ptr<const NilradicalRealization> nr;
  if (!torus) {
    ld = levi_datum(q.ctx, q.sigma);
    nr = rc->nilradical(ld);
  }

  // accumulate the Leibniz blocks into the result arrow matrices
  std::map<ArrowKey, CMat> acc;
  auto ensure = [&](const ArrowKey& k) -> CMat& {
    auto it = acc.find(k);
    if (it == acc.end())
      it = acc.emplace(k, CMat(lay.dims.at(k.head), lay.dims.at(k.tail))).first;
    return it->second;
  };
  auto add_block = [&](const ArrowKey& k, std::int64_t roff, std::int64_t coff, const CMat& m,
                       const CRat& scale) {
    if (scale.is_zero() || m.is_zero()) return;
    CMat& target = ensure(k);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!m(i, j).is_zero()) target(roff + i, coff + j) += scale * m(i, j);
  };

  // apply one expanded Leibniz term into the accumulator, or reject when a
  // nonzero term needs a vertex missing from the window
  auto apply_terms = [&](const Weight& lam, const std::vector<tensor_detail::LeibnizTerm>& terms,
                         const Weight& dst_mu, const Weight& dst_nu, const CMat& block,
                         std::int64_t src_offset) {
    if (block.is_zero()) return;
    for (const auto& t : terms) {
      auto dit = lay.blocks.find(t.target);
      if (dit == lay.blocks.end()) {
        if (!q.has_vertex(t.target))
          throw std::invalid_argument("tensor product needs vertex outside the window: " +
                                      weight_to_string(t.target));
        continue;  // in-window vertex with zero result dimension
      }
      for (const auto& db : dit->second)
        if (db.mu == dst_mu && db.nu == dst_nu && db.c == t.c)
          add_block({lam, t.target, t.i}, db.offset, src_offset, block, CRat(t.coeff));
    }
  };

  for (const auto& [lam, src_blocks] : lay.blocks) {
    for (const auto& sb : src_blocks) {
      std::int64_t da = a.dim_at(sb.mu), dbn = b.dim_at(sb.nu);
      if (torus) {
        for (const auto& [w, one] : quiver_u_weights(q)) {
          (void)one;
          Weight head_a = weight_add(sb.mu, w);
          if (a.quiver->has_vertex(head_a) && q.arrows_between(sb.mu, head_a) > 0) {
            CMat phi = a.mat_or_zero({sb.mu, head_a, 1});
            if (!phi.is_zero()) {
              Weight lam2 = weight_add(lam, w);
              if (!lay.dims.count(lam2)) {
                if (!q.has_vertex(lam2))
                  throw std::invalid_argument("tensor product needs vertex outside the window: " +
                                              weight_to_string(lam2));
              } else {
                for (const auto& db : lay.blocks.at(lam2))
                  if (db.mu == head_a && db.nu == sb.nu)
                    add_block({lam, lam2, 1}, db.offset, sb.offset, kron(phi, CMat::identity(dbn)),
                              CRat(1));
              }
            }
          }
          Weight head_b = weight_add(sb.nu, w);
          if (b.quiver->has_vertex(head_b) && q.arrows_between(sb.nu, head_b) > 0) {
            CMat phi = b.mat_or_zero({sb.nu, head_b, 1});
            if (!phi.is_zero()) {
              Weight lam2 = weight_add(lam, w);
              if (!lay.dims.count(lam2)) {
                if (!q.has_vertex(lam2))
                  throw std::invalid_argument("tensor product needs vertex outside the window: " +
                                              weight_to_string(lam2));
              } else {
                for (const auto& db : lay.blocks.at(lam2))
                  if (db.mu == sb.mu && db.nu == head_b)
                    add_block({lam, lam2, 1}, db.offset, sb.offset, kron(CMat::identity(da), phi),
                              CRat(1));
              }
            }
          }
        }
        continue;
      }

      // general rank <= 2 path through the canonical CG injections
      std::int64_t dl = rc->irrep(q.levi_simple, lam)->dim;
      std::int64_t dmu = rc->irrep(q.levi_simple, sb.mu)->dim;
      std::int64_t dnu = rc->irrep(q.levi_simple, sb.nu)->dim;
      auto cg_src = rc->cg_injections(q.levi_simple, sb.mu, sb.nu, lam);
      const QMat& iota_c = (*cg_src)[sb.c - 1];

      // term 1: arrows beta <- mu of the left factor
      for (const auto& [beta, n_a] : arrow_counts_from(ld, sb.mu)) {
        auto hb = rc->hom_basis(ld, sb.mu, beta, HomSource::U);
        std::int64_t dbeta = rc->irrep(q.levi_simple, beta)->dim;
        for (std::size_t i = 0; i < hb->maps.size(); ++i) {
          CMat phi = a.mat_or_zero({sb.mu, beta, static_cast<int>(i + 1)});
          if (phi.is_zero()) continue;
          QMat big(dbeta * dnu, nr->k * dl);
          for (int s = 0; s < nr->k; ++s) {
            QMat ai(dbeta, dmu);
            for (std::int64_t r = 0; r < dbeta; ++r)
              for (std::int64_t cc = 0; cc < dmu; ++cc) ai(r, cc) = hb->maps[i](r, s * dmu + cc);
            QMat comp = kron(ai, QMat::identity(dnu)) * iota_c;
            for (std::int64_t r = 0; r < dbeta * dnu; ++r)
              for (std::int64_t cc = 0; cc < dl; ++cc) big(r, s * dl + cc) = comp(r, cc);
          }
          auto terms = tensor_detail::expand_leibniz(*rc, ld, lam, beta, sb.nu, big);
          apply_terms(lam, terms, beta, sb.nu, kron(phi, CMat::identity(dbn)), sb.offset);
        }
      }

      // term 2: arrows beta' <- nu of the right factor
      for (const auto& [beta2, n_b] : arrow_counts_from(ld, sb.nu)) {
        auto hb = rc->hom_basis(ld, sb.nu, beta2, HomSource::U);
        std::int64_t dbeta2 = rc->irrep(q.levi_simple, beta2)->dim;
        for (std::size_t j = 0; j < hb->maps.size(); ++j) {
          CMat phi = b.mat_or_zero({sb.nu, beta2, static_cast<int>(j + 1)});
          if (phi.is_zero()) continue;
          QMat big(dmu * dbeta2, nr->k * dl);
          for (int s = 0; s < nr->k; ++s) {
            QMat aj(dbeta2, dnu);
            for (std::int64_t r = 0; r < dbeta2; ++r)
              for (std::int64_t cc = 0; cc < dnu; ++cc) aj(r, cc) = hb->maps[j](r, s * dnu + cc);
            QMat comp = kron(QMat::identity(dmu), aj) * iota_c;
            for (std::int64_t r = 0; r < dmu * dbeta2; ++r)
              for (std::int64_t cc = 0; cc < dl; ++cc) big(r, s * dl + cc) = comp(r, cc);
          }
          auto terms = tensor_detail::expand_leibniz(*rc, ld, lam, sb.mu, beta2, big);
          apply_terms(lam, terms, sb.mu, beta2, kron(CMat::identity(da), phi), sb.offset);
        }
      }
    }
  }

  for (auto& [k, m] : acc)
    if (!m.is_zero()) out.mats[k] = std::move(m);
  return out;
}

/// Canonical isomorphism tensor(unit, m) -> m (identity components under the
/// pinned trivializations).
inline QMorphism tensor_unit_iso(const QModule& m) {
  QMorphism f;
  for (const auto& [v, d] : m.dims) f.components[v] = CMat::identity(d);
  return f;
}

/// Dual of a morphism f: M -> N, as N^ -> M^ with components (f_{v*})^T.
inline QMorphism dual_morphism(const QModule& src, const QModule& dst, const QMorphism& f) {
  QMorphism out;
  const QuiverData& q = *src.quiver;
  for (const auto& [v, d] : src.dims) {
    (void)d;
    Weight vd = dual_vertex(q, v);
    CMat comp = f.at_or_zero(v, dst.dim_at(v), src.dim_at(v));
    if (!comp.is_zero()) out.components[vd] = comp.transpose();
  }
  return out;
}

/// f (x) Id_P : tensor(M, P) -> tensor(N, P), acting blockwise as f_mu (x) I.
inline QMorphism tensor_morphism_left(const QModule& m, const QModule& n, const QMorphism& f,
                                      const QModule& p, RealizationContext* rc = nullptr) {
  const QuiverData& q = *m.quiver;
  (void)rc;
  auto lay_src = tensor_detail::make_layout(*q.ctx, q.levi_simple, m, p, q);
  auto lay_dst = tensor_detail::make_layout(*q.ctx, q.levi_simple, n, p, q);
  QMorphism out;
  for (const auto& [lam, src_blocks] : lay_src.blocks) {
    auto dit = lay_dst.blocks.find(lam);
    std::int64_t rows = dit == lay_dst.blocks.end() ? 0 : lay_dst.dims.at(lam);
    if (rows == 0) continue;
    CMat comp(rows, lay_src.dims.at(lam));
    bool nz = false;
    for (const auto& sb : src_blocks) {
      CMat fm = f.at_or_zero(sb.mu, n.dim_at(sb.mu), m.dim_at(sb.mu));
      if (fm.is_zero()) continue;
      for (const auto& db : dit->second) {
        if (db.mu != sb.mu || db.nu != sb.nu || db.c != sb.c) continue;
        CMat blk = kron(fm, CMat::identity(p.dim_at(sb.nu)));
        for (std::size_t i = 0; i < blk.rows(); ++i)
          for (std::size_t j = 0; j < blk.cols(); ++j)
            if (!blk(i, j).is_zero()) {
              comp(db.offset + i, sb.offset + j) = blk(i, j);
              nz = true;
            }
      }
    }
    if (nz) out.components[lam] = std::move(comp);
  }
  return out;
}

/// Evaluate a relation set on a module: exact zero test per relation.
struct RelationViolation {
  Weight tail, head;
  int p;
  CMat value;
};

inline std::vector<RelationViolation> relation_violations(const QModule& m, const RelationSet& rels) {
  std::vector<RelationViolation> out;
  for (const auto& r : rels) {
    std::int64_t dt = m.dim_at(r.tail), dh = m.dim_at(r.head);
    if (dt == 0 || dh == 0) continue;
    CMat total(dh, dt);
    for (const auto& t : r.terms) {
      if (t.coeff.is_zero()) continue;
      if (t.is_path2) {
        if (m.dim_at(t.via) == 0) continue;
        CMat second = m.mat_or_zero({t.via, r.head, t.j});
        CMat first = m.mat_or_zero({r.tail, t.via, t.i});
        CMat prod = second * first;
        prod *= t.coeff;
        total += prod;
      } else {
        CMat direct = m.mat_or_zero({r.tail, r.head, t.k});
        direct *= t.coeff;
        total += direct;
      }
    }
    if (!total.is_zero()) out.push_back({r.tail, r.head, r.p, std::move(total)});
  }
  return out;
}

inline bool check_relations(const QModule& m, const RelationSet& rels) {
  return relation_violations(m, rels).empty();
}

/// Basis of the space of morphisms m -> n (exact nullspace of the
/// intertwining system).
inline std::vector<QMorphism> hom_space(const QModule& m, const QModule& n) {
  if (m.quiver != n.quiver) throw std::invalid_argument("hom across different quivers");
  std::vector<Weight> verts;
  for (const auto& [v, d] : m.dims)
    if (n.dim_at(v) > 0) verts.push_back(v);
  // unknown layout: per vertex, row-major n-dim x m-dim
  std::map<Weight, std::int64_t> offset;
  std::int64_t total = 0;
  for (const auto& v : verts) {
    offset[v] = total;
    total += n.dim_at(v) * m.dim_at(v);
  }
  std::vector<std::vector<CRat>> rows;
  for (const auto& arrow : m.quiver->arrows) {
    ArrowKey a{arrow.tail, arrow.head, arrow.index};
    std::int64_t mt = m.dim_at(a.tail), mh = m.dim_at(a.head);
    std::int64_t nt = n.dim_at(a.tail), nh = n.dim_at(a.head);
    if (mt == 0 || nh == 0) continue;  // constraint rows vanish identically
    CMat phin = n.mat_or_zero(a);
    CMat phim = m.mat_or_zero(a);
    // rows indexed by (r, c) in nh x mt: sum_k phin(r,k) f_tail(k,c) - f_head(r,k) phim(k,c)
    for (std::int64_t r = 0; r < nh; ++r)
      for (std::int64_t c = 0; c < mt; ++c) {
        std::vector<CRat> row(total, CRat(0));
        bool nz = false;
        if (nt > 0)
          for (std::int64_t k = 0; k < nt; ++k) {
            if (phin(r, k).is_zero()) continue;
            row[offset.at(a.tail) + k * mt + c] += phin(r, k);
            nz = true;
          }
        if (mh > 0 && offset.count(a.head))
          for (std::int64_t k = 0; k < mh; ++k) {
            if (phim(k, c).is_zero()) continue;
            row[offset.at(a.head) + r * mh + k] -= phim(k, c);
            nz = true;
          }
        if (nz) rows.push_back(std::move(row));
      }
  }
  CMat sys(rows.size(), total);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::int64_t c = 0; c < total; ++c) sys(r, c) = rows[r][c];
  CMat null = total == 0 ? CMat(0, 0) : sys.nullspace();
  std::vector<QMorphism> out;
  for (std::size_t k = 0; k < null.cols(); ++k) {
    QMorphism f;
    for (const auto& v : verts) {
      std::int64_t nr_ = n.dim_at(v), mc = m.dim_at(v);
      CMat comp(nr_, mc);
      bool nz = false;
      for (std::int64_t i = 0; i < nr_; ++i)
        for (std::int64_t j = 0; j < mc; ++j) {
          comp(i, j) = null(offset.at(v) + i * mc + j, k);
          nz = nz || !comp(i, j).is_zero();
        }
      if (nz) f.components[v] = std::move(comp);
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace end_detail {

/// Flatten an endomorphism over the module's support into one long vector.
inline std::vector<CRat> flatten(const QModule& m, const QMorphism& f) {
  std::vector<CRat> out;
  for (const auto& [v, d] : m.dims) {
    CMat c = f.at_or_zero(v, d, d);
    auto vv = c.vec();
    out.insert(out.end(), vv.begin(), vv.end());
  }
  return out;
}

inline QMorphism compose(const QModule& m, const QMorphism& f, const QMorphism& g) {
  QMorphism out;
  for (const auto& [v, d] : m.dims) {
    CMat c = f.at_or_zero(v, d, d) * g.at_or_zero(v, d, d);
    if (!c.is_zero()) out.components[v] = std::move(c);
  }
  return out;
}

}  // namespace end_detail

/// dim of End(M)/rad(End(M)) via the trace form of the regular
/// representation (Dickson: over a char-0 field the radical is the kernel
/// of (x,y) -> tr L_{xy}).
struct EndAlgebraInfo {
  std::size_t dim = 0;
  std::size_t semisimple_dim = 0;  // dim End / rad
  std::vector<QMorphism> basis;
};

inline EndAlgebraInfo end_algebra(const QModule& m) {
  EndAlgebraInfo info;
  info.basis = hom_space(m, m);
  std::size_t e = info.basis.size();
  info.dim = e;
  if (e == 0) return info;
  std::int64_t total = 0;
  for (const auto& [v, d] : m.dims) total += d * d;
  CMat basis_mat(total, e);
  for (std::size_t k = 0; k < e; ++k) {
    auto v = end_detail::flatten(m, info.basis[k]);
    for (std::int64_t r = 0; r < total; ++r) basis_mat(r, k) = v[r];
  }
  auto expand = [&](const QMorphism& f) {
    auto sol = basis_mat.solve(end_detail::flatten(m, f));
    if (!sol) throw std::logic_error("endomorphism outside its own algebra");
    return *sol;
  };
  // left-multiplication matrices
  std::vector<CMat> lmul(e, CMat(e, e));
  for (std::size_t a = 0; a < e; ++a)
    for (std::size_t b = 0; b < e; ++b) {
      auto coords = expand(end_detail::compose(m, info.basis[a], info.basis[b]));
      for (std::size_t c = 0; c < e; ++c) lmul[a](c, b) = coords[c];
    }
  CMat trace_form(e, e);
  for (std::size_t a = 0; a < e; ++a)
    for (std::size_t b = 0; b < e; ++b) trace_form(a, b) = (lmul[a] * lmul[b]).trace();
  info.semisimple_dim = trace_form.rank();
  return info;
}

/// Indecomposable over C iff End/rad is one-dimensional.
inline bool is_indecomposable(const QModule& m) {
  if (m.is_zero()) return false;
  return end_algebra(m).semisimple_dim == 1;
}

/// CR2 cross-check: assemble tau: u -> End(fibre) from the module's arrow
/// matrices through the canonical Hom bases and test the bracket identity
/// tau([e,e']) = [tau(e), tau(e')] on every basis pair.
struct Cr2Report {
  bool holds = true;
  int first_s = -1, first_t = -1;  // witness pair of u basis indices
  CMat defect;
};

inline Cr2Report verify_cr2(const QModule& m, const LeviDatum& ld, RealizationContext& rc) {
  auto nr = rc.nilradical(ld);
  const Subsystem& levi = ld.levi_simple;

  std::vector<Weight> support;
  for (const auto& [v, d] : m.dims) support.push_back(v);
  std::map<Weight, std::int64_t> offset, mdim;
  std::int64_t total = 0;
  for (const auto& v : support) {
    mdim[v] = rc.irrep(levi, v)->dim;
    offset[v] = total;
    total += m.dim_at(v) * mdim[v];
  }

  std::vector<CMat> tau(nr->k, CMat(total, total));
  for (const auto& tail : support)
    for (const auto& head : support) {
      std::int64_t narr = m.quiver->arrows_between(tail, head);
      if (narr == 0) continue;
      auto hb = rc.hom_basis(ld, tail, head, HomSource::U);
      std::int64_t dt = mdim.at(tail), dh = mdim.at(head);
      for (std::int64_t i = 0; i < narr; ++i) {
        auto it = m.mats.find({tail, head, static_cast<int>(i + 1)});
        if (it == m.mats.end()) continue;
        const CMat& phi = it->second;
        for (int s = 0; s < nr->k; ++s) {
          // A_i(u_s): dh x dt slice
          CMat as(dh, dt);
          bool nz = false;
          for (std::int64_t r = 0; r < dh; ++r)
            for (std::int64_t c = 0; c < dt; ++c) {
              Rat v = hb->maps[i](r, s * dt + c);
              if (v != 0) nz = true;
              as(r, c) = CRat(v);
            }
          if (!nz) continue;
          CMat blk = kron(phi, as);
          for (std::size_t r = 0; r < blk.rows(); ++r)
            for (std::size_t c = 0; c < blk.cols(); ++c)
              if (!blk(r, c).is_zero())
                tau[s](offset.at(head) + r, offset.at(tail) + c) += blk(r, c);
        }
      }
    }

  Cr2Report rep;
  for (int s = 0; s < nr->k && rep.holds; ++s)
    for (int t = s + 1; t < nr->k && rep.holds; ++t) {
      CMat lhs(total, total);
      for (int c = 0; c < nr->k; ++c) {
        Rat coef = nr->bracket[s][t][c];
        if (coef == 0) continue;
        CMat term = tau[c];
        term *= CRat(coef);
        lhs += term;
      }
      CMat rhs = matmul_commutator(tau[s], tau[t]);
      if (!(lhs == rhs)) {
        rep.holds = false;
        rep.first_s = s;
        rep.first_t = t;
        rep.defect = lhs - rhs;
      }
    }
  return rep;
}

}  // namespace flagquiver
