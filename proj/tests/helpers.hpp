#pragma once

// Shared test fixtures: canonical windows and seeded random modules.

#include "flagquiver/qmodule.hpp"

#include <memory>
#include <optional>
#include <random>

namespace fqtest {

using namespace flagquiver;

inline std::shared_ptr<LieContext> ctx_of(const char* name) {
  return std::make_shared<LieContext>(build_root_system(name));
}

struct Fixture {
  std::shared_ptr<LieContext> ctx;
  LeviDatum ld;
  std::shared_ptr<QuiverData> quiver;
};

/// A1 Borel window covering both parity chains, symmetric under negation:
/// even part {0,+-2,...}, odd part {+-1,+-3,...}.
inline Fixture a1_chain(int radius = 3) {
  Fixture f;
  f.ctx = ctx_of("A1");
  f.ld = levi_datum(f.ctx, {0});
  f.quiver = std::make_shared<QuiverData>(
      build_quiver_window(f.ld, {{0}, {1}, {-1}}, radius));
  return f;
}

/// A2 Borel window symmetric under negation and wide enough for pairwise
/// tensor products of the diamond {0, -a1, -a2, -a1-a2}.
inline Fixture a2_borel(int radius = 1) {
  Fixture f;
  f.ctx = ctx_of("A2");
  f.ld = levi_datum(f.ctx, {0, 1});
  Weight r1 = f.ctx->rs().simple_root(0), r2 = f.ctx->rs().simple_root(1);
  Weight c = weight_add(r1, r2);
  std::vector<Weight> seeds{weight_zero(2), r1,  weight_neg(r1), r2,
                            weight_neg(r2), c,   weight_neg(c)};
  f.quiver = std::make_shared<QuiverData>(build_quiver_window(f.ld, seeds, radius));
  return f;
}

/// The four-vertex diamond support inside an A2 Borel window.
inline std::vector<Weight> a2_diamond_support(const Fixture& f) {
  Weight r1 = f.ctx->rs().simple_root(0), r2 = f.ctx->rs().simple_root(1);
  return {weight_zero(2), weight_neg(r1), weight_neg(r2), weight_neg(weight_add(r1, r2))};
}

/// A2 with Sigma = {alpha_1}: abelian nilradical, non-torus Levi.
inline Fixture a2_abelian(const std::vector<Weight>& seeds, int radius) {
  Fixture f;
  f.ctx = ctx_of("A2");
  f.ld = levi_datum(f.ctx, {0});
  f.quiver = std::make_shared<QuiverData>(build_quiver_window(f.ld, seeds, radius));
  return f;
}

inline CRat random_entry(std::mt19937_64& rng, bool complex_entries = false) {
  auto small = [&]() { return Rat(static_cast<long>(rng() % 5) - 2); };
  if (complex_entries) return CRat(small(), small());
  return CRat(small());
}

/// Random module with dims in 1..dim_max on the given support (default: the
/// whole window) and small random integer (or Gaussian-integer) entries.
inline QModule random_module(const std::shared_ptr<QuiverData>& q, std::mt19937_64& rng,
                             int dim_max = 2, bool complex_entries = false,
                             const std::vector<Weight>* support = nullptr) {
  QModule m;
  m.quiver = q;
  const std::vector<Weight>& verts = support ? *support : q->vertices;
  for (const auto& v : verts) m.dims[v] = 1 + static_cast<std::int64_t>(rng() % dim_max);
  for (const auto& arrow : q->arrows) {
    std::int64_t dt = m.dim_at(arrow.tail), dh = m.dim_at(arrow.head);
    if (dt == 0 || dh == 0) continue;
    CMat mat(dh, dt);
    bool nz = false;
    for (std::int64_t i = 0; i < dh; ++i)
      for (std::int64_t j = 0; j < dt; ++j) {
        mat(i, j) = random_entry(rng, complex_entries);
        nz = nz || !mat(i, j).is_zero();
      }
    if (nz) m.mats[{arrow.tail, arrow.head, arrow.index}] = std::move(mat);
  }
  return m;
}

/// Restriction of a full-group irrep M_Lambda to the Borel as a quiver
/// module: dims are weight multiplicities, arrows the Chevalley-normalized
/// root-vector blocks. These satisfy every emitted relation (they are
/// honest P-representations). Throws when the support leaves the window.
inline QModule restrict_g_irrep(const Fixture& f, const Weight& hw) {
  const RootSystem& rs = f.ctx->rs();
  if (!f.quiver->levi_simple.empty())
    throw std::invalid_argument("restriction helper assumes a Borel window");
  auto full = rs.full_subsystem();
  IrrepRealization rep = build_irrep(*f.ctx, full, hw, 64);
  auto [es, fs] = root_vector_matrices(*f.ctx, rep);

  QModule m;
  m.quiver = f.quiver;
  std::map<Weight, std::vector<std::int64_t>> slots;  // weight -> basis rows
  for (std::int64_t i = 0; i < rep.dim; ++i) slots[rep.basis_weights[i]].push_back(i);
  for (const auto& [w, rows] : slots) {
    if (!f.quiver->has_vertex(w))
      throw std::invalid_argument("irrep support leaves the window at " + weight_to_string(w));
    m.dims[w] = static_cast<std::int64_t>(rows.size());
  }
  const auto& pos = rs.positive_roots();
  for (std::size_t k = 0; k < pos.size(); ++k) {
    Weight step = weight_neg(pos[k].fund);
    for (const auto& [w, cols] : slots) {
      Weight head = weight_add(w, step);
      auto hit = slots.find(head);
      if (hit == slots.end()) continue;
      if (f.quiver->arrows_between(w, head) == 0) continue;
      CMat blk(hit->second.size(), cols.size());
      bool nz = false;
      for (std::size_t r = 0; r < hit->second.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) {
          Rat v = fs[k](hit->second[r], cols[c]);
          blk(r, c) = CRat(v);
          nz = nz || v != 0;
        }
      if (nz) m.mats[{w, head, 1}] = std::move(blk);
    }
  }
  return m;
}

/// Random basis change at every vertex (unipotent integer matrices, exactly
/// invertible): produces an isomorphic module with messier matrices.
inline QModule conjugate_module(const QModule& m, std::mt19937_64& rng) {
  std::map<Weight, CMat> g, ginv;
  for (const auto& [v, d] : m.dims) {
    CMat u = CMat::identity(d);
    for (std::int64_t i = 0; i < d; ++i)
      for (std::int64_t j = i + 1; j < d; ++j) u(i, j) = random_entry(rng);
    g[v] = u;
    ginv[v] = u.inverse();
  }
  QModule out;
  out.quiver = m.quiver;
  out.dims = m.dims;
  for (const auto& [k, mat] : m.mats) {
    CMat t = g.at(k.head) * mat * ginv.at(k.tail);
    if (!t.is_zero()) out.mats[k] = std::move(t);
  }
  return out;
}

/// Overwrite the direct arrows so that every emitted relation holds: each
/// relation is linear in its direct-arrow term with invertible coefficient.
inline void solve_relations_into(QModule& m, const RelationSet& rels) {
  for (const auto& r : rels) {
    std::int64_t dt = m.dim_at(r.tail), dh = m.dim_at(r.head);
    if (dt == 0 || dh == 0) continue;
    CRat direct_coeff;
    int direct_k = -1;
    CMat rest(dh, dt);
    for (const auto& t : r.terms) {
      if (!t.is_path2) {
        direct_coeff = t.coeff;
        direct_k = t.k;
        continue;
      }
      if (m.dim_at(t.via) == 0) continue;
      CMat prod = m.mat_or_zero({t.via, r.head, t.j}) * m.mat_or_zero({r.tail, t.via, t.i});
      prod *= t.coeff;
      rest += prod;
    }
    if (direct_k < 0) continue;
    CMat solved = rest;
    solved *= (CRat(-1) / direct_coeff);
    if (solved.is_zero()) m.mats.erase({r.tail, r.head, direct_k});
    else m.mats[{r.tail, r.head, direct_k}] = std::move(solved);
  }
}

}  // namespace fqtest
