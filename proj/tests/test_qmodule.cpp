#include "flagquiver/qmodule.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <random>

using namespace flagquiver;
using fqtest::Fixture;

namespace {

QModule a1_standard(const Fixture& f) {
  // dims 1 at {1, -1}, phi = (1)
  QModule m;
  m.quiver = f.quiver;
  m.dims[{1}] = 1;
  m.dims[{-1}] = 1;
  CMat phi(1, 1);
  phi(0, 0) = CRat(1);
  m.mats[{{1}, {-1}, 1}] = phi;
  return m;
}

}  // namespace

TEST_CASE("unit object") {
  auto f = fqtest::a1_chain();
  QModule one = unit_module(f.quiver);
  one.validate();
  CHECK(fibre_dim(one) == 1);
  CHECK(one.dim_at({0}) == 1);

  QModule onedual = dual(one);
  CHECK(onedual.dims == one.dims);
  CHECK(onedual.mats.empty());

  QModule m = a1_standard(f);
  QModule um = tensor(one, m);
  CHECK(um.dims == m.dims);
  for (const auto& [k, mat] : m.mats) CHECK(um.mat_or_zero(k) == mat);
  QMorphism iso = tensor_unit_iso(m);
  CHECK(is_morphism(um, m, iso));
}

TEST_CASE("dual: A1 standard module and involutivity") {
  auto f = fqtest::a1_chain();
  QModule m = a1_standard(f);
  QModule d = dual(m);
  CHECK(d.dim_at({1}) == 1);
  CHECK(d.dim_at({-1}) == 1);
  CMat expect(1, 1);
  expect(0, 0) = CRat(-1);
  CHECK(d.mat_or_zero({{1}, {-1}, 1}) == expect);
  CHECK(fibre_dim(d) == fibre_dim(m));

  QModule dd = dual(d);
  CHECK(dd.dims == m.dims);
  for (const auto& [k, mat] : m.mats) CHECK(dd.mat_or_zero(k) == mat);
}

TEST_CASE("dual dual is the identity on random modules") {
  std::mt19937_64 rng(31415);
  auto f1 = fqtest::a1_chain();
  auto f2 = fqtest::a2_borel(1);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& f : {f1, f2}) {
      QModule m = fqtest::random_module(f.quiver, rng, 2, true);
      QModule dd = dual(dual(m));
      CHECK(dd.dims == m.dims);
      for (const auto& [k, mat] : m.mats) CHECK(dd.mat_or_zero(k) == mat);
      for (const auto& [k, mat] : dd.mats) CHECK(m.mat_or_zero(k) == mat);
      CHECK(fibre_dim(dd) == fibre_dim(m));
    }
  }
}

TEST_CASE("tensor: A1 standard squared reproduces the Leibniz blocks") {
  auto f = fqtest::a1_chain();
  QModule m = a1_standard(f);
  QModule t = tensor(m, m);
  CHECK(t.dim_at({2}) == 1);
  CHECK(t.dim_at({0}) == 2);
  CHECK(t.dim_at({-2}) == 1);
  CHECK(fibre_dim(t) == 4);

  // blocks of U_0 ordered (-1,1) then (1,-1); the M-factor moves into the
  // (-1,1) block, the N-factor into (1,-1)
  CMat top = t.mat_or_zero({{2}, {0}, 1});
  REQUIRE(top.rows() == 2);
  CHECK(top(0, 0) == CRat(1));
  CHECK(top(1, 0) == CRat(1));
  CMat bottom = t.mat_or_zero({{0}, {-2}, 1});
  REQUIRE(bottom.cols() == 2);
  CHECK(bottom(0, 0) == CRat(1));
  CHECK(bottom(0, 1) == CRat(1));
}

TEST_CASE("fibre dimension is multiplicative and additive") {
  std::mt19937_64 rng(999);
  auto f = fqtest::a2_borel(1);
  auto diamond = fqtest::a2_diamond_support(f);
  for (int trial = 0; trial < 10; ++trial) {
    QModule a = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
    QModule b = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
    QModule s = direct_sum(a, b);
    CHECK(fibre_dim(s) == fibre_dim(a) + fibre_dim(b));
    QModule t = tensor(a, b);
    CHECK(fibre_dim(t) == fibre_dim(a) * fibre_dim(b));
  }
}

TEST_CASE("check_relations: solved diamond modules and broken ones") {
  auto f = fqtest::a2_borel(1);
  RealizationContext rc(f.ctx);
  auto diamond = fqtest::a2_diamond_support(f);
  Weight c = weight_neg(diamond[3]);  // alpha_1 + alpha_2
  auto rels = relation_coefficients(rc, f.ld, weight_zero(2), diamond[3]);
  REQUIRE(rels.size() == 1);

  std::mt19937_64 rng(7);
  QModule m = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
  fqtest::solve_relations_into(m, rels);
  CHECK(check_relations(m, rels));

  // zero the direct arrow: the violation is exactly the two-path block
  const Relation& r = rels[0];
  int direct_k = -1;
  for (const auto& t : r.terms)
    if (!t.is_path2) direct_k = t.k;
  REQUIRE(direct_k > 0);
  QModule broken = m;
  CMat before = broken.mat_or_zero({r.tail, r.head, direct_k});
  broken.mats.erase({r.tail, r.head, direct_k});
  auto viol = relation_violations(broken, rels);
  if (before.is_zero()) CHECK(viol.empty());
  else {
    REQUIRE(viol.size() == 1);
    CHECK(!viol[0].value.is_zero());
  }
}

TEST_CASE("restricted G-irreps satisfy the full relation set") {
  auto f = fqtest::a2_borel(1);
  RealizationContext rc(f.ctx);
  RelationSet rels = window_relations(rc, f.ld, *f.quiver);
  REQUIRE(!rels.empty());

  QModule adj = fqtest::restrict_g_irrep(f, {1, 1});
  CHECK(fibre_dim(adj) == 8);
  CHECK(adj.dim_at(weight_zero(2)) == 2);
  CHECK(check_relations(adj, rels));

  QModule ten = fqtest::restrict_g_irrep(f, {3, 0});
  CHECK(fibre_dim(ten) == 10);
  CHECK(check_relations(ten, rels));

  std::mt19937_64 rng(4242);
  QModule twisted = fqtest::conjugate_module(adj, rng);
  CHECK(check_relations(twisted, rels));
}

TEST_CASE("hom spaces and endomorphism algebras") {
  auto f = fqtest::a1_chain();
  QModule one = unit_module(f.quiver);
  CHECK(hom_space(one, one).size() == 1);

  QModule m = a1_standard(f);
  auto endm = end_algebra(m);
  CHECK(endm.dim == 1);  // End = scalars
  CHECK(is_indecomposable(m));

  QModule mm = direct_sum(m, m);
  auto endmm = end_algebra(mm);
  CHECK(endmm.dim == 4);
  CHECK(endmm.semisimple_dim == 4);
  CHECK(!is_indecomposable(mm));

  // one arrow with phi = 0 between two lines decomposes
  QModule split;
  split.quiver = f.quiver;
  split.dims[{1}] = 1;
  split.dims[{-1}] = 1;
  CHECK(!is_indecomposable(split));

  // two isolated lines at the same vertex: decomposable
  QModule iso2;
  iso2.quiver = f.quiver;
  iso2.dims[{0}] = 2;
  CHECK(!is_indecomposable(iso2));
}

TEST_CASE("morphism functoriality: duals and tensoring by identity") {
  std::mt19937_64 rng(2024);
  auto f = fqtest::a2_borel(1);
  auto diamond = fqtest::a2_diamond_support(f);
  int tested = 0;
  for (int trial = 0; trial < 12; ++trial) {
    QModule m = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
    QModule n = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
    auto homs = hom_space(m, n);
    if (homs.empty()) continue;
    const QMorphism& fm = homs[rng() % homs.size()];
    REQUIRE(is_morphism(m, n, fm));

    QModule md = dual(m), nd = dual(n);
    QMorphism fd = dual_morphism(m, n, fm);
    CHECK(is_morphism(nd, md, fd));

    QModule p = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
    QModule mp = tensor(m, p), np = tensor(n, p);
    QMorphism fp = tensor_morphism_left(m, n, fm, p);
    CHECK(is_morphism(mp, np, fp));
    ++tested;
  }
  CHECK(tested > 0);
}

TEST_CASE("relation closure under dual, tensor and direct sum") {
  std::mt19937_64 rng(555);
  auto f = fqtest::a2_borel(1);
  RealizationContext rc(f.ctx);
  RelationSet rels = window_relations(rc, f.ld, *f.quiver);
  REQUIRE(!rels.empty());

  QModule adj = fqtest::restrict_g_irrep(f, {1, 1});
  for (int trial = 0; trial < 6; ++trial) {
    QModule a = fqtest::conjugate_module(adj, rng);
    QModule b = trial % 2 == 0 ? fqtest::conjugate_module(adj, rng)
                               : direct_sum(unit_module(f.quiver), fqtest::conjugate_module(adj, rng));
    REQUIRE(check_relations(a, rels));
    REQUIRE(check_relations(b, rels));

    CHECK(check_relations(dual(a), rels));
    CHECK(check_relations(direct_sum(a, b), rels));
    QModule t = tensor(a, b);
    CHECK(fibre_dim(t) == fibre_dim(a) * fibre_dim(b));
    CHECK(check_relations(t, rels));
  }
}

TEST_CASE("cr2 equivalence with relation checking") {
  auto f = fqtest::a2_borel(1);
  RealizationContext rc(f.ctx);
  RelationSet rels = window_relations(rc, f.ld, *f.quiver);
  auto diamond = fqtest::a2_diamond_support(f);

  std::mt19937_64 rng(20240810);
  int agree_true = 0, agree_false = 0;
  QModule adj = fqtest::restrict_g_irrep(f, {1, 1});
  for (int trial = 0; trial < 50; ++trial) {
    QModule m;
    if (trial % 3 == 0) m = fqtest::conjugate_module(adj, rng);
    else if (trial % 3 == 1) {
      m = fqtest::random_module(f.quiver, rng, 2, false, &diamond);
      fqtest::solve_relations_into(m, rels);
    } else {
      m = fqtest::random_module(f.quiver, rng, 2, true);
    }
    bool by_relations = check_relations(m, rels);
    auto rep = verify_cr2(m, f.ld, rc);
    CHECK(by_relations == rep.holds);
    (by_relations ? agree_true : agree_false)++;
  }
  CHECK(agree_true > 0);
  CHECK(agree_false > 0);

  // A1 Borel: u is one-dimensional, CR2 always holds
  auto f1 = fqtest::a1_chain();
  RealizationContext rc1(f1.ctx);
  QModule m1 = fqtest::random_module(f1.quiver, rng, 2, true);
  CHECK(verify_cr2(m1, f1.ld, rc1).holds);
}

TEST_CASE("tensor over a non-torus Levi via explicit realizations") {
  // Sigma = {alpha_1}: Levi has a semisimple SL2 factor
  std::vector<Weight> seeds{{0, 0}};
  auto f = fqtest::a2_abelian(seeds, 2);
  RealizationContext rc(f.ctx);

  CHECK_THROWS_AS(tensor(unit_module(f.quiver), unit_module(f.quiver)), std::invalid_argument);

  QModule one = unit_module(f.quiver);
  QModule t0 = tensor(one, one, &rc);
  CHECK(fibre_dim(t0) == 1);

  // support closed under pairwise Levi tensor products inside the window:
  // (-2,1) is the u-string vertex (2-dim Levi irrep)
  std::vector<Weight> support{{0, 0}, {-2, 1}};
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    QModule a = fqtest::random_module(f.quiver, rng, 2, false, &support);
    QModule b = fqtest::random_module(f.quiver, rng, 2, false, &support);
    QModule t = tensor(a, b, &rc);
    t.validate();
    CHECK(fibre_dim(t) == fibre_dim(a) * fibre_dim(b));
    QModule s = tensor(b, a, &rc);
    CHECK(fibre_dim(s) == fibre_dim(t));
  }
}
