#include "flagquiver/characters.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace flagquiver;

namespace {

// Test-side oracle for sl2 tensor products: Clebsch-Gordan by hand,
// m (x) n = |m-n| + |m-n|+2 + ... + m+n in highest-weight labels.
std::map<Weight, std::int64_t> sl2_tensor_oracle(std::int64_t m, std::int64_t n) {
  std::map<Weight, std::int64_t> out;
  for (std::int64_t k = std::llabs(m - n); k <= m + n; k += 2) out[{k}] = 1;
  return out;
}

}  // namespace

TEST_CASE("weyl dimension: trivial and small cases") {
  LieContext a1(build_root_system('A', 1));
  auto full1 = a1.rs().full_subsystem();
  CHECK(a1.weyl_dim(full1, {0}) == 1);
  CHECK(a1.weyl_dim(full1, {2}) == 3);

  LieContext a2(build_root_system('A', 2));
  auto full2 = a2.rs().full_subsystem();
  CHECK(a2.weyl_dim(full2, {0, 0}) == 1);
  CHECK(a2.weyl_dim(full2, {1, 1}) == 8);
  CHECK(a2.weyl_dim(full2, {1, 0}) == 3);
  CHECK_THROWS(a2.weyl_dim(full2, {-1, 0}));

  LieContext g2(build_root_system('G', 2));
  auto fullg = g2.rs().full_subsystem();
  CHECK(g2.weyl_dim(fullg, {1, 0}) == 7);
  CHECK(g2.weyl_dim(fullg, {0, 1}) == 14);

  LieContext b2(build_root_system('B', 2));
  auto fullb = b2.rs().full_subsystem();
  CHECK(b2.weyl_dim(fullb, {1, 0}) == 5);
  CHECK(b2.weyl_dim(fullb, {0, 1}) == 4);
}

TEST_CASE("freudenthal weight multiplicities") {
  LieContext a1(build_root_system('A', 1));
  auto full1 = a1.rs().full_subsystem();
  auto ch0 = a1.weight_multiplicities(full1, {0});
  CHECK(ch0->size() == 1);
  CHECK(ch0->at({0}) == 1);

  auto ch2 = a1.weight_multiplicities(full1, {2});
  CHECK(ch2->size() == 3);
  CHECK(ch2->at({2}) == 1);
  CHECK(ch2->at({0}) == 1);
  CHECK(ch2->at({-2}) == 1);

  LieContext a2(build_root_system('A', 2));
  auto full2 = a2.rs().full_subsystem();
  auto adj = a2.weight_multiplicities(full2, {1, 1});
  CHECK(adj->at({0, 0}) == 2);  // adjoint of A2: weight 0 has multiplicity 2
  CHECK(multiset_mass(*adj) == 8);
}

TEST_CASE("weyl dimension equals freudenthal mass on random dominant weights") {
  std::mt19937_64 rng(20240811);
  for (const char* name : {"A1", "A2", "B2", "G2"}) {
    LieContext ctx(build_root_system(name));
    auto full = ctx.rs().full_subsystem();
    int n = ctx.rank();
    for (int trial = 0; trial < 50; ++trial) {
      Weight lambda(n, 0);
      int budget = 6;
      for (int i = 0; i < n; ++i) {
        std::int64_t c = static_cast<std::int64_t>(rng() % (budget + 1));
        lambda[i] = c;
        budget -= static_cast<int>(c);
      }
      auto mass = multiset_mass(*ctx.weight_multiplicities(full, lambda));
      CHECK(mass == ctx.weyl_dim(full, lambda));
    }
  }
}

TEST_CASE("tensor decomposition: klimyk against oracles") {
  LieContext a1(build_root_system('A', 1));
  auto full1 = a1.rs().full_subsystem();

  // unit object
  auto u = a1.tensor_decompose(full1, {5}, {0});
  CHECK(u.size() == 1);
  CHECK(u.at({5}) == 1);

  // 1 (x) 1 = 2 + 0
  auto t = a1.tensor_decompose(full1, {1}, {1});
  CHECK(t == sl2_tensor_oracle(1, 1));

  for (std::int64_t m = 0; m <= 4; ++m)
    for (std::int64_t n = 0; n <= 4; ++n)
      CHECK(a1.tensor_decompose(full1, {m}, {n}) == sl2_tensor_oracle(m, n));

  // A2: 3 (x) 3bar = 8 + 1
  LieContext a2(build_root_system('A', 2));
  auto full2 = a2.rs().full_subsystem();
  auto d = a2.tensor_decompose(full2, {1, 0}, {0, 1});
  CHECK(d.size() == 2);
  CHECK(d.at({1, 1}) == 1);
  CHECK(d.at({0, 0}) == 1);
}

TEST_CASE("tensor decomposition: symmetry and dimension identity") {
  std::mt19937_64 rng(77);
  for (const char* name : {"A2", "B2", "G2"}) {
    LieContext ctx(build_root_system(name));
    auto full = ctx.rs().full_subsystem();
    for (int trial = 0; trial < 8; ++trial) {
      Weight lam{static_cast<std::int64_t>(rng() % 3), static_cast<std::int64_t>(rng() % 3)};
      Weight mu{static_cast<std::int64_t>(rng() % 3), static_cast<std::int64_t>(rng() % 3)};
      auto ab = ctx.tensor_decompose(full, lam, mu);
      auto ba = ctx.tensor_decompose(full, mu, lam);
      CHECK(ab == ba);
      std::int64_t total = 0;
      for (const auto& [nu, c] : ab) total += c * ctx.weyl_dim(full, nu);
      CHECK(total == ctx.weyl_dim(full, lam) * ctx.weyl_dim(full, mu));
    }
  }
}

TEST_CASE("tensor decomposition on a Levi carries central charge") {
  LieContext a2(build_root_system('A', 2));
  Subsystem levi{1};  // Levi of Sigma = {alpha_1}
  // 1-dim central characters multiply additively.
  Weight x{3, 0}, y{-2, 0};
  auto d = a2.tensor_decompose(levi, x, y);
  REQUIRE(d.size() == 1);
  CHECK(d.begin()->first == Weight{1, 0});
}

TEST_CASE("character decomposition by peel-off") {
  LieContext a2(build_root_system('A', 2));
  auto full = a2.rs().full_subsystem();

  auto ch = a2.weight_multiplicities(full, {1, 1});
  auto dec = a2.decompose_character(full, *ch);
  REQUIRE(dec.size() == 1);
  CHECK(dec[0].first == Weight{1, 1});
  CHECK(dec[0].second == 1);

  // torus Levi: every weight is its own character
  Subsystem torus{};
  WeightMultiset m{{{2, -1}, 2}, {{0, 1}, 1}};
  auto dect = a2.decompose_character(torus, m);
  CHECK(dect.size() == 2);

  // the two u-weights for Sigma={alpha_1} form a single alpha_2-string
  Subsystem levi{1};
  WeightMultiset ustr;
  Weight a1root = a2.rs().simple_root(0);
  Weight a12 = weight_add(a1root, a2.rs().simple_root(1));
  multiset_add(ustr, weight_neg(a1root), 1);
  multiset_add(ustr, weight_neg(a12), 1);
  auto decl = a2.decompose_character(levi, ustr);
  REQUIRE(decl.size() == 1);
  CHECK(decl[0].second == 1);
  CHECK(a2.weyl_dim(levi, decl[0].first) == 2);

  // sums of two characters decompose back
  auto c1 = a2.weight_multiplicities(full, {1, 0});
  auto c2 = a2.weight_multiplicities(full, {0, 1});
  WeightMultiset sum;
  for (const auto& [w, k] : *c1) multiset_add(sum, w, k);
  for (const auto& [w, k] : *c2) multiset_add(sum, w, 2 * k);
  auto decs = a2.decompose_character(full, sum);
  REQUIRE(decs.size() == 2);
  for (const auto& [w, k] : decs) CHECK(k == (w == Weight{0, 1} ? 2 : 1));

  // an invalid multiset is rejected
  WeightMultiset bad{{{1, 0}, 1}};
  CHECK_THROWS_AS(a2.decompose_character(full, bad), std::invalid_argument);
}

TEST_CASE("exterior square of characters") {
  WeightMultiset line{{{3}, 1}};
  CHECK(exterior_square(line).empty());

  WeightMultiset two{{{1}, 1}, {{4}, 1}};
  auto e = exterior_square(two);
  REQUIRE(e.size() == 1);
  CHECK(e.at({5}) == 1);

  // A2 Borel nilradical {-a1, -a2, -a1-a2}
  RootSystem a2 = build_root_system('A', 2);
  WeightMultiset nil;
  Weight r1 = a2.simple_root(0), r2 = a2.simple_root(1);
  multiset_add(nil, weight_neg(r1), 1);
  multiset_add(nil, weight_neg(r2), 1);
  multiset_add(nil, weight_neg(weight_add(r1, r2)), 1);
  auto e2 = exterior_square(nil);
  CHECK(multiset_mass(e2) == 3);
  CHECK(e2.count(weight_neg(weight_add(r1, r2))) == 1);
  CHECK(e2.count(weight_neg(weight_add(weight_add(r1, r1), r2))) == 1);
  CHECK(e2.count(weight_neg(weight_add(r1, weight_add(r2, r2)))) == 1);

  // mass law |∧² ch| = d(d-1)/2 on a multiset with multiplicities
  WeightMultiset m{{{0, 0}, 3}, {{1, 0}, 2}};
  CHECK(multiset_mass(exterior_square(m)) == 5 * 4 / 2);
}
