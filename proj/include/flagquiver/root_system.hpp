#pragma once

// Based root datum of a simple or semisimple Lie algebra: Cartan matrix,
// positive roots (built by root-string closure), symmetrizer, and the
// induced bilinear form on the weight lattice. Convention:
//   cartan(i,j) = <alpha_j, alpha_i^vee>,
// so a weight's i-th fundamental coordinate is its pairing with alpha_i^vee.

#include "flagquiver/matrix.hpp"
#include "flagquiver/rational.hpp"
#include "flagquiver/weight.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace flagquiver {

struct SimpleFactor {
  char series;  // one of A B C D E F G
  int rank;
};

struct Root {
  std::vector<std::int64_t> simple;  // coordinates in the simple-root basis
  Weight fund;                       // same root in fundamental coordinates
  Rat half_norm;                     // (alpha, alpha)/2 in the symmetrizer scale
  int height() const {
    std::int64_t h = 0;
    for (auto c : simple) h += c;
    return static_cast<int>(h);
  }
};

class RootSystem {
 public:
  RootSystem(std::vector<SimpleFactor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("empty group spec");
    rank_ = 0;
    for (const auto& f : factors_) {
      validate_factor(f);
      rank_ += f.rank;
    }
    cartan_.assign(rank_, std::vector<std::int64_t>(rank_, 0));
    symmetrizer_.assign(rank_, Rat(1));
    int off = 0;
    for (const auto& f : factors_) {
      fill_factor(f, off);
      off += f.rank;
    }
    build_positive_roots();
    build_weight_form();
  }

  int rank() const { return rank_; }
  const std::vector<SimpleFactor>& factors() const { return factors_; }
  const std::vector<std::vector<std::int64_t>>& cartan_matrix() const { return cartan_; }
  std::int64_t cartan(int i, int j) const { return cartan_[i][j]; }
  const std::vector<Rat>& symmetrizer() const { return symmetrizer_; }
  const std::vector<Root>& positive_roots() const { return positive_roots_; }

  Weight fundamental_weight(int i) const {
    Weight w(rank_, 0);
    w[i] = 1;
    return w;
  }

  Weight simple_root(int i) const {
    Weight w(rank_, 0);
    for (int j = 0; j < rank_; ++j) w[j] = cartan_[j][i];
    return w;
  }

  /// <w, alpha^vee> for a root alpha given in simple-root coordinates.
  Rat pairing(const Weight& w, const Root& alpha) const {
    check_weight(w);
    Rat num(0);
    for (int i = 0; i < rank_; ++i)
      if (alpha.simple[i] != 0) num += Rat(alpha.simple[i]) * symmetrizer_[i] * Rat(w[i]);
    return num / alpha.half_norm;
  }

  /// Killing-scale inner product of two weights, w^T G w'.
  Rat inner(const Weight& a, const Weight& b) const {
    check_weight(a);
    check_weight(b);
    Rat s(0);
    for (int i = 0; i < rank_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < rank_; ++j)
        if (b[j] != 0) s += Rat(a[i]) * weight_form_(i, j) * Rat(b[j]);
    }
    return s;
  }

  /// (w, alpha) for a root: cheaper than inner() via the symmetrizer.
  Rat inner_with_root(const Weight& w, const Root& alpha) const {
    Rat s(0);
    for (int i = 0; i < rank_; ++i)
      if (alpha.simple[i] != 0) s += Rat(alpha.simple[i]) * symmetrizer_[i] * Rat(w[i]);
    return s;
  }

  /// Simple reflection s_i acting on the weight lattice.
  Weight reflect(const Weight& w, int i) const {
    Weight v = w;
    std::int64_t wi = w[i];
    if (wi == 0) return v;
    for (int j = 0; j < rank_; ++j) v[j] -= wi * cartan_[j][i];
    return v;
  }

  bool is_dominant(const Weight& w, const std::vector<int>& subsystem) const {
    for (int i : subsystem)
      if (w[i] < 0) return false;
    return true;
  }

  std::vector<int> full_subsystem() const {
    std::vector<int> s(rank_);
    for (int i = 0; i < rank_; ++i) s[i] = i;
    return s;
  }

  /// rho of a subsystem: sum of its fundamental weights.
  Weight rho(const std::vector<int>& subsystem) const {
    Weight r(rank_, 0);
    for (int i : subsystem) r[i] = 1;
    return r;
  }

  struct ShiftedDominant {
    bool singular = false;
    Weight weight;  // dominant representative (shift removed)
    int sign = 1;   // det of the Weyl element used
  };

  /// Dominant representative under the rho-shifted action of the subsystem's
  /// Weyl group: w -> s*(w+rho) - rho. Reports the sign of the Weyl element,
  /// or singular when w+rho lies on a wall.
  ShiftedDominant dominant_conjugate_shifted(const Weight& w, const std::vector<int>& subsystem) const {
    ShiftedDominant out;
    Weight v = weight_add(w, rho(subsystem));
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i : subsystem) {
        if (v[i] == 0) {
          out.singular = true;
          return out;
        }
        if (v[i] < 0) {
          v = reflect(v, i);
          out.sign = -out.sign;
          moved = true;
        }
      }
    }
    out.weight = weight_sub(v, rho(subsystem));
    return out;
  }

  /// Dominant representative under the plain (unshifted) action.
  Weight dominant_conjugate(const Weight& w, const std::vector<int>& subsystem) const {
    Weight v = w;
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i : subsystem)
        if (v[i] < 0) {
          v = reflect(v, i);
          moved = true;
        }
    }
    return v;
  }

  /// Full Weyl orbit of a weight under the subsystem's Weyl group.
  std::vector<Weight> weyl_orbit(const Weight& w, const std::vector<int>& subsystem) const {
    std::set<Weight> seen;
    std::vector<Weight> queue{dominant_conjugate(w, subsystem)};
    seen.insert(queue[0]);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      Weight cur = queue[q];
      for (int i : subsystem) {
        Weight r = reflect(cur, i);
        if (seen.insert(r).second) queue.push_back(r);
      }
    }
    return queue;
  }

  /// Positive roots lying in the span of the given simple roots.
  std::vector<Root> positive_roots_of(const std::vector<int>& subsystem) const {
    std::vector<bool> in(rank_, false);
    for (int i : subsystem) in[i] = true;
    std::vector<Root> out;
    for (const auto& r : positive_roots_) {
      bool ok = true;
      for (int i = 0; i < rank_; ++i)
        if (r.simple[i] != 0 && !in[i]) { ok = false; break; }
      if (ok) out.push_back(r);
    }
    return out;
  }

  bool is_root(const std::vector<std::int64_t>& simple_coords) const {
    if (root_index(simple_coords) >= 0) return true;
    std::vector<std::int64_t> neg(simple_coords.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -simple_coords[i];
    return root_index(neg) >= 0;
  }

  int root_index(const std::vector<std::int64_t>& simple_coords) const {
    auto it = root_lookup_.find(simple_coords);
    return it == root_lookup_.end() ? -1 : static_cast<int>(it->second);
  }

  std::string name() const {
    std::string s;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (k) s += "x";
      s += factors_[k].series + std::to_string(factors_[k].rank);
    }
    return s;
  }

 private:
  void check_weight(const Weight& w) const {
    if (static_cast<int>(w.size()) != rank_)
      throw std::invalid_argument("weight length does not match rank");
  }

  static void validate_factor(const SimpleFactor& f) {
    switch (f.series) {
      case 'A': if (f.rank >= 1) return; break;
      case 'B': if (f.rank >= 2) return; break;
      case 'C': if (f.rank >= 2) return; break;
      case 'D': if (f.rank >= 3) return; break;
      case 'E': if (f.rank >= 6 && f.rank <= 8) return; break;
      case 'F': if (f.rank == 4) return; break;
      case 'G': if (f.rank == 2) return; break;
      default: break;
    }
    throw std::invalid_argument(std::string("invalid series/rank: ") + f.series +
                                std::to_string(f.rank));
  }

  void fill_factor(const SimpleFactor& f, int off) {
    int n = f.rank;
    auto set = [&](int i, int j, std::int64_t v) { cartan_[off + i][off + j] = v; };
    auto chain = [&](int upto) {
      for (int i = 0; i + 1 < upto; ++i) { set(i, i + 1, -1); set(i + 1, i, -1); }
    };
    for (int i = 0; i < n; ++i) set(i, i, 2);
    switch (f.series) {
      case 'A':
        chain(n);
        break;
      case 'B':  // alpha_n short
        chain(n);
        set(n - 1, n - 2, -2);
        for (int i = 0; i < n - 1; ++i) symmetrizer_[off + i] = Rat(2);
        symmetrizer_[off + n - 1] = Rat(1);
        break;
      case 'C':  // alpha_n long
        chain(n);
        set(n - 2, n - 1, -2);
        for (int i = 0; i < n - 1; ++i) symmetrizer_[off + i] = Rat(1);
        symmetrizer_[off + n - 1] = Rat(2);
        break;
      case 'D':
        chain(n - 1);
        set(n - 3, n - 1, -1);
        set(n - 1, n - 3, -1);
        break;
      case 'E':  // Bourbaki: node 2 hangs off node 4 of the chain 1-3-4-5-...
        set(0, 2, -1); set(2, 0, -1);
        set(1, 3, -1); set(3, 1, -1);
        for (int i = 2; i + 1 < n; ++i) { set(i, i + 1, -1); set(i + 1, i, -1); }
        break;
      case 'F':  // alpha_1, alpha_2 long; alpha_3, alpha_4 short
        chain(4);
        set(2, 1, -2);
        symmetrizer_[off + 0] = Rat(2);
        symmetrizer_[off + 1] = Rat(2);
        symmetrizer_[off + 2] = Rat(1);
        symmetrizer_[off + 3] = Rat(1);
        break;
      case 'G':  // alpha_1 short, alpha_2 long: <alpha_long, alpha_short^vee> = -3
        set(0, 1, -3);
        set(1, 0, -1);
        symmetrizer_[off + 0] = Rat(1);
        symmetrizer_[off + 1] = Rat(3);
        break;
    }
  }

  void build_positive_roots() {
    std::map<std::vector<std::int64_t>, std::size_t> lookup;
    std::vector<std::vector<std::int64_t>> roots;
    for (int i = 0; i < rank_; ++i) {
      std::vector<std::int64_t> s(rank_, 0);
      s[i] = 1;
      lookup.emplace(s, roots.size());
      roots.push_back(std::move(s));
    }
    // Height-by-height closure via root strings: beta + alpha_i is a root
    // iff q = p - <beta, alpha_i^vee> > 0.
    std::size_t begin = 0;
    while (begin < roots.size()) {
      std::size_t end = roots.size();
      for (std::size_t r = begin; r < end; ++r)
        for (int i = 0; i < rank_; ++i) {
          std::vector<std::int64_t> beta = roots[r];
          bool is_simple_i = true;
          for (int j = 0; j < rank_; ++j)
            if (beta[j] != (j == i ? 1 : 0)) { is_simple_i = false; break; }
          if (is_simple_i) continue;
          std::int64_t pair = 0;
          for (int j = 0; j < rank_; ++j) pair += cartan_[i][j] * beta[j];
          std::int64_t p = 0;
          std::vector<std::int64_t> down = beta;
          while (true) {
            down[i] -= 1;
            if (down[i] < 0 || !lookup.count(down)) break;
            ++p;
          }
          if (p - pair > 0) {
            std::vector<std::int64_t> up = beta;
            up[i] += 1;
            if (!lookup.count(up)) {
              lookup.emplace(up, roots.size());
              roots.push_back(std::move(up));
            }
          }
        }
      begin = end;
    }

    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
      std::int64_t ha = 0, hb = 0;
      for (auto x : a) ha += x;
      for (auto x : b) hb += x;
      if (ha != hb) return ha < hb;
      return a < b;
    });
    root_lookup_.clear();
    positive_roots_.clear();
    for (std::size_t k = 0; k < roots.size(); ++k) {
      Root r;
      r.simple = roots[k];
      r.fund.assign(rank_, 0);
      for (int j = 0; j < rank_; ++j)
        for (int i = 0; i < rank_; ++i) r.fund[j] += cartan_[j][i] * r.simple[i];
      Rat hn(0);
      for (int i = 0; i < rank_; ++i) {
        if (r.simple[i] == 0) continue;
        for (int j = 0; j < rank_; ++j)
          if (r.simple[j] != 0)
            hn += Rat(r.simple[i]) * symmetrizer_[i] * Rat(cartan_[i][j]) * Rat(r.simple[j]);
      }
      r.half_norm = hn / 2;
      root_lookup_.emplace(r.simple, k);
      positive_roots_.push_back(std::move(r));
    }

    std::size_t expected = 0;
    for (const auto& f : factors_) expected += expected_positive_count(f);
    if (positive_roots_.size() != expected)
      throw std::logic_error("positive root closure produced wrong count for " + name());
  }

  static std::size_t expected_positive_count(const SimpleFactor& f) {
    std::size_t n = static_cast<std::size_t>(f.rank);
    switch (f.series) {
      case 'A': return n * (n + 1) / 2;
      case 'B':
      case 'C': return n * n;
      case 'D': return n * (n - 1);
      case 'E': return f.rank == 6 ? 36 : (f.rank == 7 ? 63 : 120);
      case 'F': return 24;
      case 'G': return 6;
    }
    return 0;
  }

  void build_weight_form() {
    // (w, w') = (Dw)^T B^{-1} (Dw') with B_ij = d_i * cartan(i,j).
    QMat b(rank_, rank_);
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < rank_; ++j) b(i, j) = symmetrizer_[i] * Rat(cartan_[i][j]);
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < i; ++j)
        if (!(b(i, j) == b(j, i))) throw std::logic_error("symmetrizer failed for " + name());
    QMat binv = b.inverse();
    weight_form_ = QMat(rank_, rank_);
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < rank_; ++j)
        weight_form_(i, j) = symmetrizer_[i] * binv(i, j) * symmetrizer_[j];
  }

  std::vector<SimpleFactor> factors_;
  int rank_;
  std::vector<std::vector<std::int64_t>> cartan_;
  std::vector<Rat> symmetrizer_;
  std::vector<Root> positive_roots_;
  std::map<std::vector<std::int64_t>, std::size_t> root_lookup_;
  QMat weight_form_;
};

/// "A2", "G2", or a product like "A1xA1" / "A2,B2".
inline RootSystem build_root_system(const std::string& spec) {
  std::vector<SimpleFactor> fs;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    if (cur.size() < 2) throw std::invalid_argument("bad group spec: " + cur);
    char s = cur[0];
    int r = 0;
    for (std::size_t i = 1; i < cur.size(); ++i) {
      if (cur[i] < '0' || cur[i] > '9') throw std::invalid_argument("bad group spec: " + cur);
      r = r * 10 + (cur[i] - '0');
    }
    fs.push_back({s, r});
    cur.clear();
  };
  for (char c : spec) {
    if (c == 'x' || c == ',' || c == ' ') flush();
    else cur += c;
  }
  flush();
  return RootSystem(std::move(fs));
}

inline RootSystem build_root_system(char series, int rank) {
  return RootSystem({SimpleFactor{series, rank}});
}

}  // namespace flagquiver
