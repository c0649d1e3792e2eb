#pragma once

#include "logfol/bundles.hpp"
#include "logfol/matrix.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace logfol {

/// Sorted list of open indices, one per nonempty intersection.
using Simplex = std::vector<std::size_t>;

inline std::string to_string(const Simplex& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

/// Finite model of the Cech double complex of a complex of sheaves L^0 -> L^1 -> ... on an
/// abstract cover: per-simplex section spaces V_s^q, restriction maps along codimension-one
/// faces, and per-simplex differentials d_s^q : V_s^q -> V_s^{q+1}.
class CechLeafData {
public:
  CechLeafData(std::size_t num_opens, std::size_t num_degrees) : opens_(num_opens), degrees_(num_degrees) {
    if (num_degrees == 0) throw DomainError("leaf data needs at least one degree");
  }

  std::size_t num_opens() const { return opens_; }
  std::size_t num_degrees() const { return degrees_; }

  void add_simplex(Simplex s, std::vector<std::size_t> dims) {
    if (s.empty() || !std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
      throw DomainError("simplex " + to_string(s) + " must be a strictly increasing list");
    if (s.back() >= opens_) throw DomainError("simplex " + to_string(s) + " names an unknown open");
    if (dims.size() != degrees_) throw DomainError("simplex " + to_string(s) + " needs one dimension per degree");
    if (s.size() > levels_.size()) levels_.resize(s.size());
    auto& level = levels_[s.size() - 1];
    if (std::find(level.begin(), level.end(), s) != level.end()) throw DomainError("duplicate simplex " + to_string(s));
    level.push_back(s);
    std::sort(level.begin(), level.end());
    dims_[s] = std::move(dims);
  }

  /// Restriction V_face^q -> V_s^q for each degree q.
  void set_restriction(const Simplex& face, const Simplex& s, std::vector<QMatrix> per_degree) {
    if (per_degree.size() != degrees_) throw DomainError("restriction needs one matrix per degree");
    restrictions_[{face, s}] = std::move(per_degree);
  }

  /// d_s^q : V_s^q -> V_s^{q+1} for q = 0 .. num_degrees - 2.
  void set_differential(const Simplex& s, std::vector<QMatrix> per_degree) {
    if (per_degree.size() + 1 != degrees_) throw DomainError("differential needs num_degrees - 1 matrices");
    differentials_[s] = std::move(per_degree);
  }

  /// Simplices with p + 1 opens.
  const std::vector<Simplex>& simplices(std::size_t p) const {
    static const std::vector<Simplex> none;
    return p < levels_.size() ? levels_[p] : none;
  }
  std::size_t num_levels() const { return levels_.size(); }

  std::size_t dim(const Simplex& s, std::size_t q) const { return dims_.at(s)[q]; }

  const QMatrix& restriction(const Simplex& face, const Simplex& s, std::size_t q) const {
    const auto it = restrictions_.find({face, s});
    if (it == restrictions_.end()) throw DomainError("missing restriction " + to_string(face) + " -> " + to_string(s));
    return it->second[q];
  }

  const QMatrix& differential(const Simplex& s, std::size_t q) const {
    const auto it = differentials_.find(s);
    if (it == differentials_.end()) throw DomainError("missing differential on " + to_string(s));
    return it->second[q];
  }

  /// Shape checks, face closure, d^2 = 0 and d(restriction) = (restriction)d per simplex.
  void validate() const {
    for (std::size_t p = 1; p < levels_.size(); ++p)
      for (const auto& s : levels_[p])
        for (std::size_t k = 0; k < s.size(); ++k) {
          Simplex face = s;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(k));
          if (!dims_.count(face)) throw DomainError("face " + to_string(face) + " of " + to_string(s) + " is missing");
          for (std::size_t q = 0; q < degrees_; ++q) {
            const auto& r = restriction(face, s, q);
            if (r.rows() != dim(s, q) || r.cols() != dim(face, q))
              throw DomainError("restriction " + to_string(face) + " -> " + to_string(s) + " has the wrong shape");
          }
          for (std::size_t q = 0; q + 1 < degrees_; ++q)
            if (!(differential(s, q) * restriction(face, s, q) == restriction(face, s, q + 1) * differential(face, q)))
              throw DomainError("differentials do not commute with restriction " + to_string(face) + " -> " + to_string(s));
        }
    for (const auto& [s, dims] : dims_)
      for (std::size_t q = 0; q + 1 < degrees_; ++q) {
        const auto& d = differential(s, q);
        if (d.rows() != dims[q + 1] || d.cols() != dims[q]) throw DomainError("differential on " + to_string(s) + " has the wrong shape");
        if (q + 2 < degrees_ && !(differential(s, q + 1) * d).is_zero())
          throw DomainError("differential on " + to_string(s) + " does not square to zero");
      }
  }

private:
  std::size_t opens_, degrees_;
  std::vector<std::vector<Simplex>> levels_;
  std::map<Simplex, std::vector<std::size_t>> dims_;
  std::map<std::pair<Simplex, Simplex>, std::vector<QMatrix>> restrictions_;
  std::map<Simplex, std::vector<QMatrix>> differentials_;
};

/// Assembled double complex C^{p,q} = prod over p-simplices of V^q, with total differential
/// D = cech + (-1)^p ce on C^{p,q}. Total-degree spaces list the blocks by increasing p.
class DoubleComplex {
public:
  explicit DoubleComplex(CechLeafData data) : data_(std::move(data)) {
    data_.validate();
    for (std::size_t p = 0; p + 1 < data_.num_levels(); ++p)
      for (std::size_t q = 0; q < data_.num_degrees(); ++q)
        if (!(cech(p + 1, q) * cech(p, q)).is_zero()) throw DomainError("Cech differential does not square to zero");
  }

  const CechLeafData& data() const { return data_; }
  std::size_t max_p() const { return data_.num_levels() == 0 ? 0 : data_.num_levels() - 1; }
  std::size_t max_q() const { return data_.num_degrees() - 1; }

  std::size_t dim(std::size_t p, std::size_t q) const {
    if (q >= data_.num_degrees()) return 0;
    std::size_t n = 0;
    for (const auto& s : data_.simplices(p)) n += data_.dim(s, q);
    return n;
  }

  /// Offset of simplex s inside C^{p,q}.
  std::size_t offset(std::size_t p, std::size_t q, const Simplex& s) const {
    std::size_t n = 0;
    for (const auto& t : data_.simplices(p)) {
      if (t == s) return n;
      n += data_.dim(t, q);
    }
    throw DomainError("simplex " + to_string(s) + " not in level " + std::to_string(p));
  }

  /// (cech c)_{i_0..i_{p+1}} = sum_k (-1)^k res(c_{..^i_k..}).
  QMatrix cech(std::size_t p, std::size_t q) const {
    QMatrix m(dim(p + 1, q), dim(p, q));
    if (q >= data_.num_degrees()) return m;
    for (const auto& s : data_.simplices(p + 1))
      for (std::size_t k = 0; k < s.size(); ++k) {
        Simplex face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(k));
        const auto& r = data_.restriction(face, s, q);
        const Rational sign = k % 2 == 0 ? 1 : -1;
        const std::size_t ro = offset(p + 1, q, s), co = offset(p, q, face);
        for (std::size_t i = 0; i < r.rows(); ++i)
          for (std::size_t j = 0; j < r.cols(); ++j) m(ro + i, co + j) += sign * r(i, j);
      }
    return m;
  }

  /// Block-diagonal CE differential C^{p,q} -> C^{p,q+1}.
  QMatrix ce(std::size_t p, std::size_t q) const {
    QMatrix m(dim(p, q + 1), dim(p, q));
    if (q + 1 >= data_.num_degrees()) return m;
    for (const auto& s : data_.simplices(p)) {
      const auto& d = data_.differential(s, q);
      const std::size_t ro = offset(p, q + 1, s), co = offset(p, q, s);
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) m(ro + i, co + j) = d(i, j);
    }
    return m;
  }

  /// Blocks (p, q) of total degree n, by increasing p.
  std::vector<std::pair<std::size_t, std::size_t>> blocks(std::size_t n) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t p = 0; p <= n; ++p)
      if (p <= max_p() && n - p <= max_q()) out.emplace_back(p, n - p);
    return out;
  }

  std::size_t total_dim(std::size_t n) const {
    std::size_t s = 0;
    for (const auto& [p, q] : blocks(n)) s += dim(p, q);
    return s;
  }

  std::size_t block_offset(std::size_t n, std::size_t p) const {
    std::size_t s = 0;
    for (const auto& [bp, bq] : blocks(n)) {
      if (bp == p) return s;
      s += dim(bp, bq);
    }
    throw DomainError("no block with p = " + std::to_string(p) + " in total degree " + std::to_string(n));
  }

  QMatrix total(std::size_t n) const {
    QMatrix m(total_dim(n + 1), total_dim(n));
    auto place = [&](const QMatrix& b, std::size_t ro, std::size_t co, const Rational& sign) {
      for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) m(ro + i, co + j) += sign * b(i, j);
    };
    for (const auto& [p, q] : blocks(n)) {
      const std::size_t co = block_offset(n, p);
      if (p + 1 <= max_p()) place(cech(p, q), block_offset(n + 1, p + 1), co, 1);
      if (q + 1 <= max_q()) place(ce(p, q), block_offset(n + 1, p), co, p % 2 == 0 ? 1 : -1);
    }
    return m;
  }

  /// Alternating sum over q of the Euler characteristics of the Cech columns.
  long column_euler_characteristic() const {
    long chi = 0;
    for (std::size_t q = 0; q <= max_q(); ++q)
      for (std::size_t p = 0; p <= max_p(); ++p) {
        const long sign = (p + q) % 2 == 0 ? 1 : -1;
        chi += sign * static_cast<long>(dim(p, q));
      }
    return chi;
  }

private:
  CechLeafData data_;
};

struct HyperDimensions {
  std::size_t h0 = 0, h1 = 0, h2 = 0;
  friend bool operator==(const HyperDimensions&, const HyperDimensions&) = default;
};

/// dim H^n = dim C^n - rank D_n - rank D_{n-1}, n = 0, 1, 2.
inline HyperDimensions leaf_complex_hypercohomology(const DoubleComplex& dc) {
  std::array<std::size_t, 3> rk{};
  for (std::size_t n = 0; n < 3; ++n) rk[n] = rank(dc.total(n));
  HyperDimensions h;
  h.h0 = dc.total_dim(0) - rk[0];
  h.h1 = dc.total_dim(1) - rk[1] - rk[0];
  h.h2 = dc.total_dim(2) - rk[2] - rk[1];
  return h;
}

inline HyperDimensions leaf_complex_hypercohomology(const CechLeafData& data) {
  return leaf_complex_hypercohomology(DoubleComplex(data));
}

/// theta in C^{2,0}, g in C^{1,1}, b in C^{0,2}.
struct ObstructionTriple {
  QVector theta, g, b;
};

struct ObstructionCheck {
  std::array<bool, 4> equations{};  ///< (1) cech theta = 0, (2) cech g = -ce theta, (3) cech b = ce g, (4) ce b = 0
  bool all_hold() const { return equations[0] && equations[1] && equations[2] && equations[3]; }
  bool is_coboundary = false;
  QVector rho;  ///< C^{1,0} part of a primitive, when one exists
  QVector h;    ///< C^{0,1} part
};

/// Checks the four cocycle equations and solves D(rho, h) = (theta, g, b), i.e.
/// theta = cech rho, g = cech h - ce rho, b = ce h.
inline ObstructionCheck verify_obstruction_cocycle(const DoubleComplex& dc, const ObstructionTriple& t) {
  if (t.theta.size() != dc.dim(2, 0) || t.g.size() != dc.dim(1, 1) || t.b.size() != dc.dim(0, 2))
    throw DomainError("obstruction cochains do not match the cover and degrees: expected sizes " + std::to_string(dc.dim(2, 0)) +
                      ", " + std::to_string(dc.dim(1, 1)) + ", " + std::to_string(dc.dim(0, 2)));
  auto apply = [](const QMatrix& m, const QVector& v) { return m.apply(std::span<const Rational>(v)); };
  auto is_zero = [](const QVector& v) { return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; }); };
  auto sum = [](QVector a, const QVector& b, const Rational& s) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
    return a;
  };
  ObstructionCheck out;
  out.equations[0] = is_zero(apply(dc.cech(2, 0), t.theta));
  out.equations[1] = is_zero(sum(apply(dc.cech(1, 1), t.g), apply(dc.ce(2, 0), t.theta), 1));
  out.equations[2] = is_zero(sum(apply(dc.cech(0, 2), t.b), apply(dc.ce(1, 1), t.g), -1));
  out.equations[3] = is_zero(apply(dc.ce(0, 2), t.b));

  // total-degree-2 vector in block order (p = 0, 1, 2) = (b, g, theta), truncated to existing blocks
  QVector target;
  for (const auto& [p, q] : dc.blocks(2)) {
    const QVector& part = p == 0 ? t.b : p == 1 ? t.g : t.theta;
    target.insert(target.end(), part.begin(), part.end());
  }
  const auto sol = solve(dc.total(1), std::span<const Rational>(target));
  if (sol) {
    out.is_coboundary = true;
    for (const auto& [p, q] : dc.blocks(1)) {
      const std::size_t off = dc.block_offset(1, p);
      QVector part(sol->x.begin() + static_cast<std::ptrdiff_t>(off), sol->x.begin() + static_cast<std::ptrdiff_t>(off + dc.dim(p, q)));
      (p == 0 ? out.h : out.rho) = std::move(part);
    }
  }
  return out;
}

/// The coboundary D(rho, h) as an obstruction triple.
inline ObstructionTriple total_coboundary(const DoubleComplex& dc, const QVector& rho, const QVector& h) {
  if (rho.size() != dc.dim(1, 0) || h.size() != dc.dim(0, 1)) throw DomainError("primitive cochains have the wrong sizes");
  auto apply = [](const QMatrix& m, const QVector& v) { return m.apply(std::span<const Rational>(v)); };
  ObstructionTriple t;
  t.theta = apply(dc.cech(1, 0), rho);
  t.g = apply(dc.cech(0, 1), h);
  const auto drho = apply(dc.ce(1, 0), rho);
  for (std::size_t i = 0; i < t.g.size(); ++i) t.g[i] -= drho[i];
  t.b = apply(dc.ce(0, 1), h);
  return t;
}

namespace detail {

template <class Rng>
Rational small_rational(Rng& rng, int bound = 3, int max_den = 2) {
  std::uniform_int_distribution<int> num(-bound, bound), den(1, max_den);
  return Rational(num(rng), den(rng));
}

template <class Rng>
QMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      m(i, j) = small_rational(rng);
      m(i, j).canonicalize();
    }
  return m;
}

template <class Rng>
QMatrix random_invertible(Rng& rng, std::size_t n) {
  while (true) {
    auto m = random_matrix(rng, n, n);
    if (inverse(m)) return m;
  }
}

inline bool has_zero_column(const QMatrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    bool zero = true;
    for (std::size_t i = 0; i < m.rows(); ++i) zero = zero && m(i, j) == 0;
    if (zero) return true;
  }
  return false;
}

}  // namespace detail

template <class Rng>
QVector random_vector(Rng& rng, std::size_t n) {
  QVector v(n);
  for (auto& x : v) {
    x = detail::small_rational(rng);
    x.canonicalize();
  }
  return v;
}

/// Random leaf data on the full nerve of `num_opens` opens (all intersections up to
/// `max_level` + 1 opens nonempty). A model complex with differentials d^q is conjugated
/// by a random invertible g_s on each simplex; restrictions are g_s g_t^{-1}.
template <class Rng>
CechLeafData random_gauge_leaf_data(Rng& rng, std::size_t num_opens, const std::vector<std::size_t>& dims, std::size_t max_level = 3) {
  const std::size_t nd = dims.size();
  std::vector<QMatrix> model;
  for (std::size_t q = 0; q + 1 < nd; ++q) {
    for (int attempt = 0;; ++attempt) {
      QMatrix d;
      if (q == 0) {
        d = detail::random_matrix(rng, dims[1], dims[0]);
      } else {
        // rows in the left null space of the previous differential
        const QMatrix left_null = nullspace(model[q - 1].transpose());
        d = detail::random_matrix(rng, dims[q + 1], left_null.cols()) * left_null.transpose();
      }
      if (!detail::has_zero_column(d) || attempt > 50) {
        model.push_back(d);
        break;
      }
    }
  }
  CechLeafData data(num_opens, nd);
  std::map<Simplex, std::vector<QMatrix>> gauge;
  std::vector<Simplex> all;
  for (std::size_t size = 1; size <= std::min(num_opens, max_level + 1); ++size) {
    std::vector<bool> pick(num_opens, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    std::vector<Simplex> level;
    do {
      Simplex s;
      for (std::size_t i = 0; i < num_opens; ++i)
        if (pick[i]) s.push_back(i);
      level.push_back(s);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    std::sort(level.begin(), level.end());
    for (auto& s : level) {
      data.add_simplex(s, dims);
      std::vector<QMatrix> gs, ds;
      for (std::size_t q = 0; q < nd; ++q) gs.push_back(detail::random_invertible(rng, dims[q]));
      for (std::size_t q = 0; q + 1 < nd; ++q) ds.push_back(gs[q + 1] * model[q] * *inverse(gs[q]));
      data.set_differential(s, ds);
      gauge[s] = gs;
      all.push_back(s);
    }
  }
  for (const auto& s : all) {
    if (s.size() == 1) continue;
    for (std::size_t k = 0; k < s.size(); ++k) {
      Simplex face = s;
      face.erase(face.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<QMatrix> rs;
      for (std::size_t q = 0; q < nd; ++q) rs.push_back(gauge[s][q] * *inverse(gauge[face][q]));
      data.set_restriction(face, s, std::move(rs));
    }
  }
  return data;
}

/// Leaf data on P^1 with the two standard charts for the complex O(d) -> O(e) given by
/// multiplication with a section P of O(e - d) (coefficients of 1, t, ..., t^{e-d} on U0);
/// without `target` the complex is the single sheaf O(d). Sections are truncated to the
/// window w exactly as in P1CechWindow.
inline CechLeafData p1_leaf_data(long d, std::optional<long> target, const QVector& multiplier, long w) {
  struct Window {
    long degree, w, lo, hi;
    std::size_t chart() const { return static_cast<std::size_t>(w + 1); }
    std::size_t overlap() const { return static_cast<std::size_t>(hi - lo + 1); }
  };
  auto window = [](long deg, long width) { return Window{deg, width, std::min(0L, deg - width), std::max(width, deg)}; };
  std::vector<Window> win{window(d, w)};
  if (target) {
    const long shift = *target - d;
    if (shift < 0 && std::any_of(multiplier.begin(), multiplier.end(), [](const Rational& x) { return x != 0; }))
      throw DomainError("a nonzero map O(d) -> O(e) needs e >= d");
    if (shift >= 0 && static_cast<long>(multiplier.size()) != shift + 1) throw DomainError("multiplier must have e - d + 1 coefficients");
    win.push_back(window(*target, w + std::max(0L, shift)));
  }
  CechLeafData data(2, win.size());
  std::vector<std::size_t> chart_dims, overlap_dims;
  for (const auto& x : win) {
    chart_dims.push_back(x.chart());
    overlap_dims.push_back(x.overlap());
  }
  data.add_simplex({0}, chart_dims);
  data.add_simplex({1}, chart_dims);
  data.add_simplex({0, 1}, overlap_dims);

  std::vector<QMatrix> r0, r1;
  for (const auto& x : win) {
    QMatrix a(x.overlap(), x.chart()), b(x.overlap(), x.chart());
    for (long j = 0; j <= x.w; ++j) {
      a(static_cast<std::size_t>(j - x.lo), static_cast<std::size_t>(j)) = 1;
      b(static_cast<std::size_t>(x.degree - j - x.lo), static_cast<std::size_t>(j)) = 1;
    }
    r0.push_back(a);
    r1.push_back(b);
  }
  data.set_restriction({0}, {0, 1}, r0);
  data.set_restriction({1}, {0, 1}, r1);

  if (target) {
    const long shift = *target - d;
    const Window &src = win[0], &dst = win[1];
    QMatrix m0(dst.chart(), src.chart()), m1(dst.chart(), src.chart()), m01(dst.overlap(), src.overlap());
    if (shift >= 0)
      for (long k = 0; k <= shift; ++k) {
        const Rational& c = multiplier[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        for (long j = 0; j <= src.w; ++j) {
          m0(static_cast<std::size_t>(j + k), static_cast<std::size_t>(j)) += c;
          // on U1, P reads sum c_k s^{shift - k}
          m1(static_cast<std::size_t>(j + shift - k), static_cast<std::size_t>(j)) += c;
        }
        for (long j = src.lo; j <= src.hi; ++j)
          m01(static_cast<std::size_t>(j + k - dst.lo), static_cast<std::size_t>(j - src.lo)) += c;
      }
    data.set_differential({0}, {m0});
    data.set_differential({1}, {m1});
    data.set_differential({0, 1}, {m01});
  } else {
    data.set_differential({0}, {});
    data.set_differential({1}, {});
    data.set_differential({0, 1}, {});
  }
  return data;
}

/// Hypercohomology of the P^1 two-term complex, enlarging the window until the
/// dimensions stay unchanged for two enlargements.
inline HyperDimensions p1_leaf_hypercohomology(long d, std::optional<long> target, const QVector& multiplier) {
  long w = 0;
  auto prev = leaf_complex_hypercohomology(p1_leaf_data(d, target, multiplier, w));
  int unchanged = 0;
  while (unchanged < 2) {
    ++w;
    const auto cur = leaf_complex_hypercohomology(p1_leaf_data(d, target, multiplier, w));
    unchanged = cur == prev ? unchanged + 1 : 0;
    prev = cur;
  }
  return prev;
}

}  // namespace logfol
