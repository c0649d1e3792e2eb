#pragma once

#include "logfol/matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace logfol {

/// Finite-dimensional Lie algebra by structure constants [e_i, e_j] = sum_k c[i][j][k] e_k.
class LieAlgebra {
public:
  using Constants = std::vector<std::vector<QVector>>;

  LieAlgebra(std::size_t dim, Constants c) : dim_(dim), c_(std::move(c)) {
    if (c_.size() != dim_) throw DomainError("structure constants have the wrong shape");
    for (const auto& row : c_) {
      if (row.size() != dim_) throw DomainError("structure constants have the wrong shape");
      for (const auto& v : row)
        if (v.size() != dim_) throw DomainError("structure constants have the wrong shape");
    }
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          if (c_[i][j][k] != -c_[j][i][k]) throw DomainError("structure constants are not antisymmetric");
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k) {
          const auto jac = jacobiator(basis(i), basis(j), basis(k));
          if (std::any_of(jac.begin(), jac.end(), [](const Rational& x) { return x != 0; }))
            throw DomainError("structure constants violate the Jacobi identity");
        }
  }

  static LieAlgebra abelian(std::size_t dim) {
    return LieAlgebra(dim, Constants(dim, std::vector<QVector>(dim, QVector(dim, 0))));
  }

  std::size_t dimension() const { return dim_; }
  const Constants& constants() const { return c_; }

  QVector basis(std::size_t i) const {
    QVector v(dim_, 0);
    v[i] = 1;
    return v;
  }

  QVector bracket(const QVector& x, const QVector& y) const {
    QVector out(dim_, 0);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (y[j] == 0) continue;
        const Rational s = x[i] * y[j];
        for (std::size_t k = 0; k < dim_; ++k) out[k] += s * c_[i][j][k];
      }
    }
    return out;
  }

  QVector jacobiator(const QVector& x, const QVector& y, const QVector& z) const {
    auto a = bracket(x, bracket(y, z)), b = bracket(y, bracket(z, x)), c = bracket(z, bracket(x, y));
    for (std::size_t k = 0; k < dim_; ++k) a[k] += b[k] + c[k];
    return a;
  }

  /// Matrix of ad(x).
  QMatrix ad(const QVector& x) const {
    QMatrix m(dim_, dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      const auto col = bracket(x, basis(j));
      for (std::size_t k = 0; k < dim_; ++k) m(k, j) = col[k];
    }
    return m;
  }

private:
  std::size_t dim_;
  Constants c_;
};

/// A representation of a Lie algebra on Q^d: one d x d matrix per basis element.
struct LieModule {
  LieAlgebra algebra;
  std::vector<QMatrix> action;

  std::size_t dim = 0;

  LieModule(LieAlgebra g, std::vector<QMatrix> act, std::size_t module_dim)
      : algebra(std::move(g)), action(std::move(act)), dim(module_dim) {
    if (action.size() != algebra.dimension()) throw DomainError("module needs one action matrix per basis element");
    const std::size_t d = dim;
    for (const auto& m : action)
      if (m.rows() != d || m.cols() != d) throw DomainError("action matrices have inconsistent sizes");
    for (std::size_t i = 0; i < action.size(); ++i)
      for (std::size_t j = 0; j < action.size(); ++j) {
        QMatrix lhs(d, d);
        const auto br = algebra.bracket(algebra.basis(i), algebra.basis(j));
        for (std::size_t k = 0; k < br.size(); ++k)
          if (br[k] != 0) lhs = lhs + br[k] * action[k];
        if (!(lhs == action[i] * action[j] - action[j] * action[i])) throw DomainError("action is not a Lie algebra representation");
      }
  }

  static LieModule trivial(LieAlgebra g, std::size_t d) {
    std::vector<QMatrix> act(g.dimension(), QMatrix(d, d));
    return LieModule(std::move(g), std::move(act), d);
  }

  std::size_t dimension() const { return dim; }
};

/// Sorted k-subsets of {0, ..., m-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> sorted_subsets(std::size_t m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > m) return out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

inline std::size_t subset_index(const std::vector<std::vector<std::size_t>>& subsets, const std::vector<std::size_t>& s) {
  const auto it = std::lower_bound(subsets.begin(), subsets.end(), s);
  if (it == subsets.end() || *it != s) throw DomainError("subset not found");
  return static_cast<std::size_t>(it - subsets.begin());
}

/// Alternating k-cochain: one module vector per sorted k-subset of basis indices.
struct Cochain {
  std::size_t degree = 0;
  std::vector<QVector> values;

  friend bool operator==(const Cochain&, const Cochain&) = default;

  bool is_zero() const {
    for (const auto& v : values)
      for (const auto& x : v)
        if (x != 0) return false;
    return true;
  }

  QVector flatten() const {
    QVector out;
    for (const auto& v : values) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  static Cochain unflatten(std::size_t degree, std::size_t count, std::size_t module_dim, const QVector& flat) {
    if (flat.size() != count * module_dim) throw DomainError("flattened cochain has the wrong length");
    Cochain c{degree, {}};
    for (std::size_t i = 0; i < count; ++i) {
      const auto first = flat.begin() + static_cast<std::ptrdiff_t>(i * module_dim);
      c.values.emplace_back(first, first + static_cast<std::ptrdiff_t>(module_dim));
    }
    return c;
  }

  static Cochain zero(const LieModule& m, std::size_t degree) {
    return {degree, std::vector<QVector>(sorted_subsets(m.algebra.dimension(), degree).size(), QVector(m.dimension(), 0))};
  }
};

/// (d phi)(v_1..v_{k+1}) = sum_i (-1)^{i+1} v_i . phi(..^v_i..)
///                       + sum_{i<j} (-1)^{i+j} phi([v_i, v_j], ..^v_i..^v_j..).
inline Cochain ce_differential(const LieModule& mod, const Cochain& phi) {
  const std::size_t m = mod.algebra.dimension(), d = mod.dimension(), k = phi.degree;
  const auto src = sorted_subsets(m, k);
  if (phi.values.size() != src.size()) throw DomainError("cochain has the wrong number of values");
  for (const auto& v : phi.values)
    if (v.size() != d) throw DomainError("cochain values have the wrong dimension");
  const auto dst = sorted_subsets(m, k + 1);
  Cochain out{k + 1, std::vector<QVector>(dst.size(), QVector(d, 0))};

  // phi(e_c, rest) for sorted rest, with the sign of sorting c into place
  auto eval_with = [&](std::size_t c, const std::vector<std::size_t>& rest, QVector& acc, const Rational& scale) {
    if (std::find(rest.begin(), rest.end(), c) != rest.end()) return;
    std::vector<std::size_t> s = rest;
    const auto pos = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), c) - s.begin());
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), c);
    const Rational sign = pos % 2 == 0 ? 1 : -1;
    const auto& val = phi.values[subset_index(src, s)];
    for (std::size_t t = 0; t < d; ++t) acc[t] += scale * sign * val[t];
  };

  for (std::size_t o = 0; o < dst.size(); ++o) {
    const auto& v = dst[o];
    QVector& acc = out.values[o];
    for (std::size_t i = 0; i <= k; ++i) {
      std::vector<std::size_t> rest = v;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      const auto val = mod.action[v[i]].apply(std::span<const Rational>(phi.values[subset_index(src, rest)]));
      const Rational sign = i % 2 == 0 ? 1 : -1;
      for (std::size_t t = 0; t < d; ++t) acc[t] += sign * val[t];
    }
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j) {
        std::vector<std::size_t> rest;
        for (std::size_t t = 0; t <= k; ++t)
          if (t != i && t != j) rest.push_back(v[t]);
        const Rational sign = (i + j) % 2 == 0 ? 1 : -1;
        const auto& coeffs = mod.algebra.constants()[v[i]][v[j]];
        for (std::size_t c = 0; c < m; ++c)
          if (coeffs[c] != 0) eval_with(c, rest, acc, sign * coeffs[c]);
      }
  }
  return out;
}

/// Matrix of the CE differential C^k -> C^{k+1} on flattened cochains.
inline QMatrix ce_matrix(const LieModule& mod, std::size_t k) {
  const std::size_t d = mod.dimension();
  const std::size_t count = sorted_subsets(mod.algebra.dimension(), k).size();
  const std::size_t n_src = count * d;
  const std::size_t n_dst = sorted_subsets(mod.algebra.dimension(), k + 1).size() * d;
  QMatrix out(n_dst, n_src);
  for (std::size_t c = 0; c < n_src; ++c) {
    QVector e(n_src, 0);
    e[c] = 1;
    const auto img = ce_differential(mod, Cochain::unflatten(k, count, d, e)).flatten();
    for (std::size_t r = 0; r < n_dst; ++r) out(r, c) = img[r];
  }
  return out;
}

/// Subalgebra H = span(h_a) of G with a first-order deformation over Q[eps]/(eps^2):
/// G's bracket becomes [,] + eps mu, the inclusion becomes h_a |-> h_a + eps phi_a.
struct FinLieData {
  LieAlgebra g;
  std::vector<QVector> subalgebra_basis;
  LieAlgebra::Constants bracket_perturbation;  ///< mu, same shape as the structure constants
  std::vector<QVector> inclusion_perturbation;  ///< phi_a, one vector of G per h_a
};

struct LieObstructionResult {
  bool class_is_zero = false;
  Cochain obstruction;                   ///< b-bar in C^2(H, G/H)
  bool cocycle_verified = false;         ///< d b-bar = 0 was checked
  std::optional<Cochain> corrector;      ///< h-bar with d h-bar = b-bar
  std::vector<QVector> corrected_inclusion;  ///< phi_a - lift(h-bar(h_a)), when the class vanishes
  LieModule quotient_module;             ///< the H-module G/H
  std::vector<QVector> complement;       ///< basis vectors of G lifting the G/H basis
};

namespace detail {

inline LieAlgebra::Constants zero_constants(std::size_t m) {
  return LieAlgebra::Constants(m, std::vector<QVector>(m, QVector(m, 0)));
}

inline QVector bilinear(const LieAlgebra::Constants& c, const QVector& x, const QVector& y) {
  const std::size_t m = x.size();
  QVector out(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (x[i] == 0 || y[j] == 0) continue;
      for (std::size_t k = 0; k < m; ++k) out[k] += x[i] * y[j] * c[i][j][k];
    }
  return out;
}

}  // namespace detail

/// Decides whether H deforms to a subalgebra of the deformed G to first order: computes
/// the class of b(x, y) = [f(x), f(y)] - f({x, y}) in H^2(H, G/H).
inline LieObstructionResult lie_subalgebra_obstruction(const FinLieData& data) {
  const auto& g = data.g;
  const std::size_t m = g.dimension(), k = data.subalgebra_basis.size();
  for (const auto& h : data.subalgebra_basis)
    if (h.size() != m) throw DomainError("subalgebra basis vector has the wrong length");
  if (data.inclusion_perturbation.size() != k) throw DomainError("need one inclusion perturbation per subalgebra basis vector");
  const auto& mu = data.bracket_perturbation.empty() ? detail::zero_constants(m) : data.bracket_perturbation;
  if (mu.size() != m) throw DomainError("bracket perturbation has the wrong shape");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < m; ++t)
        if (mu[i][j][t] != -mu[j][i][t]) throw DomainError("bracket perturbation is not antisymmetric");
  // first-order Jacobi: sum_cyc [x, mu(y,z)] + mu(x, [y,z]) = 0
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < m; ++t) {
        const QVector x = g.basis(i), y = g.basis(j), z = g.basis(t);
        QVector s(m, 0);
        for (const auto& [a, b, c] : {std::tuple{x, y, z}, std::tuple{y, z, x}, std::tuple{z, x, y}}) {
          const auto p = g.bracket(a, detail::bilinear(mu, b, c));
          const auto q = detail::bilinear(mu, a, g.bracket(b, c));
          for (std::size_t u = 0; u < m; ++u) s[u] += p[u] + q[u];
        }
        if (std::any_of(s.begin(), s.end(), [](const Rational& v) { return v != 0; }))
          throw DomainError("perturbed bracket violates the Jacobi identity to first order");
      }

  // basis of G adapted to H: [h_1..h_k | complement]
  QMatrix hm(m, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < m; ++i) hm(i, a) = data.subalgebra_basis[a][i];
  if (rank(hm) != k) throw DomainError("subalgebra basis is linearly dependent");
  std::vector<QVector> complement;
  {
    QMatrix acc = hm;
    for (std::size_t i = 0; i < m && k + complement.size() < m; ++i) {
      QMatrix trial(m, acc.cols() + 1);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < acc.cols(); ++c) trial(r, c) = acc(r, c);
        trial(r, acc.cols()) = r == i ? 1 : 0;
      }
      if (rank(trial) == trial.cols()) {
        acc = trial;
        complement.push_back(g.basis(i));
      }
    }
  }
  const std::size_t q = complement.size();
  QMatrix adapted(m, m);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < m; ++r) adapted(r, c) = data.subalgebra_basis[c][r];
  for (std::size_t c = 0; c < q; ++c)
    for (std::size_t r = 0; r < m; ++r) adapted(r, k + c) = complement[c][r];
  const QMatrix to_adapted = *inverse(adapted);
  auto split = [&](const QVector& v) { return to_adapted.apply(std::span<const Rational>(v)); };
  auto project = [&](const QVector& v) {
    const auto s = split(v);
    return QVector(s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
  };

  // structure constants of H, checking closure
  LieAlgebra::Constants hc = detail::zero_constants(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const auto s = split(g.bracket(data.subalgebra_basis[a], data.subalgebra_basis[b]));
      for (std::size_t c = k; c < m; ++c)
        if (s[c] != 0) throw DomainError("subalgebra basis is not closed under the bracket");
      for (std::size_t c = 0; c < k; ++c) hc[a][b][c] = s[c];
    }
  LieAlgebra h(k, hc);
  std::vector<QMatrix> act;
  for (std::size_t a = 0; a < k; ++a) {
    QMatrix am(q, q);
    for (std::size_t c = 0; c < q; ++c) {
      const auto img = project(g.bracket(data.subalgebra_basis[a], complement[c]));
      for (std::size_t r = 0; r < q; ++r) am(r, c) = img[r];
    }
    act.push_back(std::move(am));
  }
  LieModule quotient(h, std::move(act), q);

  // b-bar(h_a, h_b) = pi([h_a, phi_b] + [phi_a, h_b] + mu(h_a, h_b) - sum_c s_abc phi_c)
  auto obstruction_for = [&](const std::vector<QVector>& phi) {
    Cochain b = Cochain::zero(quotient, 2);
    const auto pairs = sorted_subsets(k, 2);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const std::size_t a = pairs[p][0], bb = pairs[p][1];
      const auto& ha = data.subalgebra_basis[a];
      const auto& hb = data.subalgebra_basis[bb];
      QVector v = g.bracket(ha, phi[bb]);
      const auto w = g.bracket(phi[a], hb);
      const auto x = detail::bilinear(mu, ha, hb);
      for (std::size_t t = 0; t < m; ++t) v[t] += w[t] + x[t];
      for (std::size_t c = 0; c < k; ++c)
        if (hc[a][bb][c] != 0)
          for (std::size_t t = 0; t < m; ++t) v[t] -= hc[a][bb][c] * phi[c][t];
      b.values[p] = project(v);
    }
    return b;
  };

  LieObstructionResult res{false, obstruction_for(data.inclusion_perturbation), false, std::nullopt, {}, quotient, complement};
  if (!ce_differential(quotient, res.obstruction).is_zero()) throw DomainError("obstruction cochain is not closed");
  res.cocycle_verified = true;

  const QMatrix d1 = ce_matrix(quotient, 1);
  const QVector rhs = res.obstruction.flatten();
  const auto sol = solve(d1, std::span<const Rational>(rhs));
  if (!sol) return res;
  res.class_is_zero = true;
  res.corrector = Cochain::unflatten(1, k, q, sol->x);
  res.corrected_inclusion = data.inclusion_perturbation;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t c = 0; c < q; ++c)
      for (std::size_t t = 0; t < m; ++t) res.corrected_inclusion[a][t] -= res.corrector->values[a][c] * complement[c][t];
  return res;
}

/// b-bar for given inclusion perturbations, exposed so callers can confirm a correction.
inline Cochain lie_obstruction_cochain(const FinLieData& data) { return lie_subalgebra_obstruction(data).obstruction; }

}  // namespace logfol
