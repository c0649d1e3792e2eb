#pragma once

#include "logfol/matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace logfol {

using LatticeVector = std::vector<std::int64_t>;

/// Finitely generated submonoid of Z^k. Integrality is automatic: the monoid lives
/// inside a lattice, so cancellation always holds.
class FGMonoid {
public:
  FGMonoid(std::size_t ambient_rank, std::vector<LatticeVector> generators)
      : rank_(ambient_rank), generators_(std::move(generators)) {
    if (rank_ == 0) throw DomainError("monoid ambient rank must be positive");
    for (const auto& g : generators_)
      if (g.size() != rank_)
        throw DomainError("monoid generator length " + std::to_string(g.size()) +
                          " does not match ambient rank " + std::to_string(rank_));
  }

  /// N^r with its standard basis.
  static FGMonoid free(std::size_t r) {
    std::vector<LatticeVector> gens(r, LatticeVector(r, 0));
    for (std::size_t i = 0; i < r; ++i) gens[i][i] = 1;
    return FGMonoid(r, std::move(gens));
  }

  std::size_t ambient_rank() const { return rank_; }
  const std::vector<LatticeVector>& generators() const { return generators_; }

private:
  std::size_t rank_;
  std::vector<LatticeVector> generators_;
};

/// Bounds for the brute-force lattice enumeration behind saturation.
struct EnumerationBounds {
  std::int64_t box = 10;             ///< candidates range over [-box, box]^k
  std::int64_t max_multiple = 6;     ///< membership search paths may leave the query box by this many generator lengths
  std::size_t max_cells = 4'000'000; ///< budget for the membership search grid
};

/// Which lattice a saturation is taken in.
enum class SaturationLattice {
  Ambient,         ///< Z^k, the lattice the generators are written in
  Groupification,  ///< gp(M), the group generated by M itself
};

namespace detail {

inline Matrix<Integer> to_integer_rows(const std::vector<LatticeVector>& rows, std::size_t cols) {
  Matrix<Integer> m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Integer(static_cast<long>(rows[i][j]));
  return m;
}

/// Set of monoid elements reachable inside a box, by breadth-first closure from 0.
class BoxedClosure {
public:
  BoxedClosure(std::size_t rank, std::int64_t radius, std::size_t max_cells)
      : rank_(rank), radius_(radius), side_(2 * radius + 1) {
    double cells = 1;
    for (std::size_t i = 0; i < rank; ++i) cells *= static_cast<double>(side_);
    if (cells > static_cast<double>(max_cells))
      throw ResourceLimit("membership search grid of " + std::to_string(static_cast<long long>(cells)) +
                          " cells exceeds the configured budget of " + std::to_string(max_cells));
    reached_.assign(static_cast<std::size_t>(cells), false);
    reached_[index(LatticeVector(rank, 0))] = true;
  }

  bool contains(const LatticeVector& v) const { return inside(v) && reached_[index(v)]; }

  /// Adds a generator and closes the reached set under it (and the earlier generators).
  void add_generator(const LatticeVector& g) {
    generators_.push_back(g);
    std::vector<LatticeVector> frontier;
    for_each_reached([&](const LatticeVector& v) { frontier.push_back(v); });
    while (!frontier.empty()) {
      std::vector<LatticeVector> next;
      for (const auto& v : frontier)
        for (const auto& h : generators_) {
          LatticeVector w(rank_);
          for (std::size_t i = 0; i < rank_; ++i) w[i] = v[i] + h[i];
          if (!inside(w)) continue;
          auto idx = index(w);
          if (reached_[idx]) continue;
          reached_[idx] = true;
          next.push_back(std::move(w));
        }
      frontier = std::move(next);
    }
  }

private:
  bool inside(const LatticeVector& v) const {
    return std::all_of(v.begin(), v.end(), [&](std::int64_t x) { return x >= -radius_ && x <= radius_; });
  }
  std::size_t index(const LatticeVector& v) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < rank_; ++i) idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(v[i] + radius_);
    return idx;
  }
  template <class F>
  void for_each_reached(F&& f) const {
    LatticeVector v(rank_);
    for (std::size_t idx = 0; idx < reached_.size(); ++idx) {
      if (!reached_[idx]) continue;
      std::size_t rest = idx;
      for (std::size_t i = rank_; i-- > 0;) {
        v[i] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(side_)) - radius_;
        rest /= static_cast<std::size_t>(side_);
      }
      f(v);
    }
  }

  std::size_t rank_;
  std::int64_t radius_, side_;
  std::vector<bool> reached_;
  std::vector<LatticeVector> generators_;
};

inline std::int64_t max_abs_entry(const std::vector<LatticeVector>& vs) {
  std::int64_t m = 0;
  for (const auto& v : vs)
    for (auto x : v) m = std::max(m, x < 0 ? -x : x);
  return m;
}

}  // namespace detail

/// Canonical (Hermite) basis of the subgroup of Z^k generated by the monoid.
inline Matrix<Integer> grothendieck_group(const FGMonoid& m) {
  return hermite_normal_form(detail::to_integer_rows(m.generators(), m.ambient_rank()));
}

/// Membership oracle for a fixed monoid, valid for vectors with entries in
/// [-radius, radius]. Search paths are confined to a box padded by the largest
/// generator entry times `max_multiple`.
class MembershipOracle {
public:
  MembershipOracle(const FGMonoid& m, std::int64_t radius, const EnumerationBounds& bounds = {})
      : radius_(radius),
        closure_(m.ambient_rank(), radius + detail::max_abs_entry(m.generators()) * bounds.max_multiple,
                 bounds.max_cells) {
    for (const auto& g : m.generators()) closure_.add_generator(g);
  }

  bool contains(const LatticeVector& v) const {
    for (auto x : v)
      if (x < -radius_ || x > radius_)
        throw ResourceLimit("membership query outside the configured search radius");
    return closure_.contains(v);
  }

private:
  std::int64_t radius_;
  detail::BoxedClosure closure_;
};

/// A generator of a saturation together with its certificate k * x in M.
struct SaturationGenerator {
  LatticeVector vector;
  std::int64_t multiple = 1;
};

struct SaturationResult {
  FGMonoid monoid;
  std::vector<SaturationGenerator> witnesses;
};

namespace detail {

/// Smallest k >= 1 with k x a nonnegative integer combination of the generators, when x
/// lies in the rational cone they span. By Caratheodory it suffices to try linearly
/// independent subsets of generators, where the coefficients are unique.
inline std::optional<std::int64_t> cone_multiple(const std::vector<LatticeVector>& gens, const LatticeVector& x) {
  const std::size_t k = x.size(), m = gens.size();
  std::optional<std::int64_t> best;
  QVector rhs(x.begin(), x.end());
  std::vector<std::size_t> pick;
  auto visit = [&](auto&& self, std::size_t from) -> void {
    if (!pick.empty()) {
      QMatrix a(k, pick.size());
      for (std::size_t c = 0; c < pick.size(); ++c)
        for (std::size_t r = 0; r < k; ++r) a(r, c) = Rational(static_cast<long>(gens[pick[c]][r]));
      if (rank(a) < pick.size()) return;
      if (const auto sol = solve(a, std::span<const Rational>(rhs)); sol && std::all_of(sol->x.begin(), sol->x.end(), [](const Rational& l) { return l >= 0; })) {
        Integer den = 1;
        for (const auto& l : sol->x) den = lcm(den, Integer(l.get_den()));
        const std::int64_t mult = den.get_si();
        if (!best || mult < *best) best = mult;
      }
    }
    if (pick.size() == k) return;
    for (std::size_t i = from; i < m; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  visit(visit, 0);
  return best;
}

}  // namespace detail

/// Saturation {x in L : k x in M for some k >= 1}, where L is Z^k or gp(M).
/// Lattice points of the box are tested for membership in the rational cone of M, which
/// is equivalent; the certificate k is the smallest multiple found on a simplicial
/// subcone. Every Hilbert basis element lies in a fundamental parallelepiped of such a
/// subcone, so a box of rank * (largest generator entry) suffices. A generating set is
/// then chosen greedily by increasing size, keeping only points not generated by
/// earlier picks.
inline SaturationResult saturate_with_witnesses(const FGMonoid& m, SaturationLattice lattice = SaturationLattice::Ambient,
                                                const EnumerationBounds& bounds = {}) {
  const std::size_t k = m.ambient_rank();
  if (static_cast<std::int64_t>(k) * detail::max_abs_entry(m.generators()) > bounds.box)
    throw ResourceLimit("rank times the largest generator entry exceeds the enumeration box; enlarge the box bound");
  const auto group = grothendieck_group(m);

  std::vector<SaturationGenerator> candidates;
  LatticeVector x(k, -bounds.box);
  for (;;) {
    bool nonzero = std::any_of(x.begin(), x.end(), [](std::int64_t v) { return v != 0; });
    bool in_lattice = true;
    if (nonzero && lattice == SaturationLattice::Groupification) {
      std::vector<Integer> xi(k);
      for (std::size_t i = 0; i < k; ++i) xi[i] = Integer(static_cast<long>(x[i]));
      in_lattice = in_row_lattice(group, xi);
    }
    if (nonzero && in_lattice)
      if (const auto mult = detail::cone_multiple(m.generators(), x)) candidates.push_back({x, *mult});
    std::size_t i = k;
    while (i > 0 && x[i - 1] == bounds.box) x[--i] = -bounds.box;
    if (i == 0) break;
    ++x[i - 1];
  }

  auto norm1 = [](const LatticeVector& v) {
    std::int64_t s = 0;
    for (auto e : v) s += e < 0 ? -e : e;
    return s;
  };
  std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    const auto na = norm1(a.vector), nb = norm1(b.vector);
    if (na != nb) return na < nb;
    return a.vector > b.vector;
  });

  detail::BoxedClosure kept_closure(k, 2 * bounds.box, bounds.max_cells);
  std::vector<SaturationGenerator> kept;
  for (const auto& c : candidates) {
    if (kept_closure.contains(c.vector)) continue;
    kept.push_back(c);
    kept_closure.add_generator(c.vector);
  }
  std::vector<LatticeVector> gens;
  for (const auto& g : kept) gens.push_back(g.vector);
  return {FGMonoid(k, std::move(gens)), std::move(kept)};
}

inline FGMonoid saturate(const FGMonoid& m, SaturationLattice lattice = SaturationLattice::Ambient,
                         const EnumerationBounds& bounds = {}) {
  return saturate_with_witnesses(m, lattice, bounds).monoid;
}

/// Equality of generated monoids by two-sided membership of generators.
inline bool same_monoid(const FGMonoid& a, const FGMonoid& b, const EnumerationBounds& bounds = {}) {
  if (a.ambient_rank() != b.ambient_rank()) return false;
  const std::int64_t radius = std::max(detail::max_abs_entry(a.generators()), detail::max_abs_entry(b.generators()));
  MembershipOracle in_a(a, radius, bounds), in_b(b, radius, bounds);
  return std::all_of(b.generators().begin(), b.generators().end(), [&](const auto& g) { return in_a.contains(g); }) &&
         std::all_of(a.generators().begin(), a.generators().end(), [&](const auto& g) { return in_b.contains(g); });
}

inline bool is_saturated(const FGMonoid& m, SaturationLattice lattice = SaturationLattice::Ambient,
                         const EnumerationBounds& bounds = {}) {
  return same_monoid(m, saturate(m, lattice, bounds), bounds);
}

/// Homomorphism between monoids given by an integer matrix on the ambient lattices.
/// Construction certifies that every source generator lands in the target monoid.
class MonoidHom {
public:
  MonoidHom(FGMonoid source, FGMonoid target, Matrix<std::int64_t> matrix, const EnumerationBounds& bounds = {})
      : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != target_.ambient_rank() || matrix_.cols() != source_.ambient_rank())
      throw DomainError("monoid homomorphism matrix has the wrong shape");
    std::vector<LatticeVector> images;
    for (const auto& g : source_.generators()) images.push_back(apply(g));
    const auto radius = detail::max_abs_entry(images);
    MembershipOracle in_target(target_, radius, bounds);
    for (const auto& img : images)
      if (!in_target.contains(img)) throw DomainError("image of a source generator is not in the target monoid");
  }

  LatticeVector apply(const LatticeVector& v) const {
    if (v.size() != matrix_.cols()) throw DomainError("vector length does not match the homomorphism source");
    LatticeVector out(matrix_.rows(), 0);
    for (std::size_t i = 0; i < matrix_.rows(); ++i)
      for (std::size_t j = 0; j < matrix_.cols(); ++j) out[i] += matrix_(i, j) * v[j];
    return out;
  }

  const FGMonoid& source() const { return source_; }
  const FGMonoid& target() const { return target_; }
  const Matrix<std::int64_t>& matrix() const { return matrix_; }

private:
  FGMonoid source_, target_;
  Matrix<std::int64_t> matrix_;
};

/// The diagonal N -> N^r, 1 |-> (1, ..., 1).
inline MonoidHom diagonal_hom(std::size_t r) {
  if (r == 0) throw DomainError("diagonal_hom needs r >= 1");
  Matrix<std::int64_t> m(r, 1);
  for (std::size_t i = 0; i < r; ++i) m(i, 0) = 1;
  return MonoidHom(FGMonoid::free(1), FGMonoid::free(r), std::move(m));
}

}  // namespace logfol
