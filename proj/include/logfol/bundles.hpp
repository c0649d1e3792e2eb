#pragma once

#include "logfol/matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace logfol {

struct Dimensions {
  std::size_t h0 = 0;
  std::size_t h1 = 0;
  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Two-chart Cech complex of O(d) on P^1 truncated to a monomial window.
/// U0 has coordinate t, U1 has s = 1/t, and a section s^j on U1 reads t^(d-j) on U0 n U1.
/// C^0 = t^[0,w] + s^[0,w], C^1 = t^[lo,hi] with lo = min(0, d-w), hi = max(w, d).
class P1CechWindow {
public:
  P1CechWindow(long degree, long window) : d_(degree), w_(window) {
    if (window < 0) throw DomainError("window must be nonnegative");
    lo_ = std::min(0L, d_ - w_);
    hi_ = std::max(w_, d_);
  }

  std::size_t c0_dimension() const { return 2 * static_cast<std::size_t>(w_ + 1); }
  std::size_t c1_dimension() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }

  /// (f, g) |-> f - g on the overlap, in t-coordinates.
  QMatrix differential() const {
    QMatrix m(c1_dimension(), c0_dimension());
    for (long j = 0; j <= w_; ++j) {
      m(static_cast<std::size_t>(j - lo_), static_cast<std::size_t>(j)) += 1;
      m(static_cast<std::size_t>(d_ - j - lo_), static_cast<std::size_t>(w_ + 1 + j)) -= 1;
    }
    return m;
  }

  Dimensions dimensions() const {
    const auto rk = rank(differential());
    return {c0_dimension() - rk, c1_dimension() - rk};
  }

  /// Global sections as columns over C^0 (the kernel of the differential).
  QMatrix global_sections() const { return nullspace(differential()); }

  /// Value at t = 0 of a C^0 vector: the t^0 coefficient of its U0 part.
  static std::size_t value_at_origin_index() { return 0; }

  long window() const { return w_; }

private:
  long d_, w_, lo_, hi_;
};

/// Smallest window from which the dimensions stayed unchanged for two enlargements.
inline long stable_window(long degree) {
  long w = 0;
  Dimensions prev = P1CechWindow(degree, w).dimensions();
  int unchanged = 0;
  while (unchanged < 2) {
    ++w;
    const auto cur = P1CechWindow(degree, w).dimensions();
    unchanged = cur == prev ? unchanged + 1 : 0;
    prev = cur;
  }
  return w;
}

/// (h^0, h^1) of O(d) on P^1.
inline Dimensions h_p1(long d) { return P1CechWindow(d, stable_window(d)).dimensions(); }

/// Split bundle O(d_1) + ... + O(d_k) on P^1.
struct GradedBundleP1 {
  std::vector<long> degrees;

  std::size_t rank() const { return degrees.size(); }

  Dimensions cohomology() const {
    Dimensions out;
    for (long d : degrees) {
      const auto h = h_p1(d);
      out.h0 += h.h0;
      out.h1 += h.h1;
    }
    return out;
  }

  long euler_characteristic() const {
    long chi = 0;
    for (long d : degrees) chi += d + 1;
    return chi;
  }
};

/// Bundle on C = C_1 u_p C_2 (two lines meeting at p = {t = 0} on each): split bundles on
/// the components and a fiber identification at p. A global section is a pair (s1, s2)
/// with glue * s1(p) = s2(p).
struct SNCCurveBundle {
  GradedBundleP1 left, right;
  QMatrix glue;

  SNCCurveBundle(GradedBundleP1 l, GradedBundleP1 r, QMatrix g) : left(std::move(l)), right(std::move(r)), glue(std::move(g)) {
    if (left.rank() != right.rank()) throw DomainError("component bundles have different ranks");
    if (glue.rows() != left.rank() || glue.cols() != left.rank()) throw DomainError("glue matrix has the wrong size");
    if (!inverse(glue)) throw DomainError("glue matrix is not invertible");
  }

  static SNCCurveBundle identity_glued(const std::vector<long>& degrees) {
    return SNCCurveBundle({degrees}, {degrees}, QMatrix::identity(degrees.size()));
  }

  /// Componentwise dual twisted by the dualizing sheaf: degrees -d - 1, glue -glue^{-T}.
  SNCCurveBundle serre_dual() const {
    GradedBundleP1 l, r;
    for (long d : left.degrees) l.degrees.push_back(-d - 1);
    for (long d : right.degrees) r.degrees.push_back(-d - 1);
    const QMatrix inv_t = inverse(glue)->transpose();
    return SNCCurveBundle(std::move(l), std::move(r), Rational(-1) * inv_t);
  }
};

namespace detail {

/// Evaluation at p of the global sections of a split bundle: one column per section,
/// one row per summand.
inline QMatrix evaluation_at_node(const GradedBundleP1& e) {
  std::vector<std::vector<Rational>> cols;
  for (std::size_t k = 0; k < e.degrees.size(); ++k) {
    const P1CechWindow cech(e.degrees[k], stable_window(e.degrees[k]));
    const auto sections = cech.global_sections();
    for (std::size_t c = 0; c < sections.cols(); ++c) {
      std::vector<Rational> col(e.rank(), 0);
      col[k] = sections(P1CechWindow::value_at_origin_index(), c);
      cols.push_back(std::move(col));
    }
  }
  return QMatrix::from_rows(cols, e.rank()).transpose();
}

}  // namespace detail

/// Cohomology from the gluing sequence
/// 0 -> H0(C,E) -> H0(E1) + H0(E2) -> E_p -> H1(C,E) -> H1(E1) + H1(E2) -> 0,
/// with the middle map (s1, s2) |-> glue * s1(p) - s2(p).
inline Dimensions cohomology_snc_curve(const SNCCurveBundle& e) {
  const QMatrix ev1 = e.glue * detail::evaluation_at_node(e.left);
  const QMatrix ev2 = detail::evaluation_at_node(e.right);
  const std::size_t rk = e.left.rank();
  QMatrix phi(rk, ev1.cols() + ev2.cols());
  for (std::size_t i = 0; i < rk; ++i) {
    for (std::size_t c = 0; c < ev1.cols(); ++c) phi(i, c) = ev1(i, c);
    for (std::size_t c = 0; c < ev2.cols(); ++c) phi(i, ev1.cols() + c) = -ev2(i, c);
  }
  const auto rank_phi = rank(phi);
  const auto h1 = e.left.cohomology(), h2 = e.right.cohomology();
  Dimensions out;
  out.h0 = h1.h0 + h2.h0 - rank_phi;
  out.h1 = (rk - rank_phi) + h1.h1 + h2.h1;
  return out;
}

}  // namespace logfol
