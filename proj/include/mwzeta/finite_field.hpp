#pragma once

// Brute-force point counting over F_{p^s}: the ground truth every
// cohomological count is checked against.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/rational.hpp"

namespace mwzeta {

inline constexpr int kMaxExtensionDegree = 12;
inline constexpr int kDefaultDegreeCap = 6;
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// F_{p^s} realized as F_p[x]/(modulus).
struct FieldDesc {
  long p = 2;
  int s = 1;
  std::vector<long> modulus;  // ascending coefficients, monic, size s + 1

  std::uint64_t order() const {
    std::uint64_t q = 1;
    for (int i = 0; i < s; ++i) q *= static_cast<std::uint64_t>(p);
    return q;
  }
};

namespace ff {

using Elem = std::array<long, kMaxExtensionDegree>;

inline long mod_p(long a, long p) {
  a %= p;
  return a < 0 ? a + p : a;
}

// Remainder of a (ascending, arbitrary length) modulo the monic polynomial m over F_p.
inline std::vector<long> poly_rem(std::vector<long> a, const std::vector<long>& m, long p) {
  const std::size_t dm = m.size() - 1;
  for (std::size_t i = a.size(); i-- > dm;) {
    long c = mod_p(a[i], p);
    if (c == 0) continue;
    for (std::size_t j = 0; j <= dm; ++j) a[i - dm + j] = mod_p(a[i - dm + j] - c * m[j], p);
  }
  a.resize(std::min(a.size(), dm));
  for (auto& c : a) c = mod_p(c, p);
  return a;
}

}  // namespace ff

/// Monic polynomial over F_p with no monic factor of degree 1..deg/2.
inline bool is_irreducible_mod_p(const std::vector<long>& monic, long p) {
  const int deg = static_cast<int>(monic.size()) - 1;
  if (deg <= 1) return deg == 1;
  for (int d = 1; d <= deg / 2; ++d) {
    // enumerate monic divisors of degree d: d free coefficients
    std::vector<long> cand(static_cast<std::size_t>(d) + 1, 0);
    cand[static_cast<std::size_t>(d)] = 1;
    while (true) {
      auto r = ff::poly_rem(monic, cand, p);
      bool zero = true;
      for (long c : r) zero = zero && c == 0;
      if (zero) return false;
      int i = 0;
      while (i < d && ++cand[static_cast<std::size_t>(i)] == p) cand[static_cast<std::size_t>(i++)] = 0;
      if (i == d) break;
    }
  }
  return true;
}

/// F_{p^s} with the first monic irreducible modulus in lexicographic order of
/// (c_{s-1}, ..., c_0), each coefficient ranging over 0..p-1.
inline FieldDesc build_extension(long p, int s, int degree_cap = kDefaultDegreeCap) {
  if (!is_prime(p)) detail::fail("finite_field", "NotPrime", std::to_string(p) + " is not prime");
  if (s < 1 || s > degree_cap || s > kMaxExtensionDegree)
    detail::fail("finite_field", "DegreeTooLarge",
                 "extension degree " + std::to_string(s) + " outside 1.." + std::to_string(degree_cap));
  FieldDesc f{p, s, std::vector<long>(static_cast<std::size_t>(s) + 1, 0)};
  f.modulus[static_cast<std::size_t>(s)] = 1;
  // odometer with c_0 varying fastest gives lex order on (c_{s-1}, ..., c_0)
  while (!is_irreducible_mod_p(f.modulus, p)) {
    int i = 0;
    while (i < s && ++f.modulus[static_cast<std::size_t>(i)] == p) f.modulus[static_cast<std::size_t>(i++)] = 0;
    if (i == s) detail::fail("finite_field", "NoIrreducible", "search exhausted");
  }
  return f;
}

/// Arithmetic in F_{p^s}; elements are coefficient arrays of length s.
class FiniteField {
 public:
  explicit FiniteField(FieldDesc desc) : d_(std::move(desc)) {}

  const FieldDesc& desc() const noexcept { return d_; }
  std::uint64_t order() const { return d_.order(); }

  ff::Elem zero() const { return ff::Elem{}; }

  ff::Elem from_int(long n) const {
    ff::Elem e{};
    e[0] = ff::mod_p(n, d_.p);
    return e;
  }

  ff::Elem from_index(std::uint64_t idx) const {
    ff::Elem e{};
    for (int i = 0; i < d_.s; ++i) {
      e[static_cast<std::size_t>(i)] = static_cast<long>(idx % static_cast<std::uint64_t>(d_.p));
      idx /= static_cast<std::uint64_t>(d_.p);
    }
    return e;
  }

  bool is_zero(const ff::Elem& a) const {
    for (int i = 0; i < d_.s; ++i)
      if (a[static_cast<std::size_t>(i)] != 0) return false;
    return true;
  }

  bool equal(const ff::Elem& a, const ff::Elem& b) const {
    for (int i = 0; i < d_.s; ++i)
      if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)]) return false;
    return true;
  }

  ff::Elem add(const ff::Elem& a, const ff::Elem& b) const {
    ff::Elem r{};
    for (int i = 0; i < d_.s; ++i) {
      auto k = static_cast<std::size_t>(i);
      r[k] = a[k] + b[k];
      if (r[k] >= d_.p) r[k] -= d_.p;
    }
    return r;
  }

  ff::Elem mul(const ff::Elem& a, const ff::Elem& b) const {
    const auto s = static_cast<std::size_t>(d_.s);
    std::array<long, 2 * kMaxExtensionDegree> prod{};
    for (std::size_t i = 0; i < s; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < s; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % d_.p;
    }
    for (std::size_t i = 2 * s - 1; i-- > s;) {
      long c = prod[i];
      if (c == 0) continue;
      for (std::size_t j = 0; j < s; ++j) prod[i - s + j] = ff::mod_p(prod[i - s + j] - c * d_.modulus[j], d_.p);
    }
    ff::Elem r{};
    for (std::size_t i = 0; i < s; ++i) r[i] = prod[i];
    return r;
  }

  ff::Elem pow(ff::Elem a, long e) const {
    ff::Elem r = from_int(1);
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  ff::Elem inverse(const ff::Elem& a) const {
    if (is_zero(a)) detail::fail("finite_field", "DivisionByZero", "zero has no inverse");
    return pow(a, static_cast<long>(order()) - 2);
  }

 private:
  FieldDesc d_;
};

/// Integer-coefficient polynomial in nvars variables.
struct IntPolynomial {
  struct Term {
    long coeff = 0;
    std::vector<int> exps;
  };
  std::vector<Term> terms;

  int max_exponent() const {
    int m = 0;
    for (const auto& t : terms)
      for (int e : t.exps) m = std::max(m, e);
    return m;
  }
};

/// Affine patch: common zeros of the relations where every inverted polynomial is nonzero.
struct AffinePatchSpec {
  int nvars = 1;
  std::vector<IntPolynomial> relations;
  std::vector<IntPolynomial> inverted;
};

/// Target coordinate = coeff * prod source_j^{exps[j]} (exponents may be negative).
struct MonomialMap {
  struct Coordinate {
    long coeff = 1;
    std::vector<int> exps;
  };
  std::vector<Coordinate> coords;
};

/// Patches glued along monomial identifications; maps[(i, j)] sends patch-i
/// coordinates to patch-j coordinates on the overlap. A missing pair means the
/// patches do not meet.
struct GluedSpec {
  std::vector<AffinePatchSpec> patches;
  std::map<std::pair<int, int>, MonomialMap> maps;
};

namespace ff {

using Point = std::vector<Elem>;

inline Elem eval(const FiniteField& F, const IntPolynomial& poly, const std::vector<std::vector<Elem>>& powers) {
  Elem acc = F.zero();
  for (const auto& t : poly.terms) {
    Elem term = F.from_int(t.coeff);
    if (F.is_zero(term)) continue;
    for (std::size_t v = 0; v < t.exps.size(); ++v)
      if (t.exps[v] != 0) term = F.mul(term, powers[v][static_cast<std::size_t>(t.exps[v])]);
    acc = F.add(acc, term);
  }
  return acc;
}

inline bool contains(const FiniteField& F, const AffinePatchSpec& spec, const Point& pt) {
  int maxe = 0;
  for (const auto& r : spec.relations) maxe = std::max(maxe, r.max_exponent());
  for (const auto& r : spec.inverted) maxe = std::max(maxe, r.max_exponent());
  std::vector<std::vector<Elem>> powers(pt.size());
  for (std::size_t v = 0; v < pt.size(); ++v) {
    powers[v].push_back(F.from_int(1));
    for (int e = 1; e <= maxe; ++e) powers[v].push_back(F.mul(powers[v].back(), pt[v]));
  }
  for (const auto& r : spec.relations)
    if (!F.is_zero(eval(F, r, powers))) return false;
  for (const auto& r : spec.inverted)
    if (F.is_zero(eval(F, r, powers))) return false;
  return true;
}

/// Image of pt under the map, or nothing when a negative power hits a zero coordinate.
inline std::optional<Point> apply(const FiniteField& F, const MonomialMap& m, const Point& pt) {
  Point out;
  out.reserve(m.coords.size());
  for (const auto& c : m.coords) {
    Elem v = F.from_int(c.coeff);
    for (std::size_t j = 0; j < c.exps.size(); ++j) {
      int e = c.exps[j];
      if (e == 0) continue;
      if (e < 0) {
        if (F.is_zero(pt[j])) return std::nullopt;
        v = F.mul(v, F.pow(F.inverse(pt[j]), -e));
      } else {
        v = F.mul(v, F.pow(pt[j], e));
      }
    }
    out.push_back(v);
  }
  return out;
}

template <typename Visit>
void for_each_point(const FiniteField& F, int nvars, Visit&& visit) {
  const std::uint64_t q = F.order();
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(nvars), 0);
  Point pt(static_cast<std::size_t>(nvars), F.zero());
  while (true) {
    visit(pt);
    int k = 0;
    while (k < nvars) {
      auto kk = static_cast<std::size_t>(k);
      if (++idx[kk] < q) {
        pt[kk] = F.from_index(idx[kk]);
        break;
      }
      idx[kk] = 0;
      pt[kk] = F.zero();
      ++k;
    }
    if (k == nvars) break;
  }
}

inline void check_cap(const FiniteField& F, int nvars, std::uint64_t cap) {
  long double total = 1;
  for (int i = 0; i < nvars; ++i) total *= static_cast<long double>(F.order());
  if (total > static_cast<long double>(cap))
    detail::fail("finite_field", "EnumerationTooLarge",
                 "q^nvars exceeds the enumeration cap of " + std::to_string(cap));
}

inline bool same_point(const FiniteField& F, const Point& a, const Point& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!F.equal(a[i], b[i])) return false;
  return true;
}

}  // namespace ff

/// Number of points of the patch over the field.
inline std::uint64_t count_affine_points(const AffinePatchSpec& spec, const FieldDesc& field,
                                         std::uint64_t cap = kDefaultEnumerationCap) {
  FiniteField F(field);
  ff::check_cap(F, spec.nvars, cap);
  std::uint64_t n = 0;
  ff::for_each_point(F, spec.nvars, [&](const ff::Point& pt) {
    if (ff::contains(F, spec, pt)) ++n;
  });
  return n;
}

namespace ff {

// pt (a point of patch i) lies in U_i ∩ U_j: the map is defined there and lands in U_j.
inline std::optional<Point> transport(const FiniteField& F, const GluedSpec& g, int i, int j, const Point& pt) {
  if (i == j) return pt;
  auto it = g.maps.find({i, j});
  if (it == g.maps.end()) return std::nullopt;
  auto img = apply(F, it->second, pt);
  if (!img || !contains(F, g.patches[static_cast<std::size_t>(j)], *img)) return std::nullopt;
  return img;
}

inline void check_round_trips(const FiniteField& F, const GluedSpec& g, int i, const Point& pt) {
  const int r = static_cast<int>(g.patches.size());
  for (int j = 0; j < r; ++j) {
    if (j == i) continue;
    auto img = transport(F, g, i, j, pt);
    if (!img) continue;
    auto back = transport(F, g, j, i, *img);
    if (!back || !same_point(F, *back, pt))
      detail::fail("finite_field", "InconsistentGluing",
                   "identification " + std::to_string(i) + "->" + std::to_string(j) + " does not round-trip");
    for (int k = 0; k < r; ++k) {
      if (k == i || k == j) continue;
      auto direct = transport(F, g, i, k, pt);
      auto via = transport(F, g, j, k, *img);
      if (direct && via && !same_point(F, *direct, *via))
        detail::fail("finite_field", "InconsistentGluing",
                     "identifications through patch " + std::to_string(j) + " disagree on a triple overlap");
    }
  }
}

}  // namespace ff

/// Number of points of the subset intersection U_{i0} ∩ ... ∩ U_{ik}, enumerated in patch i0.
inline std::uint64_t count_intersection(const GluedSpec& g, const std::vector<int>& tuple, const FieldDesc& field,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
  FiniteField F(field);
  const int i0 = tuple.front();
  const auto& base = g.patches[static_cast<std::size_t>(i0)];
  ff::check_cap(F, base.nvars, cap);
  std::uint64_t n = 0;
  ff::for_each_point(F, base.nvars, [&](const ff::Point& pt) {
    if (!ff::contains(F, base, pt)) return;
    for (std::size_t k = 1; k < tuple.size(); ++k)
      if (!ff::transport(F, g, i0, tuple[k], pt)) return;
    ++n;
  });
  return n;
}

/// Inclusion–exclusion over all nonempty subsets of the cover.
inline std::uint64_t count_glued_points(const GluedSpec& g, const FieldDesc& field,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
  FiniteField F(field);
  const int r = static_cast<int>(g.patches.size());
  // identifications must be consistent on every enumerated overlap point
  for (int i = 0; i < r; ++i) {
    ff::check_cap(F, g.patches[static_cast<std::size_t>(i)].nvars, cap);
    ff::for_each_point(F, g.patches[static_cast<std::size_t>(i)].nvars, [&](const ff::Point& pt) {
      if (ff::contains(F, g.patches[static_cast<std::size_t>(i)], pt)) ff::check_round_trips(F, g, i, pt);
    });
  }
  mpz_class total = 0;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    std::vector<int> tuple;
    for (int i = 0; i < r; ++i)
      if (mask & (1u << i)) tuple.push_back(i);
    mpz_class n(static_cast<unsigned long>(count_intersection(g, tuple, field, cap)));
    if (tuple.size() % 2 == 1)
      total += n;
    else
      total -= n;
  }
  return total.get_ui();
}

/// Distinct glued points, each represented in the first patch that contains it.
inline std::uint64_t count_glued_points_by_transport(const GluedSpec& g, const FieldDesc& field,
                                                     std::uint64_t cap = kDefaultEnumerationCap) {
  FiniteField F(field);
  std::uint64_t n = 0;
  const int r = static_cast<int>(g.patches.size());
  for (int i = 0; i < r; ++i) {
    const auto& patch = g.patches[static_cast<std::size_t>(i)];
    ff::check_cap(F, patch.nvars, cap);
    ff::for_each_point(F, patch.nvars, [&](const ff::Point& pt) {
      if (!ff::contains(F, patch, pt)) return;
      for (int j = 0; j < i; ++j)
        if (ff::transport(F, g, i, j, pt)) return;
      ++n;
    });
  }
  return n;
}

/// Truncation of exp(sum_s N_s/s t^s) to O(t^(order+1)); counts[s-1] = N_s.
inline RationalPoly zeta_series_from_counts(const std::vector<mpz_class>& counts, std::size_t order) {
  if (counts.size() < order)
    detail::fail("finite_field", "MissingCounts", "need N_s for s = 1.." + std::to_string(order));
  RationalPoly log_series(order + 1, mpq_class(0));
  for (std::size_t s = 1; s <= order; ++s) {
    log_series[s] = mpq_class(counts[s - 1], mpz_class(static_cast<unsigned long>(s)));
    log_series[s].canonicalize();
  }
  return series_exp(log_series, order);
}

}  // namespace mwzeta
