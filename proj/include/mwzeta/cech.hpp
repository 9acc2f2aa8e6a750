#pragma once

// Covers by one-variable patches glued along monomial maps, the alternating
// Cech complex, the Cech-de Rham double complex and its E1 spectral sequence,
// plus a truncated exactness check for the sheaf sequence of a finite cover.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/dagger_algebra.hpp"
#include "mwzeta/error.hpp"
#include "mwzeta/linalg.hpp"
#include "mwzeta/mw_engine.hpp"
#include "mwzeta/rational.hpp"

namespace mwzeta {

using Tuple = std::vector<int>;

/// On the overlap of patches i < j: x_j = coeff * x_i^exponent.
struct OverlapMap {
  long coeff = 1;
  int exponent = 1;
};

struct Intersection {
  Tuple tuple;
  AlgebraPresentation algebra;  // presented in the coordinate of tuple.front()
};

struct Cover {
  PadicContext ctx;
  std::vector<AlgebraPresentation> patches;
  std::map<std::pair<int, int>, OverlapMap> maps;
  std::map<Tuple, Intersection> intersections;  // every nonempty overlap, patches included

  int size() const { return static_cast<int>(patches.size()); }

  bool contains(const Tuple& t) const { return intersections.count(t) > 0; }

  const AlgebraPresentation& algebra(const Tuple& t) const {
    auto it = intersections.find(t);
    if (it == intersections.end()) detail::fail("cech_spectral", "MissingRestriction", "no overlap " + label(t));
    return it->second.algebra;
  }

  /// Overlaps of Cech degree q (tuples of length q + 1), in lexicographic order.
  std::vector<Tuple> tuples(int q) const {
    std::vector<Tuple> out;
    for (const auto& [t, x] : intersections)
      if (static_cast<int>(t.size()) == q + 1) out.push_back(t);
    return out;
  }

  int max_cech_degree() const {
    int m = 0;
    for (const auto& [t, x] : intersections) m = std::max(m, static_cast<int>(t.size()) - 1);
    return m;
  }

  static std::string label(const Tuple& t) {
    std::string s = "U";
    for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
    return s;
  }
};

inline Cover single_patch_cover(const AlgebraPresentation& A) {
  Cover c;
  c.ctx = A.ctx;
  c.patches = {A};
  c.intersections.emplace(Tuple{0}, Intersection{{0}, A});
  return c;
}

/// Cover by affine lines and tori. A pair missing from `maps` means the two
/// patches are disjoint.
inline Cover glued_cover(PadicContext ctx, int degree_cap, const std::vector<Family>& families,
                         std::map<std::pair<int, int>, OverlapMap> maps) {
  Cover c;
  c.ctx = ctx;
  for (Family f : families) {
    if (f == Family::AffineLine)
      c.patches.push_back(affine_line(ctx, degree_cap));
    else if (f == Family::Torus)
      c.patches.push_back(torus(ctx, degree_cap));
    else
      detail::fail("cech_spectral", "UnsupportedFamily", "glued patches must be affine lines or tori");
  }
  for (const auto& [key, m] : maps) {
    const auto [i, j] = key;
    if (i >= j || i < 0 || j >= c.size()) detail::fail("cech_spectral", "BadOverlap", "map keys must be i < j < #patches");
    if (m.coeff % ctx.p == 0) detail::fail("cech_spectral", "NonUnitCoefficient", "overlap coefficient divisible by p");
  }
  c.maps = std::move(maps);
  const int n = c.size();
  // every subset whose pairs all meet
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Tuple t;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) t.push_back(i);
    bool meets = true;
    for (std::size_t a = 0; a < t.size() && meets; ++a)
      for (std::size_t b = a + 1; b < t.size() && meets; ++b) meets = c.maps.count({t[a], t[b]}) > 0;
    if (!meets) continue;
    const int base = t.front();
    bool inverted = families[static_cast<std::size_t>(base)] == Family::Torus;
    for (std::size_t k = 1; k < t.size(); ++k) {
      const OverlapMap& m = c.maps.at({base, t[k]});
      inverted = inverted || m.exponent < 0 || families[static_cast<std::size_t>(t[k])] == Family::Torus;
    }
    AlgebraPresentation A = inverted ? torus(ctx, degree_cap) : affine_line(ctx, degree_cap);
    c.intersections.emplace(t, Intersection{t, A});
  }
  return c;
}

/// Restriction from the overlap `from` to the smaller overlap `to` (from is a subset of to).
inline Substitution restriction(const Cover& c, const Tuple& from, const Tuple& to) {
  const AlgebraPresentation& src = c.algebra(from);
  const AlgebraPresentation& dst = c.algebra(to);
  for (int i : from)
    if (std::find(to.begin(), to.end(), i) == to.end())
      detail::fail("cech_spectral", "MissingRestriction", Cover::label(from) + " does not contain " + Cover::label(to));
  Substitution s{src, dst, {}, {}};
  for (int v = 0; v < src.nvars; ++v) {
    if (from.front() == to.front()) {
      s.images.push_back(dst.variable(v));
      s.inverse_images.push_back(dst.inverted[static_cast<std::size_t>(v)]
                                     ? std::optional<DaggerSeries>(dst.monomial({-1}, dst.ctx.one()))
                                     : std::nullopt);
      continue;
    }
    auto it = c.maps.find({to.front(), from.front()});
    if (it == c.maps.end())
      detail::fail("cech_spectral", "MissingRestriction", "no map from patch " + std::to_string(to.front()) + " to " +
                                                               std::to_string(from.front()));
    const OverlapMap& m = it->second;
    const PadicScalar coeff = dst.ctx.integer(m.coeff);
    s.images.push_back(dst.monomial({m.exponent}, coeff));
    if (dst.inverted[0] || m.exponent == 0)
      s.inverse_images.push_back(dst.monomial({-m.exponent}, coeff.inverse()));
    else
      s.inverse_images.push_back(std::nullopt);
  }
  return s;
}

/// res(S -> T) o res(R -> S) = res(R -> T) on the variables and their inverses.
inline bool restrictions_compatible(const Cover& c) {
  for (const auto& [t, x] : c.intersections)
    for (const auto& [s, y] : c.intersections) {
      if (s.size() >= t.size() || !std::includes(t.begin(), t.end(), s.begin(), s.end())) continue;
      for (const auto& [r, z] : c.intersections) {
        if (r.size() >= s.size() || !std::includes(s.begin(), s.end(), r.begin(), r.end())) continue;
        const Substitution rs = restriction(c, r, s), st = restriction(c, s, t), rt = restriction(c, r, t);
        const AlgebraPresentation& R = z.algebra;
        std::vector<DaggerSeries> probes{R.variable(0)};
        if (R.inverted[0]) probes.push_back(R.monomial({-1}, R.ctx.one()));
        for (const auto& a : probes)
          if (!(apply(st, apply(rs, a)) == apply(rt, a))) return false;
      }
    }
  return true;
}

struct CechCochain {
  int cech_degree = 0;
  int form_degree = 0;
  std::map<Tuple, DifferentialForm> components;
};

/// (delta s)_{i0..i(q+1)} = sum_v (-1)^v res(s_{i0..^iv..i(q+1)}).
inline CechCochain cech_differential(const Cover& c, const CechCochain& s) {
  for (const auto& [t, w] : s.components) {
    if (static_cast<int>(t.size()) != s.cech_degree + 1)
      detail::fail("cech_spectral", "ShapeMismatch", "component " + Cover::label(t) + " has the wrong length");
    if (!c.contains(t)) detail::fail("cech_spectral", "MissingRestriction", "no overlap " + Cover::label(t));
  }
  CechCochain r;
  r.cech_degree = s.cech_degree + 1;
  r.form_degree = s.form_degree;
  for (const Tuple& t : c.tuples(r.cech_degree)) {
    const AlgebraPresentation& A = c.algebra(t);
    DifferentialForm acc;
    acc.degree = s.form_degree;
    for (std::size_t v = 0; v < t.size(); ++v) {
      Tuple face = t;
      face.erase(face.begin() + static_cast<std::ptrdiff_t>(v));
      auto it = s.components.find(face);
      if (it == s.components.end() || it->second.is_zero()) continue;
      const DifferentialForm pulled = pullback(restriction(c, face, t), it->second);
      acc = v % 2 ? acc - pulled : acc + pulled;
    }
    acc.degree = s.form_degree;
    r.components.emplace(t, normalize(A, acc));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Double complex K^{p,q} = C^p(cover, Omega^q).

struct DoubleComplexCell {
  int cech_degree = 0;
  int form_degree = 0;
  std::vector<Tuple> tuples;
  std::vector<int> ranks;  // rank of Omega^q on each overlap
};

struct DoubleComplex {
  std::map<std::pair<int, int>, DoubleComplexCell> cells;
  int max_cech_degree = 0;
  int max_form_degree = 0;
};

inline DoubleComplex double_complex(const Cover& c) {
  DoubleComplex K;
  K.max_cech_degree = c.max_cech_degree();
  for (const auto& [t, x] : c.intersections) {
    const DeRhamComplex dr = derham_complex(x.algebra);
    K.max_form_degree = std::max(K.max_form_degree, dr.length() - 1);
    const int p = static_cast<int>(t.size()) - 1;
    for (int q = 0; q < dr.length(); ++q) {
      DoubleComplexCell& cell = K.cells[{p, q}];
      cell.cech_degree = p;
      cell.form_degree = q;
      cell.tuples.push_back(t);
      cell.ranks.push_back(dr.ranks[static_cast<std::size_t>(q)]);
    }
  }
  return K;
}

/// (-1)^p d on K^{p,q}.
inline CechCochain vertical_differential(const Cover& c, const CechCochain& s) {
  CechCochain r;
  r.cech_degree = s.cech_degree;
  r.form_degree = s.form_degree + 1;
  for (const auto& [t, w] : s.components) {
    DifferentialForm dw = d(c.algebra(t), w);
    dw.degree = r.form_degree;
    r.components.emplace(t, s.cech_degree % 2 ? -dw : dw);
  }
  return r;
}

/// An element of the total complex: one cochain per (p, q) with p + q fixed.
using TotalCochain = std::map<std::pair<int, int>, CechCochain>;

/// D = delta + (-1)^p d.
inline TotalCochain total_differential(const Cover& c, const TotalCochain& x) {
  TotalCochain r;
  auto accumulate = [&](CechCochain part) {
    const std::pair<int, int> key{part.cech_degree, part.form_degree};
    auto it = r.find(key);
    if (it == r.end()) {
      r.emplace(key, std::move(part));
      return;
    }
    for (auto& [t, w] : part.components) {
      auto jt = it->second.components.find(t);
      if (jt == it->second.components.end())
        it->second.components.emplace(t, w);
      else
        jt->second = normalize(c.algebra(t), jt->second + w);
    }
  };
  for (const auto& [key, s] : x) {
    if (s.cech_degree < c.max_cech_degree()) accumulate(cech_differential(c, s));
    accumulate(vertical_differential(c, s));
  }
  return r;
}

inline bool is_zero(const TotalCochain& x) {
  for (const auto& [key, s] : x)
    for (const auto& [t, w] : s.components)
      if (!w.is_zero()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Spectral sequence.

/// One overlap's cohomology inside an E1 cell, at coordinates [offset, offset + dim).
struct E1Block {
  Tuple tuple;
  int offset = 0;
  CohomologySpace space;
};

/// A cell of page m, described as a subquotient of the E1 cell.
struct PageCell {
  int cech_degree = 0;
  int form_degree = 0;
  std::vector<std::string> labels;
  std::vector<CohomologyPart> parts;
  PadicMatrix psi;
  PadicMatrix basis;     // columns: representatives in E1 coordinates
  PadicMatrix boundary;  // columns: E1 vectors that vanish on this page

  int dimension() const { return static_cast<int>(labels.size()); }
};

struct SpectralPage {
  int index = 1;
  std::map<std::pair<int, int>, PageCell> cells;
  // d_m leaving (p, q) towards (p + m, q - m + 1), in page coordinates
  std::map<std::pair<int, int>, PadicMatrix> differentials;
  std::shared_ptr<const Cover> cover;
  std::shared_ptr<const std::map<std::pair<int, int>, std::vector<E1Block>>> blocks;

  int dimension(int p, int q) const {
    auto it = cells.find({p, q});
    return it == cells.end() ? 0 : it->second.dimension();
  }

  int euler_characteristic() const {
    int chi = 0;
    for (const auto& [key, cell] : cells) chi += (key.first + key.second) % 2 ? -cell.dimension() : cell.dimension();
    return chi;
  }
};

namespace detail {

/// Coordinates of an E1 vector in a page cell; fails when it is not a cycle there.
inline PadicMatrix page_coordinates(const PageCell& cell, const PadicMatrix& v) {
  const PadicMatrix frame = PadicMatrix::hconcat(cell.boundary, cell.basis);
  if (frame.cols() == 0) return PadicMatrix(v.context(), 0, v.cols());
  auto y = solve(frame, v);
  if (!y) fail("cech_spectral", "NotACycle", "vector does not survive to this page");
  return y->block(cell.boundary.cols(), frame.cols(), 0, v.cols());
}

/// The cochain whose components are the basis forms weighted by an E1 vector.
inline CechCochain cochain_of(const std::vector<E1Block>& blocks, const PadicMatrix& v, int p, int q,
                              const Cover& c) {
  CechCochain s;
  s.cech_degree = p;
  s.form_degree = q;
  for (const auto& b : blocks) {
    const AlgebraPresentation& A = c.algebra(b.tuple);
    DifferentialForm w;
    w.degree = q;
    for (int j = 0; j < b.space.dimension(); ++j)
      w = w + v(b.offset + j, 0) * b.space.basis[static_cast<std::size_t>(j)];
    w.degree = q;
    s.components.emplace(b.tuple, normalize(A, w));
  }
  return s;
}

/// Coordinates of cohomology classes, and the primitive u with w = sum c_j b_j + d u.
inline std::pair<PadicMatrix, CechCochain> classes_of(const std::vector<E1Block>& blocks, const CechCochain& s,
                                                       int dim, const Cover& c) {
  PadicMatrix v(c.ctx, dim, 1);
  CechCochain u;
  u.cech_degree = s.cech_degree;
  u.form_degree = s.form_degree - 1;
  for (const auto& b : blocks) {
    const AlgebraPresentation& A = c.algebra(b.tuple);
    auto it = s.components.find(b.tuple);
    if (it == s.components.end()) continue;
    std::vector<PadicScalar> coords;
    if (s.form_degree == 0) {
      coords = reduce_function(A, it->second.coeff({}, A.zero()));
    } else {
      Reduction red = reduce_form(A, it->second);
      coords = red.coords;
      u.components.emplace(b.tuple, DifferentialForm::function(red.exact_part));
    }
    for (int j = 0; j < b.space.dimension(); ++j) v(b.offset + j, 0) = coords[static_cast<std::size_t>(j)];
  }
  return {v, u};
}

inline std::string combination_label(const std::vector<std::string>& labels, const PadicMatrix& col) {
  std::string s;
  for (int i = 0; i < col.rows(); ++i) {
    const PadicScalar& x = col(i, 0);
    if (x.is_zero()) continue;
    std::string coeff;
    if (x.valuation().value >= 0 && x.symmetric_lift() == 1)
      coeff = "";
    else if (x.valuation().value >= 0 && x.symmetric_lift() == -1)
      coeff = "-";
    else
      coeff = x.to_string() + "*";
    s += (s.empty() ? "" : " + ") + coeff + labels[static_cast<std::size_t>(i)];
  }
  return s.empty() ? "0" : s;
}

}  // namespace detail

/// E1^{p,q} = C^p(cover, H^q) with d1 induced by the Cech differential.
inline SpectralPage e1_page(const Cover& cover) {
  SpectralPage page;
  page.index = 1;
  page.cover = std::make_shared<const Cover>(cover);
  auto blocks = std::make_shared<std::map<std::pair<int, int>, std::vector<E1Block>>>();
  for (const auto& [t, x] : cover.intersections) {
    detail::require_supported(x.algebra);
    const std::vector<CohomologySpace> spaces = compute_cohomology(x.algebra);
    const int p = static_cast<int>(t.size()) - 1;
    for (const auto& h : spaces) {
      auto& list = (*blocks)[{p, h.degree}];
      const int offset = list.empty() ? 0 : list.back().offset + list.back().space.dimension();
      list.push_back({t, offset, h});
    }
  }
  for (const auto& [key, list] : *blocks) {
    PageCell cell;
    cell.cech_degree = key.first;
    cell.form_degree = key.second;
    for (const auto& b : list) {
      for (const auto& l : b.space.labels) cell.labels.push_back(Cover::label(b.tuple) + ": " + l);
      for (const auto& part : b.space.parts) cell.parts.push_back(part);
    }
    const int n = cell.dimension();
    cell.psi = PadicMatrix(cover.ctx, n, n);
    for (const auto& b : list)
      for (int i = 0; i < b.space.dimension(); ++i)
        for (int j = 0; j < b.space.dimension(); ++j) cell.psi(b.offset + i, b.offset + j) = b.space.psi(i, j);
    cell.basis = PadicMatrix::identity(cover.ctx, n);
    cell.boundary = PadicMatrix(cover.ctx, n, 0);
    page.cells.emplace(key, std::move(cell));
  }
  for (const auto& [key, cell] : page.cells) {
    const auto [p, q] = key;
    auto target = page.cells.find({p + 1, q});
    if (target == page.cells.end() || cell.dimension() == 0) continue;
    PadicMatrix D(cover.ctx, target->second.dimension(), cell.dimension());
    for (int j = 0; j < cell.dimension(); ++j) {
      const CechCochain s = detail::cochain_of(blocks->at(key), cell.basis.column(j), p, q, cover);
      const PadicMatrix v =
          detail::classes_of(blocks->at({p + 1, q}), cech_differential(cover, s), target->second.dimension(), cover).first;
      for (int i = 0; i < D.rows(); ++i) D(i, j) = v(i, 0);
    }
    page.differentials.emplace(key, D);
  }
  page.blocks = blocks;
  return page;
}

namespace detail {

/// d2 on (p, 1): lift, apply delta, peel off d u, apply delta again.
inline PadicMatrix second_differential(const SpectralPage& page, int p) {
  const Cover& c = *page.cover;
  const auto& blocks = *page.blocks;
  const PageCell& src = page.cells.at({p, 1});
  const PageCell& dst = page.cells.at({p + 2, 0});
  const int e1_target = static_cast<int>(dst.basis.rows());
  PadicMatrix D(c.ctx, dst.dimension(), src.dimension());
  for (int j = 0; j < src.dimension(); ++j) {
    const CechCochain w = cochain_of(blocks.at({p, 1}), src.basis.column(j), p, 1, c);
    const CechCochain dw = cech_differential(c, w);
    auto [coords, u] = classes_of(blocks.at({p + 1, 1}), dw, page.cells.at({p + 1, 1}).basis.rows(), c);
    if (!coords.is_zero()) fail("cech_spectral", "NotACycle", "class does not survive to E2");
    const CechCochain du = cech_differential(c, u);
    PadicMatrix v = classes_of(blocks.at({p + 2, 0}), du, e1_target, c).first;
    if (p % 2) v = c.ctx.integer(-1) * v;
    const PadicMatrix y = page_coordinates(dst, v);
    for (int i = 0; i < D.rows(); ++i) D(i, j) = y(i, 0);
  }
  return D;
}

}  // namespace detail

/// E_{m+1} = H(E_m, d_m), together with d_{m+1}.
inline SpectralPage next_page(const SpectralPage& page) {
  const int m = page.index;
  const PadicContext& ctx = page.cover->ctx;
  SpectralPage next;
  next.index = m + 1;
  next.cover = page.cover;
  next.blocks = page.blocks;
  for (const auto& [key, cell] : page.cells) {
    const auto [p, q] = key;
    const int n = cell.dimension();
    PadicMatrix Z = PadicMatrix::identity(ctx, n);
    if (auto out = page.differentials.find(key); out != page.differentials.end()) Z = kernel(out->second);
    PadicMatrix B(ctx, n, 0);
    if (auto in = page.differentials.find({p - m, q + m - 1}); in != page.differentials.end())
      B = column_space(in->second);
    // complete the boundaries to a basis of the cycles
    PadicMatrix C(ctx, n, 0), frame = B;
    int r = rank(frame);
    for (int j = 0; j < Z.cols(); ++j) {
      PadicMatrix trial = PadicMatrix::hconcat(frame, Z.column(j));
      const int rt = rank(trial);
      if (rt > r) {
        frame = trial;
        C = PadicMatrix::hconcat(C, Z.column(j));
        r = rt;
      }
    }
    PageCell nc;
    nc.cech_degree = p;
    nc.form_degree = q;
    nc.basis = C.cols() ? cell.basis * C : PadicMatrix(ctx, cell.basis.rows(), 0);
    nc.boundary = B.cols() ? PadicMatrix::hconcat(cell.boundary, cell.basis * B) : cell.boundary;
    const PadicMatrix local = PadicMatrix::hconcat(B, C);
    nc.psi = PadicMatrix(ctx, C.cols(), C.cols());
    if (C.cols()) {
      auto y = solve(local, cell.psi * C);
      if (!y) detail::fail("cech_spectral", "PsiIncompatible", "psi does not preserve the cycles of the page");
      nc.psi = y->block(B.cols(), local.cols(), 0, C.cols());
    }
    for (int j = 0; j < C.cols(); ++j) nc.labels.push_back(detail::combination_label(cell.labels, C.column(j)));
    if (C.cols() == n)
      nc.parts = cell.parts;
    else if (C.cols() > 0)
      nc.parts = {{"E(" + std::to_string(p) + "," + std::to_string(q) + ")", C.cols()}};
    next.cells.emplace(key, std::move(nc));
  }
  if (next.index == 2) {
    for (const auto& [key, cell] : next.cells) {
      const auto [p, q] = key;
      if (q != 1 || cell.dimension() == 0) continue;
      auto target = next.cells.find({p + 2, 0});
      if (target == next.cells.end() || target->second.dimension() == 0) continue;
      next.differentials.emplace(key, detail::second_differential(next, p));
    }
  }
  return next;
}

inline bool differentials_vanish(const SpectralPage& page) {
  for (const auto& [key, D] : page.differentials)
    if (!D.is_zero()) return false;
  return true;
}

/// E1, E2, ... up to the first page with vanishing differentials.
inline std::vector<SpectralPage> spectral_pages(const SpectralPage& e1) {
  int window = 0;
  for (const auto& [key, cell] : e1.cells) window = std::max(window, key.first + key.second + 1);
  std::vector<SpectralPage> pages{e1};
  int max_q = 0;
  for (const auto& [key, cell] : e1.cells) max_q = std::max(max_q, key.second);
  if (max_q > 1) detail::fail("cech_spectral", "UnsupportedFamily", "pages beyond d2 need forms of degree <= 1");
  while (!differentials_vanish(pages.back())) {
    if (pages.back().index > window + 1)
      detail::fail("cech_spectral", "NonConvergent", "nonzero differential past the window");
    pages.push_back(next_page(pages.back()));
  }
  return pages;
}

/// H^k = sum over p + q = k of the E_infinity graded pieces, psi block diagonal.
inline std::vector<CohomologySpace> converge(const SpectralPage& e1) {
  const std::vector<SpectralPage> pages = spectral_pages(e1);
  const SpectralPage& last = pages.back();
  int top = 0;
  for (const auto& [key, cell] : last.cells) top = std::max(top, key.first + key.second);
  std::vector<CohomologySpace> out;
  const PadicContext& ctx = e1.cover->ctx;
  for (int k = 0; k <= top; ++k) {
    CohomologySpace h;
    h.degree = k;
    std::vector<const PageCell*> pieces;
    for (int p = 0; p <= k; ++p)
      if (auto it = last.cells.find({p, k - p}); it != last.cells.end() && it->second.dimension() > 0)
        pieces.push_back(&it->second);
    int n = 0;
    for (const auto* c : pieces) n += c->dimension();
    h.psi = PadicMatrix(ctx, n, n);
    int off = 0;
    int eff = ctx.precision;
    for (const auto& [key, list] : *e1.blocks)
      for (const auto& b : list) eff = std::min(eff, b.space.effective_precision);
    for (const auto* c : pieces) {
      for (const auto& l : c->labels) h.labels.push_back(l);
      for (const auto& part : c->parts) h.parts.push_back(part);
      for (int i = 0; i < c->dimension(); ++i)
        for (int j = 0; j < c->dimension(); ++j) h.psi(off + i, off + j) = c->psi(i, j);
      off += c->dimension();
    }
    if (e1.cover->size() == 1) {
      // single patch: the E1 column is the cohomology itself, keep its forms
      for (const auto& b : e1.blocks->count({0, k}) ? e1.blocks->at({0, k}) : std::vector<E1Block>{})
        for (const auto& f : b.space.basis) h.basis.push_back(f);
    }
    h.precision = ctx.precision;
    h.effective_precision = std::min(eff, n ? h.psi.precision() : ctx.precision);
    h.degree_cap = e1.cover->patches.front().degree_cap;
    out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exactness of 0 -> A<1/f> -> prod A<1/f_i> => prod A<1/(f_i f_j)> at truncation.

struct ExactnessReport {
  bool exact = true;
  int samples_checked = 0;
  std::string witness;  // a kernel element with no preimage, when not exact
};

struct ExactnessOptions {
  int degree = 6;  // numerator degree bound
  int power = 2;   // denominators f_i^power
  int samples = 60;
  std::uint64_t seed = 20240601;
};

namespace detail {

inline std::vector<std::vector<mpq_class>> rational_kernel(std::vector<std::vector<mpq_class>> m, int ncols) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < ncols && row < static_cast<int>(m.size()); ++col) {
    int sel = -1;
    for (int i = row; i < static_cast<int>(m.size()); ++i)
      if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[static_cast<std::size_t>(sel)], m[static_cast<std::size_t>(row)]);
    auto& pr = m[static_cast<std::size_t>(row)];
    const mpq_class inv = 1 / pr[static_cast<std::size_t>(col)];
    for (auto& x : pr) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (static_cast<int>(i) == row || m[i][static_cast<std::size_t>(col)] == 0) continue;
      const mpq_class f = m[i][static_cast<std::size_t>(col)];
      for (int j = 0; j < ncols; ++j) m[i][static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
    }
    pivots.push_back(col);
    ++row;
  }
  std::vector<std::vector<mpq_class>> basis;
  for (int fcol = 0, k = 0; fcol < ncols; ++fcol) {
    if (k < static_cast<int>(pivots.size()) && pivots[static_cast<std::size_t>(k)] == fcol) {
      ++k;
      continue;
    }
    std::vector<mpq_class> v(static_cast<std::size_t>(ncols), mpq_class(0));
    v[static_cast<std::size_t>(fcol)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[static_cast<std::size_t>(pivots[r])] = -m[r][static_cast<std::size_t>(fcol)];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline RationalPoly rational_pow(const RationalPoly& a, int e) {
  RationalPoly r{mpq_class(1)};
  for (int i = 0; i < e; ++i) r = poly_mul(r, a);
  return r;
}

inline std::string poly_text(const RationalPoly& a) {
  std::string s;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0) continue;
    mpq_class c = a[i];
    std::string sign = c < 0 ? "-" : "+";
    if (c < 0) c = -c;
    std::string body;
    if (i == 0 || c != 1) body = c.get_str();
    if (i > 0) body += (body.empty() ? "" : "*") + std::string(i == 1 ? "x" : "x^" + std::to_string(i));
    s += s.empty() ? (sign == "-" ? "-" : "") + body : " " + sign + " " + body;
  }
  return s.empty() ? "0" : s;
}

inline int min_valuation(const RationalPoly& a, long p) {
  int m = std::numeric_limits<int>::max();
  for (const auto& c : a) {
    if (c == 0) continue;
    m = std::min(m, int_valuation(p, c.get_num()) - int_valuation(p, c.get_den()));
  }
  return m;
}

}  // namespace detail

/// Samples the kernel of the difference map at numerator degree <= degree and
/// checks each sample comes from A<1/f>. Works on the affine line and the torus.
inline ExactnessReport sheaf_exactness_check(const AlgebraPresentation& A, const std::vector<long>& f,
                                             const std::vector<std::vector<long>>& cover,
                                             const ExactnessOptions& opt = {}) {
  ExactnessReport rep;
  if ((A.family != Family::AffineLine && A.family != Family::Torus) || cover.empty()) {
    rep.exact = false;
    rep.witness = "unsupported input";
    return rep;
  }
  const long p = A.ctx.p;
  auto lift = [&](const std::vector<long>& a) {
    RationalPoly r;
    for (long c : a) r.push_back(mpq_class(c));
    if (A.family == Family::Torus) r.insert(r.begin(), mpq_class(0));  // x is a unit: fold it into the denominator
    trim(r);
    return r;
  };
  const RationalPoly F = lift(f);
  std::vector<RationalPoly> den;
  for (const auto& g : cover) den.push_back(detail::rational_pow(lift(g), opt.power));
  const int r = static_cast<int>(cover.size());
  const int slot = opt.degree + 1;
  const int ncols = slot * r;
  // a_i den_j - a_j den_i = 0 for i < j
  std::vector<std::vector<mpq_class>> eqs;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      const std::size_t rows = static_cast<std::size_t>(opt.degree) + std::max(den[static_cast<std::size_t>(i)].size(), den[static_cast<std::size_t>(j)].size());
      std::vector<std::vector<mpq_class>> block(rows, std::vector<mpq_class>(static_cast<std::size_t>(ncols), mpq_class(0)));
      for (int k = 0; k < slot; ++k) {
        for (std::size_t t = 0; t < den[static_cast<std::size_t>(j)].size(); ++t)
          block[static_cast<std::size_t>(k) + t][static_cast<std::size_t>(i * slot + k)] += den[static_cast<std::size_t>(j)][t];
        for (std::size_t t = 0; t < den[static_cast<std::size_t>(i)].size(); ++t)
          block[static_cast<std::size_t>(k) + t][static_cast<std::size_t>(j * slot + k)] -= den[static_cast<std::size_t>(i)][t];
      }
      for (auto& row : block) eqs.push_back(std::move(row));
    }
  const auto basis = detail::rational_kernel(eqs, ncols);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> coef(-5, 5);
  const int total = static_cast<int>(basis.size()) + (basis.empty() ? 0 : opt.samples);
  for (int s = 0; s < total; ++s) {
    std::vector<mpq_class> v(static_cast<std::size_t>(ncols), mpq_class(0));
    if (s < static_cast<int>(basis.size())) {
      v = basis[static_cast<std::size_t>(s)];
    } else {
      for (const auto& b : basis) {
        const int c = coef(rng);
        for (int k = 0; k < ncols; ++k) v[static_cast<std::size_t>(k)] += c * b[static_cast<std::size_t>(k)];
      }
    }
    std::vector<RationalPoly> a(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      a[static_cast<std::size_t>(i)].assign(v.begin() + i * slot, v.begin() + (i + 1) * slot);
      trim(a[static_cast<std::size_t>(i)]);
    }
    // scale to primitive p-integral numerators
    int vmin = std::numeric_limits<int>::max();
    for (const auto& ai : a)
      if (!ai.empty()) vmin = std::min(vmin, detail::min_valuation(ai, p));
    if (vmin == std::numeric_limits<int>::max()) continue;
    const mpq_class scale = vmin >= 0 ? mpq_class(1, 1) / mpq_class(prime_power(p, vmin)) : mpq_class(prime_power(p, -vmin));
    for (auto& ai : a)
      for (auto& c : ai) c *= scale;
    ++rep.samples_checked;
    // look for b with a_0 / den_0 = b / F^m
    bool found = false;
    const int mmax = opt.power * static_cast<int>(den.front().size()) + opt.degree;
    for (int m = 0; m <= mmax && !found; ++m) {
      const RationalPoly Fm = detail::rational_pow(F, m);
      auto [b, rem] = poly_divmod(poly_mul(a.front(), Fm), den.front());
      if (!rem.empty()) continue;
      bool consistent = true;
      for (int i = 1; i < r && consistent; ++i) {
        RationalPoly lhs = poly_mul(b, den[static_cast<std::size_t>(i)]), rhs = poly_mul(a[static_cast<std::size_t>(i)], Fm);
        trim(lhs);
        trim(rhs);
        consistent = lhs == rhs;
      }
      found = consistent && (b.empty() || detail::min_valuation(b, p) >= 0);
    }
    if (!found) {
      rep.exact = false;
      RationalPoly num = a.front(), dn = den.front();
      const RationalPoly g = poly_gcd(num, dn);
      if (g.size() > 1) {
        num = poly_divmod(num, g).first;
        dn = poly_divmod(dn, g).first;
      }
      const mpq_class lead = dn.back();
      for (auto& c : num) c /= lead;
      for (auto& c : dn) c /= lead;
      rep.witness = "(" + detail::poly_text(num) + ")/(" + detail::poly_text(dn) + ")";
      return rep;
    }
  }
  return rep;
}

}  // namespace mwzeta
