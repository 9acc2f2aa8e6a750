#pragma once

// End-to-end run for a variety spec: validation, presentation, cohomology with
// psi, Lefschetz counts, zeta assembly, the enumeration oracle, and the
// stability re-run at (D + 4, N + 5). Produces the versioned JSON report.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwzeta/cech.hpp"
#include "mwzeta/error.hpp"
#include "mwzeta/finite_field.hpp"
#include "mwzeta/mw_engine.hpp"
#include "mwzeta/nuclear.hpp"
#include "mwzeta/spec_file.hpp"

namespace mwzeta {

inline constexpr int kReportSchemaVersion = 1;

struct Diagnostic {
  std::string code;
  std::string message;
};

namespace detail {

inline std::optional<Family> single_family(const std::string& name) {
  if (name == "affine_line") return Family::AffineLine;
  if (name == "torus") return Family::Torus;
  if (name == "hyperelliptic") return Family::Hyperelliptic;
  return std::nullopt;
}

inline std::vector<mpz_class> to_mpz(const std::vector<long>& a) {
  return std::vector<mpz_class>(a.begin(), a.end());
}

inline int hyperelliptic_genus(const VarietySpec& s) {
  if (s.has("genus")) return s.genus;
  return s.f.size() >= 2 ? (static_cast<int>(s.f.size()) - 2) / 2 : 0;
}

}  // namespace detail

/// The oracle's view of the spec's variety (the open affine, y inverted).
inline GluedSpec oracle_variety(const VarietySpec& s) {
  auto x_term = [](int nvars, int var) {
    IntPolynomial::Term t;
    t.coeff = 1;
    t.exps.assign(static_cast<std::size_t>(nvars), 0);
    t.exps[static_cast<std::size_t>(var)] = 1;
    return IntPolynomial{{t}};
  };
  auto patch = [&](const std::string& kind) {
    AffinePatchSpec a;
    a.nvars = 1;
    if (kind == "torus") a.inverted.push_back(x_term(1, 0));
    return a;
  };
  GluedSpec g;
  if (s.family == "hyperelliptic") {
    AffinePatchSpec a;
    a.nvars = 2;
    IntPolynomial rel;
    rel.terms.push_back({1, {0, 2}});
    for (std::size_t i = 0; i < s.f.size(); ++i)
      if (s.f[i] != 0) rel.terms.push_back({-s.f[i], {static_cast<int>(i), 0}});
    a.relations.push_back(rel);
    a.inverted.push_back(x_term(2, 1));
    g.patches.push_back(a);
    return g;
  }
  if (s.family != "glued") {
    g.patches.push_back(patch(s.family));
    return g;
  }
  for (const auto& kind : s.patches) g.patches.push_back(patch(kind));
  const long p = s.p;
  for (const auto& [key, m] : s.maps) {
    g.maps[key] = MonomialMap{{{m.coeff, {m.exponent}}}};
    // reverse map; exponents are +-1 after validation
    const long cinv = detail::inv_mod(((m.coeff % p) + p) % p, p);
    const long back = m.exponent == 1 ? cinv : m.coeff;
    g.maps[{key.second, key.first}] = MonomialMap{{{back, {m.exponent}}}};
  }
  return g;
}

inline std::vector<Diagnostic> validate(const VarietySpec& s) {
  std::vector<Diagnostic> out;
  auto add = [&](const std::string& code, const std::string& msg) { out.push_back({code, msg}); };
  if (!s.has("p")) add("MissingField", "p is required");
  if (!s.has("family")) add("MissingField", "family is required");
  if (s.has("p") && !is_prime(s.p)) add("NotPrime", std::to_string(s.p) + " is not prime");
  if (s.smax < 1) add("BadSmax", "smax must be at least 1");
  if (s.smax > kMaxExtensionDegree) add("BadSmax", "smax above " + std::to_string(kMaxExtensionDegree));
  if (s.target_precision && (*s.target_precision < 1 || !s.degree_cap || *s.degree_cap < 1))
    add("BadPrecision", "precision must be auto or positive N,D");
  if (!s.has("family") || !s.has("p") || !is_prime(s.p)) return out;
  const long p = s.p;
  if (s.family == "affine_line" || s.family == "torus") return out;
  if (s.family == "hyperelliptic") {
    if (!s.has("f")) {
      add("MissingField", "hyperelliptic needs f");
      return out;
    }
    if (p == 2) add("PrimeTooSmall", "hyperelliptic curves need an odd prime");
    const int g = detail::hyperelliptic_genus(s);
    if (g < 1 || static_cast<int>(s.f.size()) != 2 * g + 2)
      add("DegreeMismatch", "deg f must be 2g+1 = " + std::to_string(2 * g + 1));
    else if (s.f.back() % p == 0)
      add("DegreeMismatch", "leading coefficient of f vanishes mod p");
    else if (p != 2 && !is_squarefree_mod_p(detail::to_mpz(s.f), p))
      add("NotSquarefree", "f is not squarefree mod " + std::to_string(p));
    return out;
  }
  if (s.family != "glued") {
    add("UnsupportedFamily", "unknown family '" + s.family + "'");
    return out;
  }
  if (s.patches.empty()) add("MissingField", "glued needs patch.0, patch.1, ...");
  for (std::size_t i = 0; i < s.patches.size(); ++i) {
    if (s.patches[i].empty())
      add("MissingField", "patch." + std::to_string(i) + " is missing");
    else if (s.patches[i] != "affine_line" && s.patches[i] != "torus")
      add("UnsupportedFamily", "patch." + std::to_string(i) + " must be affine_line or torus");
  }
  const int n = static_cast<int>(s.patches.size());
  for (const auto& [key, m] : s.maps) {
    const auto [i, j] = key;
    const std::string name = "map." + std::to_string(i) + "." + std::to_string(j);
    if (i < 0 || j >= n || i >= j) add("InconsistentGluing", name + " must have 0 <= i < j < #patches");
    if (m.coeff % p == 0) add("InconsistentGluing", name + " has a coefficient divisible by p");
    if (m.exponent != 1 && m.exponent != -1) add("InconsistentGluing", name + " must have exponent +-1");
  }
  for (const auto& [ij, a] : s.maps)
    for (const auto& [jk, b] : s.maps) {
      if (ij.second != jk.first) continue;
      auto ik = s.maps.find({ij.first, jk.second});
      if (ik == s.maps.end()) continue;
      // x_k = c_jk (c_ij x_i^e_ij)^e_jk must equal c_ik x_i^e_ik
      mpq_class c = b.coeff;
      c *= b.exponent > 0 ? mpq_class(a.coeff) : mpq_class(1, 1) / mpq_class(a.coeff);
      if (a.exponent * b.exponent != ik->second.exponent || c != mpq_class(ik->second.coeff))
        add("InconsistentGluing", "maps disagree on the overlap of patches " + std::to_string(ij.first) + ", " +
                                      std::to_string(ij.second) + ", " + std::to_string(jk.second));
    }
  if (!out.empty()) return out;
  try {
    count_glued_points(oracle_variety(s), build_extension(p, 1));
  } catch (const Error& e) {
    add(e.code(), e.what());
  }
  return out;
}

/// Upper bound for N_s, used to certify integer rounding.
inline mpz_class count_bound(const VarietySpec& s, int smax) {
  const mpz_class q = prime_power(s.p, smax);
  if (s.family == "hyperelliptic") {
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), q.get_mpz_t());
    if (root * root < q) root += 1;
    return q + 1 + 2 * detail::hyperelliptic_genus(s) * root;
  }
  if (s.family == "glued") return static_cast<unsigned long>(std::max<std::size_t>(s.patches.size(), 1)) * q;
  return q;
}

/// One cohomological computation at a fixed precision plan.
struct CohomologyRun {
  PrecisionPlan plan;
  std::vector<CohomologySpace> spaces;
  std::vector<DegreeFactor> factors;
  std::vector<mpz_class> counts;
  ZetaFunction zeta;
  int effective_precision = 0;
};

namespace detail {

inline int digits_needed(long p, const mpz_class& bound) {
  int k = 0;
  mpz_class v = 1;
  while (v <= bound) v *= p, ++k;
  return k;
}

inline PrecisionPlan plan_for(const VarietySpec& s, int smax, std::optional<int> N, std::optional<int> D) {
  const long p = s.p;
  if (s.family == "hyperelliptic") {
    const int g = hyperelliptic_genus(s);
    if (!N) {
      mpz_class b = count_bound(s, smax);
      for (int i = 0; i <= 2 * g; ++i) b = std::max(b, coefficient_bound(p, "odd", 2 * g, i));
      N = std::max(default_target_precision(p, g), digits_needed(p, 2 * b) + 1);
    }
    PrecisionPlan plan = plan_precision(Family::Hyperelliptic, p, g, N, D);
    plan.automatic = !s.target_precision;
    return plan;
  }
  PrecisionPlan plan;
  plan.automatic = !s.target_precision;
  plan.target = N.value_or(digits_needed(p, 2 * count_bound(s, smax)) + 2);
  plan.degree_cap = D.value_or(static_cast<int>(p) + 8);
  plan.working = plan.target;
  return plan;
}

}  // namespace detail

inline CohomologyRun cohomology_run(const VarietySpec& s, int smax, std::optional<int> N, std::optional<int> D) {
  CohomologyRun r;
  r.plan = detail::plan_for(s, smax, N, D);
  const PadicContext ctx{s.p, r.plan.working};
  if (s.family == "glued") {
    std::vector<Family> fams;
    for (const auto& k : s.patches) fams.push_back(k == "torus" ? Family::Torus : Family::AffineLine);
    r.spaces = converge(e1_page(glued_cover(ctx, r.plan.degree_cap, fams, s.maps)));
  } else if (s.family == "hyperelliptic") {
    r.spaces = compute_cohomology(hyperelliptic(ctx, detail::to_mpz(s.f), r.plan.degree_cap));
  } else if (s.family == "torus") {
    r.spaces = compute_cohomology(torus(ctx, r.plan.degree_cap));
  } else {
    r.spaces = compute_cohomology(affine_line(ctx, r.plan.degree_cap));
  }
  r.effective_precision = ctx.precision;
  for (const auto& h : r.spaces)
    if (h.dimension()) r.effective_precision = std::min(r.effective_precision, h.effective_precision);
  for (int k = 1; k <= smax; ++k) {
    PadicScalar n = lefschetz_count(r.spaces, k).with_precision(r.effective_precision);
    r.counts.push_back(round_count(n, count_bound(s, k)));
  }
  const long p = s.p;
  r.factors = rounded_factors(r.spaces, [p](const std::string& part, int dim, int i) {
    return coefficient_bound(p, part, dim, i);
  });
  r.zeta = zeta_assemble(r.factors, r.counts);
  return r;
}

/// N_s by enumeration, s = 1..smax.
inline std::vector<mpz_class> oracle_counts(const VarietySpec& s, int smax,
                                            std::uint64_t cap = kDefaultEnumerationCap) {
  const GluedSpec g = oracle_variety(s);
  std::vector<mpz_class> out;
  for (int k = 1; k <= smax; ++k) {
    const FieldDesc field = build_extension(s.p, k, kMaxExtensionDegree);
    const std::uint64_t n = g.patches.size() == 1 ? count_affine_points(g.patches.front(), field, cap)
                                                   : count_glued_points(g, field, cap);
    out.push_back(mpz_class(std::to_string(n)));
  }
  return out;
}

/// Whether enumeration fits under the cap for every s <= smax.
inline bool oracle_feasible(const VarietySpec& s, int smax, std::uint64_t cap = kDefaultEnumerationCap) {
  const int nvars = s.family == "hyperelliptic" ? 2 : 1;
  return prime_power(s.p, smax * nvars) <= mpz_class(std::to_string(cap));
}

struct RunOptions {
  std::optional<int> smax;
  std::optional<int> target_precision;
  std::optional<int> degree_cap;
  bool no_oracle = false;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

struct ZetaReport {
  std::string status;  // OK | FAILED | PRECISION_UNSTABLE
  nlohmann::ordered_json json;

  int exit_code() const { return status == "OK" ? 0 : status == "FAILED" ? 3 : 4; }
};

namespace detail {

inline nlohmann::ordered_json integer_json(const mpz_class& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

inline nlohmann::ordered_json integers_json(const std::vector<mpz_class>& a) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& v : a) out.push_back(integer_json(v));
  return out;
}

inline nlohmann::ordered_json input_json(const VarietySpec& s, int smax, const RunOptions& o) {
  nlohmann::ordered_json in;
  in["p"] = s.p;
  in["family"] = s.family;
  if (s.family == "hyperelliptic") {
    in["genus"] = hyperelliptic_genus(s);
    in["f"] = s.f;
  }
  if (s.family == "glued") {
    in["patches"] = s.patches;
    nlohmann::ordered_json maps = nlohmann::ordered_json::array();
    for (const auto& [key, m] : s.maps)
      maps.push_back({{"from", key.first}, {"to", key.second}, {"coeff", m.coeff}, {"exponent", m.exponent}});
    in["maps"] = maps;
  }
  in["smax"] = smax;
  const auto N = o.target_precision ? o.target_precision : s.target_precision;
  const auto D = o.degree_cap ? o.degree_cap : s.degree_cap;
  if (N && D)
    in["precision"] = {{"N", *N}, {"D", *D}};
  else
    in["precision"] = "auto";
  in["oracle"] = s.oracle && !o.no_oracle;
  return in;
}

inline nlohmann::ordered_json spaces_json(const std::vector<CohomologySpace>& spaces) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& h : spaces) {
    nlohmann::ordered_json parts = nlohmann::ordered_json::array();
    for (const auto& part : h.parts) parts.push_back({{"name", part.name}, {"dimension", part.dimension}});
    out.push_back({{"degree", h.degree}, {"dimension", h.dimension()}, {"basis", h.labels}, {"parts", parts}});
  }
  return out;
}

inline nlohmann::ordered_json psi_json(const std::vector<CohomologySpace>& spaces) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& h : spaces) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < h.psi.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int j = 0; j < h.psi.cols(); ++j) row.push_back(h.psi(i, j).to_string());
      rows.push_back(row);
    }
    out.push_back({{"degree", h.degree}, {"effective_precision", h.effective_precision}, {"psi", rows}});
  }
  return out;
}

inline nlohmann::ordered_json factors_json(const std::vector<DegreeFactor>& factors) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& f : factors) {
    nlohmann::ordered_json padic = nlohmann::ordered_json::array();
    for (int i = 0; i <= static_cast<int>(f.det.size()) - 1; ++i) padic.push_back(f.padic[i].to_string());
    out.push_back({{"degree", f.degree}, {"part", f.part}, {"padic", padic}, {"integer", integers_json(f.det)}});
  }
  return out;
}

inline nlohmann::ordered_json plan_json(const PrecisionPlan& plan, int effective) {
  return {{"N", plan.target},
          {"D", plan.degree_cap},
          {"working", plan.working},
          {"effective", effective},
          {"automatic", plan.automatic}};
}

}  // namespace detail

/// Main run with automatic N bumps when rounding is ambiguous under the auto policy.
inline CohomologyRun certified_run(const VarietySpec& s, int smax, std::optional<int> N, std::optional<int> D) {
  const bool automatic = !N && !D;
  std::optional<int> n = N;
  for (int attempt = 0;; ++attempt) {
    try {
      return cohomology_run(s, smax, n, D);
    } catch (const Error& e) {
      const bool precision_issue = e.code() == "AmbiguousRounding" || e.code() == "PrecisionExhausted";
      if (!automatic || !precision_issue || attempt >= 3) throw;
      n = detail::plan_for(s, smax, n, D).target + 2;
    }
  }
}

inline ZetaReport run(const VarietySpec& s, const RunOptions& o = {}) {
  const auto diags = validate(s);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d.code + ": " + d.message;
    detail::fail("zeta_cli", "ValidationFailed", msg);
  }
  const int smax = o.smax.value_or(s.smax);
  const auto N = o.target_precision ? o.target_precision : s.target_precision;
  const auto D = o.degree_cap ? o.degree_cap : s.degree_cap;

  ZetaReport rep;
  const CohomologyRun main = certified_run(s, smax, N, D);

  // stability re-run at (D + 4, N + 5)
  const int N2 = main.plan.target + 5, D2 = main.plan.degree_cap + 4;
  std::string verdict = "stable", detail_msg;
  try {
    const CohomologyRun again = cohomology_run(s, smax, N2, D2);
    bool same = again.factors.size() == main.factors.size() && again.counts == main.counts;
    for (std::size_t i = 0; same && i < main.factors.size(); ++i) same = again.factors[i].det == main.factors[i].det;
    if (!same) verdict = "unstable";
  } catch (const Error& e) {
    verdict = "unstable";
    detail_msg = e.qualified_code();
  }

  // oracle
  nlohmann::ordered_json oracle_json;
  std::string decision;
  std::optional<std::vector<mpz_class>> oracle;
  if (!s.oracle || o.no_oracle) {
    decision = "disabled";
  } else if (!oracle_feasible(s, smax, o.enumeration_cap)) {
    decision = "skipped: above enumeration cap";
  } else {
    decision = "ran";
    oracle = oracle_counts(s, smax, o.enumeration_cap);
  }
  const bool reconciled = !oracle || *oracle == main.counts;

  rep.status = !reconciled ? "FAILED" : verdict == "stable" ? "OK" : "PRECISION_UNSTABLE";
  auto& j = rep.json;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = detail::input_json(s, smax, o);
  j["precision"] = detail::plan_json(main.plan, main.effective_precision);
  j["cohomology"] = detail::spaces_json(main.spaces);
  j["char_polys"] = detail::factors_json(main.factors);
  j["counts"] = {{"lefschetz", detail::integers_json(main.counts)},
                 {"oracle", oracle ? detail::integers_json(*oracle) : nlohmann::ordered_json("skipped")},
                 {"oracle_decision", decision},
                 {"reconciled", reconciled}};
  j["zeta"] = {{"numerator", detail::integers_json(main.zeta.numerator)},
               {"denominator", detail::integers_json(main.zeta.denominator)}};
  j["stability"] = {{"verdict", verdict}, {"rerun", {{"N", N2}, {"D", D2}}}};
  if (!detail_msg.empty()) j["stability"]["error"] = detail_msg;
  j["status"] = rep.status;
  return rep;
}

/// Dimensions and psi matrices only.
inline nlohmann::ordered_json cohomology_report(const VarietySpec& s, const RunOptions& o = {}) {
  const auto diags = validate(s);
  if (!diags.empty()) detail::fail("zeta_cli", "ValidationFailed", diags.front().code + ": " + diags.front().message);
  const int smax = o.smax.value_or(s.smax);
  const auto N = o.target_precision ? o.target_precision : s.target_precision;
  const auto D = o.degree_cap ? o.degree_cap : s.degree_cap;
  const CohomologyRun r = certified_run(s, smax, N, D);
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = detail::input_json(s, smax, o);
  j["precision"] = detail::plan_json(r.plan, r.effective_precision);
  j["cohomology"] = detail::spaces_json(r.spaces);
  j["psi"] = detail::psi_json(r.spaces);
  return j;
}

/// Enumeration counts only.
inline nlohmann::ordered_json oracle_report(const VarietySpec& s, const RunOptions& o = {}) {
  const auto diags = validate(s);
  if (!diags.empty()) detail::fail("zeta_cli", "ValidationFailed", diags.front().code + ": " + diags.front().message);
  const int smax = o.smax.value_or(s.smax);
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = detail::input_json(s, smax, o);
  j["counts"] = {{"oracle", detail::integers_json(oracle_counts(s, smax, o.enumeration_cap))}};
  return j;
}

}  // namespace mwzeta
