// zeta: count points and assemble zeta functions from a variety spec.
//
//   zeta count --spec samples/hyperelliptic.spec
//   zeta oracle --spec samples/torus.spec --smax 4
//   zeta cohomology --spec samples/projective_line.spec --format table
//   zeta check --suite exact-sequence

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mwzeta/checks.hpp"
#include "mwzeta/pipeline.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPrecision = 4;

struct Options {
  std::string spec_path;
  std::optional<int> smax;
  std::string precision = "auto";
  bool no_oracle = false;
  std::string format = "json";
  std::string out;
  bool timing = false;
  std::string suite = "all";
  std::uint64_t seed = 20240601;
};

mwzeta::RunOptions run_options(const Options& o) {
  mwzeta::RunOptions r;
  r.smax = o.smax;
  r.no_oracle = o.no_oracle;
  if (o.precision != "auto") {
    const auto comma = o.precision.find(',');
    if (comma == std::string::npos)
      mwzeta::detail::fail("zeta_cli", "ParseError", "--precision must be auto or N,D");
    try {
      r.target_precision = std::stoi(o.precision.substr(0, comma));
      r.degree_cap = std::stoi(o.precision.substr(comma + 1));
    } catch (const std::exception&) {
      mwzeta::detail::fail("zeta_cli", "ParseError", "--precision must be auto or N,D");
    }
    if (*r.target_precision < 1 || *r.degree_cap < 1)
      mwzeta::detail::fail("zeta_cli", "ParseError", "--precision needs positive N and D");
  }
  return r;
}

std::string cell(const ordered_json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string poly_text(const ordered_json& coeffs) {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::string c = cell(coeffs[i]);
    if (c == "0") continue;
    const bool neg = c[0] == '-';
    const std::string mag = neg ? c.substr(1) : c;
    if (!out.empty()) out += neg ? " - " : " + ";
    else if (neg) out += "-";
    if (i == 0 || mag != "1") out += mag;
    if (i >= 1) out += "t";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

std::string table(const ordered_json& j) {
  std::ostringstream os;
  if (j.contains("input")) {
    const auto& in = j["input"];
    os << "family      " << cell(in["family"]) << "   p = " << in["p"] << "   smax = " << in["smax"] << "\n";
  }
  if (j.contains("precision")) {
    const auto& pr = j["precision"];
    os << "precision   N = " << pr["N"] << "  D = " << pr["D"] << "  working = " << pr["working"]
       << "  effective = " << pr["effective"] << "\n";
  }
  if (j.contains("cohomology"))
    for (const auto& h : j["cohomology"]) {
      os << "H^" << h["degree"] << "         dim " << h["dimension"];
      for (const auto& part : h["parts"]) os << "  " << cell(part["name"]) << ":" << part["dimension"];
      os << "\n";
    }
  if (j.contains("psi"))
    for (const auto& block : j["psi"]) {
      os << "psi on H^" << block["degree"] << "\n";
      for (const auto& row : block["psi"]) {
        os << "   ";
        for (const auto& e : row) os << " " << cell(e);
        os << "\n";
      }
    }
  if (j.contains("char_polys"))
    for (const auto& f : j["char_polys"])
      os << "det H^" << f["degree"] << " " << cell(f["part"]) << "   " << poly_text(f["integer"]) << "\n";
  if (j.contains("counts")) {
    const auto& c = j["counts"];
    os << "s           ";
    const auto& base = c.contains("lefschetz") ? c["lefschetz"] : c["oracle"];
    for (std::size_t s = 1; s <= base.size(); ++s) os << s << "\t";
    os << "\n";
    for (const char* key : {"lefschetz", "oracle"}) {
      if (!c.contains(key)) continue;
      os << key << std::string(12 - std::string(key).size(), ' ');
      if (c[key].is_array())
        for (const auto& v : c[key]) os << cell(v) << "\t";
      else
        os << cell(c[key]) << " (" << cell(c["oracle_decision"]) << ")";
      os << "\n";
    }
  }
  if (j.contains("zeta"))
    os << "zeta        (" << poly_text(j["zeta"]["numerator"]) << ") / (" << poly_text(j["zeta"]["denominator"])
       << ")\n";
  if (j.contains("stability")) os << "stability   " << cell(j["stability"]["verdict"]) << "\n";
  if (j.contains("suites"))
    for (const auto& s : j["suites"]) {
      os << (s["ok"].get<bool>() ? "PASS " : "FAIL ") << cell(s["name"]) << "  " << s["cases"] << " cases";
      if (!s["ok"].get<bool>()) os << "  first failure: " << cell(s["first_failure"]);
      os << "\n";
    }
  if (j.contains("status")) os << "status      " << cell(j["status"]) << "\n";
  return os.str();
}

void emit(const ordered_json& j, const Options& o) {
  const std::string text = o.format == "table" ? table(j) : j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) mwzeta::detail::fail("zeta_cli", "IoError", "cannot write " + o.out);
  f << text;
}

int run_check(const Options& o) {
  ordered_json j;
  j["schema_version"] = mwzeta::kReportSchemaVersion;
  j["seed"] = o.seed;
  j["suites"] = ordered_json::array();
  bool found = false, all_ok = true;
  for (const auto& suite : mwzeta::property_suites()) {
    if (o.suite != "all" && o.suite != suite.name) continue;
    found = true;
    const auto start = std::chrono::steady_clock::now();
    const mwzeta::SuiteResult r = suite.run(o.seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all_ok = all_ok && r.ok();
    ordered_json s{{"name", suite.name},
                   {"detail", r.name},
                   {"cases", r.cases},
                   {"failures", r.failures},
                   {"first_failure", r.first_failure},
                   {"ok", r.ok()}};
    if (o.timing) s["seconds"] = secs;
    j["suites"].push_back(s);
  }
  if (!found) mwzeta::detail::fail("zeta_cli", "UnknownSuite", "no suite named '" + o.suite + "'");
  j["status"] = all_ok ? "OK" : "FAILED";
  emit(j, o);
  return all_ok ? kExitOk : kExitError;
}

int dispatch(const std::string& command, const Options& o) {
  if (command == "check") return run_check(o);
  const mwzeta::VarietySpec spec = mwzeta::load_spec(o.spec_path);
  const mwzeta::RunOptions ro = run_options(o);
  const auto start = std::chrono::steady_clock::now();
  ordered_json j;
  int code = kExitOk;
  if (command == "count") {
    mwzeta::ZetaReport rep = mwzeta::run(spec, ro);
    code = rep.exit_code();
    j = std::move(rep.json);
  } else if (command == "oracle") {
    j = mwzeta::oracle_report(spec, ro);
  } else {
    j = mwzeta::cohomology_report(spec, ro);
  }
  if (o.timing)
    j["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  emit(j, o);
  return code;
}

int exit_code_for(const mwzeta::Error& e) {
  const std::string code = e.code();
  if (code == "ValidationFailed" || code == "ParseError") return kExitValidation;
  if (code == "AmbiguousRounding" || code == "PrecisionExhausted" || code == "OutOfRange" ||
      code == "NotIntegral")
    return kExitPrecision;
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point counts and zeta functions through Monsky-Washnitzer cohomology"};
  app.require_subcommand(1);
  Options o;

  auto add_spec_flags = [&](CLI::App* sub, bool precision) {
    sub->add_option("--spec", o.spec_path, "variety spec file")->required()->check(CLI::ExistingFile);
    sub->add_option("--smax", o.smax, "number of N_s values")->check(CLI::PositiveNumber);
    if (precision) sub->add_option("--precision", o.precision, "auto or N,D");
  };
  auto add_output_flags = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_flag("--timing", o.timing, "add wall-clock timing to the report");
  };

  CLI::App* count = app.add_subcommand("count", "full pipeline with oracle reconciliation");
  add_spec_flags(count, true);
  count->add_flag("--no-oracle", o.no_oracle, "skip point enumeration");
  add_output_flags(count);

  CLI::App* oracle = app.add_subcommand("oracle", "point counts by enumeration only");
  add_spec_flags(oracle, false);
  add_output_flags(oracle);

  CLI::App* cohomology = app.add_subcommand("cohomology", "cohomology dimensions and psi matrices");
  add_spec_flags(cohomology, true);
  add_output_flags(cohomology);

  CLI::App* check = app.add_subcommand("check", "randomized property suites");
  check->add_option("--suite", o.suite, "suite name or all");
  check->add_option("--seed", o.seed, "random seed");
  add_output_flags(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, o);
  } catch (const mwzeta::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
