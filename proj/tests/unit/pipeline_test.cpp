#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "mwzeta/pipeline.hpp"
#include "mwzeta/spec_file.hpp"

using namespace mwzeta;

namespace {

std::string sample(const std::string& name) { return std::string(MWZETA_SAMPLES_DIR) + "/" + name; }

std::vector<std::string> codes(const std::vector<Diagnostic>& d) {
  std::vector<std::string> out;
  for (const auto& x : d) out.push_back(x.code);
  return out;
}

std::vector<long> longs(const nlohmann::ordered_json& a) { return a.get<std::vector<long>>(); }

}  // namespace

TEST(Validate, AcceptsTheSamples) {
  for (const char* name : {"torus.spec", "projective_line.spec", "hyperelliptic.spec"})
    EXPECT_TRUE(validate(load_spec(sample(name))).empty()) << name;
}

TEST(Validate, ReportsBadInputs) {
  EXPECT_EQ(codes(validate(load_spec(sample("invalid/not_prime.spec")))), (std::vector<std::string>{"NotPrime"}));
  EXPECT_EQ(codes(validate(load_spec(sample("invalid/not_squarefree.spec")))),
            (std::vector<std::string>{"NotSquarefree"}));
  EXPECT_EQ(codes(validate(parse_spec_string("family = torus\n"))), (std::vector<std::string>{"MissingField"}));
  EXPECT_EQ(codes(validate(parse_spec_string("p = 5\nfamily = sphere\n"))),
            (std::vector<std::string>{"UnsupportedFamily"}));
  EXPECT_EQ(codes(validate(parse_spec_string("p = 7\nfamily = hyperelliptic\ngenus = 1\nf = 1, 1, 1\n"))),
            (std::vector<std::string>{"DegreeMismatch"}));
}

TEST(Validate, ReportsInconsistentGluing) {
  const std::string two = "p = 5\nfamily = glued\npatch.0 = affine_line\npatch.1 = affine_line\n";
  EXPECT_EQ(codes(validate(parse_spec_string(two + "map.0.1 = 5*x^-1\n"))),
            (std::vector<std::string>{"InconsistentGluing"}));
  EXPECT_EQ(codes(validate(parse_spec_string(two + "map.0.1 = 1*x^2\n"))),
            (std::vector<std::string>{"InconsistentGluing"}));
  const std::string three = "p = 5\nfamily = glued\npatch.0 = torus\npatch.1 = torus\npatch.2 = torus\n"
                            "map.0.1 = 2*x^1\nmap.1.2 = 1*x^1\nmap.0.2 = 3*x^1\n";
  EXPECT_EQ(codes(validate(parse_spec_string(three))), (std::vector<std::string>{"InconsistentGluing"}));
}

TEST(SpecFile, FormatRoundTrips) {
  for (const char* name : {"torus.spec", "projective_line.spec", "hyperelliptic.spec"}) {
    const VarietySpec a = load_spec(sample(name));
    const VarietySpec b = parse_spec_string(format_spec(a));
    EXPECT_EQ(format_spec(b), format_spec(a)) << name;
    EXPECT_EQ(b.p, a.p);
    EXPECT_EQ(b.f, a.f);
    EXPECT_EQ(b.patches, a.patches);
  }
}

TEST(SpecFile, ParseErrorsCarryTheLine) {
  try {
    parse_spec_string("p = 5\nthis line has no key\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "zeta_cli.ParseError");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_spec_string("p = five\n"), Error);
  EXPECT_THROW(load_spec(sample("does_not_exist.spec")), Error);
}

TEST(Run, TorusOverF5) {
  const ZetaReport r = run(load_spec(sample("torus.spec")));
  EXPECT_EQ(r.status, "OK");
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(longs(r.json["counts"]["lefschetz"]), (std::vector<long>{4, 24, 124}));
  EXPECT_EQ(longs(r.json["counts"]["oracle"]), (std::vector<long>{4, 24, 124}));
  EXPECT_EQ(longs(r.json["zeta"]["numerator"]), (std::vector<long>{1, -1}));
  EXPECT_EQ(longs(r.json["zeta"]["denominator"]), (std::vector<long>{1, -5}));
  EXPECT_EQ(r.json["stability"]["verdict"], "stable");
}

TEST(Run, ProjectiveLineByGluing) {
  const ZetaReport r = run(load_spec(sample("projective_line.spec")));
  EXPECT_EQ(r.status, "OK");
  EXPECT_EQ(longs(r.json["counts"]["lefschetz"]), (std::vector<long>{4, 10}));
  EXPECT_TRUE(r.json["counts"]["reconciled"].get<bool>());
}

TEST(Run, HyperellipticCurve) {
  const ZetaReport r = run(load_spec(sample("hyperelliptic.spec")));
  EXPECT_EQ(r.status, "OK");
  EXPECT_EQ(longs(r.json["counts"]["lefschetz"]), (std::vector<long>{4, 54}));
  EXPECT_EQ(r.json["counts"]["oracle_decision"], "ran");
  EXPECT_EQ(r.json["schema_version"], kReportSchemaVersion);
}

TEST(Run, OptionsOverrideTheFile) {
  RunOptions o;
  o.smax = 2;
  o.no_oracle = true;
  const ZetaReport r = run(load_spec(sample("torus.spec")), o);
  EXPECT_EQ(longs(r.json["counts"]["lefschetz"]), (std::vector<long>{4, 24}));
  EXPECT_EQ(r.json["counts"]["oracle_decision"], "disabled");
  o.no_oracle = false;
  o.enumeration_cap = 10;
  EXPECT_EQ(run(load_spec(sample("torus.spec")), o).json["counts"]["oracle_decision"],
            "skipped: above enumeration cap");
}

TEST(Run, RejectsInvalidSpecs) {
  try {
    run(load_spec(sample("invalid/not_prime.spec")));
    FAIL() << "expected a validation failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "zeta_cli.ValidationFailed");
  }
}

TEST(Run, Deterministic) {
  const VarietySpec s = load_spec(sample("hyperelliptic.spec"));
  EXPECT_EQ(run(s).json.dump(), run(s).json.dump());
}

TEST(Reports, CohomologyAndOracle) {
  const VarietySpec s = load_spec(sample("torus.spec"));
  const auto c = cohomology_report(s);
  EXPECT_TRUE(c.contains("psi"));
  EXPECT_EQ(longs(oracle_report(s)["counts"]["oracle"]), (std::vector<long>{4, 24, 124}));
}

#ifdef MWZETA_CLI
TEST(Cli, ExitCodes) {
  const std::string cli = MWZETA_CLI;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("count --spec " + sample("torus.spec")), 0);
  EXPECT_EQ(status("count --spec " + sample("invalid/not_prime.spec")), 2);
  EXPECT_EQ(status("count --spec " + sample("invalid/not_squarefree.spec")), 2);
  EXPECT_EQ(status("count --no-such-flag"), 2);
  EXPECT_EQ(status("oracle --spec " + sample("torus.spec") + " --format table"), 0);
}
#endif
