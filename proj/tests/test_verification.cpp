#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "icbpg/verification.hpp"

using namespace icbpg;

TEST(Verify, CertificateSuitePasses) {
  const auto r = certificate_suite(200, 1);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Verify, CertificateSuiteCatchesInflatedCertificates) {
  const auto r = certificate_suite(200, 1, true);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.violations, 0);
}

TEST(Verify, LipschitzSuitePasses) {
  const auto r = lipschitz_suite(200, 2);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Verify, InclusionSuitesPass) {
  const auto a = rockafellar_suite(200, 3);
  EXPECT_TRUE(a.passed()) << a.detail;
  const auto b = gradient_error_suite(200, 4);
  EXPECT_TRUE(b.passed()) << b.detail;
}

TEST(Verify, SubsolverSuitePasses) {
  const auto r = subsolver_suite(50, 5);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Verify, DiagnosticsSuitePasses) {
  const auto r = diagnostics_suite(400, 40, 6);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Verify, QuickRunWritesParseableSummary) {
  const auto dir = std::filesystem::temp_directory_path() / "icbpg_test_verify";
  std::filesystem::remove_all(dir);
  VerifyOptions opts;
  opts.quick = true;
  opts.out_dir = dir;
  const VerifyReport rep = run_verification(opts);
  std::ifstream in(dir / "summary.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("suites").size(), rep.suites.size());
  EXPECT_EQ(j.at("passed").get<bool>(), rep.passed());
  EXPECT_TRUE(std::filesystem::exists(dir / "lemma_grid_fixed.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "lemma_grid_decreasing.csv"));
}

TEST(Verify, FreshRunPassesEverySuite) {
  VerifyOptions opts;
  opts.quick = true;
  const VerifyReport rep = run_verification(opts);
  for (const auto& s : rep.suites) EXPECT_TRUE(s.passed()) << s.name << ": " << s.detail;
  EXPECT_TRUE(rep.passed());
}
