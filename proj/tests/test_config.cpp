#include <gtest/gtest.h>

#include <sstream>

#include "haarbook/commands.hpp"
#include "haarbook/config.hpp"
#include "haarbook/error.hpp"

namespace {

using namespace haarbook;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

TEST(Config, ParsesKeyValueTextWithComments) {
  const RunConfig cfg = parse_config_text(
      "# demo\n p = 3 \nn=5\nkernel = beta  # trailing\nbeta = 0.75\nseed=7\n\nthreads = 2\n");
  EXPECT_EQ(cfg.p, 3u);
  EXPECT_EQ(cfg.n, 5u);
  EXPECT_EQ(cfg.kernel, "beta");
  EXPECT_EQ(cfg.beta, 0.75);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_EQ(kernel_spec(cfg).kind, KernelKind::beta);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(code_of([] { parse_config_text("colour = red\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_config_text("p = two\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_config_text("p = -1\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_config_text("beta = abc\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_config_text("kernel = flat\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_config_text("just words\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { load_config_file("/nonexistent/haarbook.conf"); }), ErrorCode::io);
}

TEST(Config, ValidationNamesTheConstraint) {
  RunConfig cfg;
  cfg.kernel = "beta";
  cfg.beta = 1.0;  // p = 2, n = 3: needs beta < 1
  try {
    validate(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    EXPECT_NE(std::string(e.what()).find("β < (n−p+1)/2"), std::string::npos);
  }
  cfg = RunConfig{};
  cfg.n = 1;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::config);
  cfg = RunConfig{};
  cfg.budget = 999;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::config);
  cfg = RunConfig{};
  cfg.rounds = 0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::config);
  cfg = RunConfig{};
  cfg.threads = 0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::config);
}

TEST(Config, BetaIgnoredForOtherKernels) {
  RunConfig cfg;
  cfg.beta = 10.0;
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Theta, DefaultFixturesCoverConditioning) {
  const auto f = default_theta_fixtures(2);
  ASSERT_GE(f.size(), 5u);
  bool has_ill = false;
  for (const auto& t : f) {
    EXPECT_EQ(t.theta.dim(), 2u);
    if (t.theta.diag(1) / t.theta.diag(0) >= 100.0) has_ill = true;
  }
  EXPECT_TRUE(has_ill);
  EXPECT_EQ(default_theta_fixtures(3).front().theta.dim(), 3u);
}

TEST(Theta, ParsesLabelledAndBareLines) {
  const auto f = parse_theta_text("ident: 1 0 1\n\n2, 0.5, 3\n", 2);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].label, "ident");
  EXPECT_EQ(f[1].theta(1, 0), 0.5);
  EXPECT_FALSE(f[1].label.empty());
  EXPECT_THROW(parse_theta_text("1 0\n", 2), Error);
  EXPECT_THROW(parse_theta_text("1 0 -1\n", 2), Error);
}

TEST(Commands, VerifyPassesOnDefaults) {
  const Report r = cmd_verify(RunConfig{});
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.command, "verify");
  const auto j = r.to_json();
  EXPECT_TRUE(j.contains("timing"));
  EXPECT_TRUE(j.contains("versions"));
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("error"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
}

TEST(Commands, VerifyInOneDimensionReportsHaarEqualsJeffreys) {
  RunConfig cfg;
  cfg.p = 1;
  const Report r = cmd_verify(cfg);
  EXPECT_TRUE(r.all_pass());
  bool found = false;
  for (const auto& c : r.checks) found = found || c.name == "haar_equals_jeffreys_p1";
  EXPECT_TRUE(found);
}

TEST(Commands, ReportsAreDeterministicApartFromTiming) {
  RunConfig cfg;
  cfg.budget = 20000;
  auto strip = [](nlohmann::json j) {
    j.erase("timing");
    return j.dump();
  };
  const auto a = strip(cmd_dutchbook(cfg, nullptr).to_json());
  cfg.threads = 3;
  auto b_json = cmd_dutchbook(cfg, nullptr).to_json();
  b_json["config"]["threads"] = 1;
  EXPECT_EQ(a, strip(b_json));
}

TEST(Commands, DutchBookVerdicts) {
  RunConfig cfg;
  cfg.budget = 50000;
  EXPECT_EQ(cmd_dutchbook(cfg, nullptr).verdict, "SI-holds");
  cfg.kernel = "haar";
  const Report h = cmd_dutchbook(cfg, nullptr);
  EXPECT_EQ(h.verdict, "inconclusive");
  EXPECT_FALSE(h.details["unresolved"].get<bool>());
  cfg.kernel = "jeffreys";
  cfg.p = 1;
  EXPECT_EQ(cmd_dutchbook(cfg, nullptr).verdict, "inconclusive");
}

TEST(Commands, DutchBookPayoffCsv) {
  RunConfig cfg;
  cfg.budget = 1000;
  std::vector<std::vector<double>> pays;
  cmd_dutchbook(cfg, &pays);
  const auto thetas = theta_fixtures(cfg);
  ASSERT_EQ(pays.size(), thetas.size());
  std::ostringstream out;
  write_payoff_csv(out, thetas, pays);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("theta,round,payoff\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 1000 * static_cast<long>(thetas.size()));
}

TEST(Commands, SimulateCsvLayout) {
  RunConfig cfg;
  cfg.rounds = 50;
  std::ostringstream out;
  const Report r = cmd_simulate(cfg, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "round,x_digest,in_region,price,payoff,cumulative_wealth");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 51);
  EXPECT_EQ(last.rfind("summary,", 0), 0u);
  EXPECT_EQ(r.command, "simulate");
}

TEST(Commands, IdentityReportHasControl) {
  RunConfig cfg;
  cfg.budget = 50000;
  const Report r = cmd_identity(cfg);
  bool control = false;
  for (const auto& c : r.checks)
    if (c.name.rfind("control_", 0) == 0) control = c.pass;
  EXPECT_TRUE(control);
  EXPECT_EQ(r.verdict, "identity-holds");
}

}  // namespace
