#pragma once

// The verification runs behind the CLI subcommands. Each returns a Report
// whose JSON form is deterministic for a fixed config apart from the
// "timing" object.

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "haarbook/config.hpp"

namespace haarbook {

struct CheckRecord {
  std::string name;
  double estimate = 0.0;
  double error = 0.0;      // stderr or bound attached to the estimate
  double tolerance = 0.0;  // threshold the check compares against
  bool pass = true;
  std::string detail;
};

struct Report {
  std::string command;
  RunConfig config;
  std::vector<CheckRecord> checks;
  std::string verdict;
  nlohmann::json details = nlohmann::json::object();
  double wall_clock_seconds = 0.0;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
nlohmann::json estimate_to_json(const Estimate& e);
nlohmann::json gain_report_to_json(const GainReport& g);

Report cmd_verify(const RunConfig& cfg);

// per_theta_payoffs, when non-null, receives one per-round payoff series per
// theta fixture (same order as the report's model side).
Report cmd_dutchbook(const RunConfig& cfg,
                     std::vector<std::vector<double>>* per_theta_payoffs = nullptr);

Report cmd_identity(const RunConfig& cfg);

// Simulates cfg.rounds bets at the first theta fixture and writes the CSV
// trajectory to `csv`. The final CSV row is the summary row.
Report cmd_simulate(const RunConfig& cfg, std::ostream& csv);

// RFC-4180 with LF line endings and '.' decimal separator.
void write_trajectory_csv(std::ostream& out, const BettingTrajectory& traj);
void write_payoff_csv(std::ostream& out, const std::vector<ThetaFixture>& thetas,
                      const std::vector<std::vector<double>>& payoffs);

std::string format_double(double v);

}  // namespace haarbook
