#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "haarbook/dutchbook.hpp"

namespace haarbook {

struct RunConfig {
  std::size_t p = 2;
  std::size_t n = 3;
  std::string kernel = "jeffreys";
  double beta = 0.5;  // read only when kernel == "beta"
  std::uint64_t seed = 42;
  std::uint64_t budget = 200000;
  std::uint64_t rounds = 100000;
  unsigned threads = 1;
  std::string theta_file;
  std::string out;
};

// Applies one `key = value` setting. Keys: p, n, kernel, beta, seed, budget,
// rounds, threads, theta_file, out. Throws config on unknown keys or
// unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value);

// Key-value text: one `key = value` per line, '#' starts a comment.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// n >= p >= 1, beta < (n-p+1)/2 for the beta kernel, budget >= 1000,
// rounds >= 1, threads >= 1. Throws config naming the violated constraint.
void validate(const RunConfig& cfg);

KernelSpec kernel_spec(const RunConfig& cfg);

// Theta fixtures: from cfg.theta_file when set, else default_theta_fixtures.
std::vector<ThetaFixture> theta_fixtures(const RunConfig& cfg);

// identity, diag(1..p), banded lower (diag 1..p, 0.5 below), diagonal with
// condition number 1e4 (geometric from 1 to 100), and a fixed dense draw.
std::vector<ThetaFixture> default_theta_fixtures(std::size_t p);

// One fixture per non-empty line: optional "label:" then p(p+1)/2 lower
// triangle values row by row, separated by whitespace or commas.
std::vector<ThetaFixture> parse_theta_text(const std::string& text,
                                           std::size_t p);
std::vector<ThetaFixture> load_theta_file(const std::string& path,
                                          std::size_t p);

}  // namespace haarbook
