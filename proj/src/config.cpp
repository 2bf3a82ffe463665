#include "haarbook/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "haarbook/error.hpp"

namespace haarbook {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty())
    fail(ErrorCode::config,
         "invalid value for '" + key + "': expected a non-negative integer, got '" +
             value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (!in || !in.eof() || !std::isfinite(v))
    fail(ErrorCode::config,
         "invalid value for '" + key + "': expected a real number, got '" +
             value + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& raw_key,
                   const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "p") {
    cfg.p = parse_unsigned<std::size_t>(key, value);
  } else if (key == "n") {
    cfg.n = parse_unsigned<std::size_t>(key, value);
  } else if (key == "kernel") {
    if (value != "naive" && value != "jeffreys" && value != "haar" && value != "beta")
      fail(ErrorCode::config,
           "invalid kernel '" + value + "' (expected naive|jeffreys|haar|beta)");
    cfg.kernel = value;
  } else if (key == "beta") {
    cfg.beta = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "budget") {
    cfg.budget = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "rounds") {
    cfg.rounds = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_unsigned<unsigned>(key, value);
  } else if (key == "theta_file") {
    cfg.theta_file = value;
  } else if (key == "out") {
    cfg.out = value;
  } else {
    fail(ErrorCode::config, "unknown configuration key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::config,
           "config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  return parse_config_text(read_file(path), std::move(base));
}

void validate(const RunConfig& cfg) {
  if (cfg.p < 1) fail(ErrorCode::config, "constraint violated: p >= 1");
  if (cfg.n < cfg.p)
    fail(ErrorCode::config, "constraint violated: n >= p (n=" +
                                std::to_string(cfg.n) + ", p=" +
                                std::to_string(cfg.p) + ")");
  if (cfg.kernel == "beta") {
    const double limit = 0.5 * static_cast<double>(cfg.n - cfg.p + 1);
    if (!(cfg.beta < limit))
      fail(ErrorCode::config,
           "constraint violated: β < (n−p+1)/2 (beta=" + std::to_string(cfg.beta) +
               ", (n-p+1)/2=" + std::to_string(limit) + ")");
  }
  if (cfg.budget < 1000)
    fail(ErrorCode::config, "constraint violated: budget >= 1000");
  if (cfg.rounds < 1) fail(ErrorCode::config, "constraint violated: rounds >= 1");
  if (cfg.threads < 1) fail(ErrorCode::config, "constraint violated: threads >= 1");
}

KernelSpec kernel_spec(const RunConfig& cfg) {
  return parse_kernel_spec(cfg.kernel, cfg.beta);
}

std::vector<ThetaFixture> default_theta_fixtures(std::size_t p) {
  std::vector<ThetaFixture> out;
  out.push_back({"identity", TriMatrix::identity(p)});

  std::vector<double> linear(p);
  for (std::size_t i = 0; i < p; ++i) linear[i] = static_cast<double>(i + 1);
  out.push_back({"diag_linear", TriMatrix::diagonal(linear)});

  std::vector<double> banded(TriMatrix::packed_size(p), 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    banded[TriMatrix::index(i, i)] = static_cast<double>(i + 1);
    if (i > 0) banded[TriMatrix::index(i, i - 1)] = 0.5;
  }
  out.push_back({"banded_lower", TriMatrix(p, banded)});

  // Sigma = theta theta' has condition number 1e4.
  std::vector<double> geometric(p);
  for (std::size_t i = 0; i < p; ++i)
    geometric[i] = p == 1 ? 100.0
                          : std::pow(100.0, static_cast<double>(i) /
                                                static_cast<double>(p - 1));
  out.push_back({"diag_cond_1e4", TriMatrix::diagonal(geometric)});

  RngStream rng(20240601, stream_id(StreamTag::fixtures, p));
  std::vector<double> dense(TriMatrix::packed_size(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      dense[TriMatrix::index(i, j)] =
          i == j ? std::exp(0.5 * rng.normal()) : rng.normal();
  out.push_back({"dense_random", TriMatrix(p, dense)});
  return out;
}

std::vector<ThetaFixture> parse_theta_text(const std::string& text,
                                           std::size_t p) {
  std::vector<ThetaFixture> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string label = "theta_" + std::to_string(out.size() + 1);
    const auto colon = line.find(':');
    if (colon != std::string::npos) {
      label = trim(line.substr(0, colon));
      line = line.substr(colon + 1);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream values(line);
    values.imbue(std::locale::classic());
    std::vector<double> v;
    double d;
    while (values >> d) v.push_back(d);
    if (!values.eof())
      fail(ErrorCode::config,
           "theta line " + std::to_string(lineno) + ": unparsable value");
    if (v.size() != TriMatrix::packed_size(p))
      fail(ErrorCode::config,
           "theta line " + std::to_string(lineno) + ": expected " +
               std::to_string(TriMatrix::packed_size(p)) +
               " lower-triangle values for p=" + std::to_string(p) + ", got " +
               std::to_string(v.size()));
    try {
      out.push_back({label, TriMatrix(p, std::move(v))});
    } catch (const Error& e) {
      fail(ErrorCode::config,
           "theta line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) fail(ErrorCode::config, "theta file contains no fixtures");
  return out;
}

std::vector<ThetaFixture> load_theta_file(const std::string& path,
                                          std::size_t p) {
  return parse_theta_text(read_file(path), p);
}

std::vector<ThetaFixture> theta_fixtures(const RunConfig& cfg) {
  if (!cfg.theta_file.empty()) return load_theta_file(cfg.theta_file, cfg.p);
  return default_theta_fixtures(cfg.p);
}

}  // namespace haarbook
