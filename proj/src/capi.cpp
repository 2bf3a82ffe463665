#include "haarbook/haarbook.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "haarbook/commands.hpp"
#include "haarbook/error.hpp"

struct hb_kernel {
  haarbook::PredictiveKernel kernel;
};

struct hb_rng {
  haarbook::RngStream rng;
};

struct hb_config {
  haarbook::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

hb_status to_status(haarbook::ErrorCode code) {
  using haarbook::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument:
      return HB_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch:
      return HB_ERR_DIMENSION;
    case ErrorCode::not_positive_definite:
      return HB_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::improper_posterior:
      return HB_ERR_IMPROPER_POSTERIOR;
    case ErrorCode::envelope_unavailable:
      return HB_ERR_ENVELOPE_UNAVAILABLE;
    case ErrorCode::io:
      return HB_ERR_IO;
    case ErrorCode::config:
      return HB_ERR_CONFIG;
  }
  return HB_ERR_INTERNAL;
}

template <typename F>
hb_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HB_OK;
  } catch (const haarbook::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HB_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr)
    haarbook::fail(haarbook::ErrorCode::invalid_argument,
                   std::string(what) + " is null");
}

std::span<const double> view(const double* p, std::size_t n) { return {p, n}; }

haarbook::TriMatrix tri(std::size_t p, const double* v) {
  require(v, "triangular matrix");
  return haarbook::TriMatrix(
      p, std::vector<double>(v, v + haarbook::TriMatrix::packed_size(p)));
}

void copy_out(const haarbook::TriMatrix& t, double* out) {
  require(out, "output");
  std::memcpy(out, t.packed().data(), t.packed().size() * sizeof(double));
}

haarbook::ObservationMatrix observations(std::size_t p, std::size_t n,
                                         const double* x) {
  require(x, "x");
  return haarbook::ObservationMatrix(p, n, std::vector<double>(x, x + p * n));
}

haarbook::IntegrationOptions integration(hb_method method, uint64_t budget,
                                         uint64_t seed) {
  haarbook::IntegrationOptions o;
  switch (method) {
    case HB_METHOD_QUADRATURE:
      o.method = haarbook::IntegrationMethod::quadrature;
      break;
    case HB_METHOD_MONTE_CARLO:
      o.method = haarbook::IntegrationMethod::monte_carlo;
      break;
    default:
      o.method = haarbook::IntegrationMethod::automatic;
  }
  o.budget = haarbook::McBudget{budget, seed, 1};
  return o;
}

void write_estimate(const haarbook::Estimate& e, hb_estimate* out) {
  require(out, "estimate output");
  out->value = e.value;
  out->error = e.error;
  out->samples = e.samples;
  out->seed = e.seed;
  out->partial = e.partial ? 1 : 0;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_report(const haarbook::Report& rep, char** report_json, int* all_pass) {
  if (report_json) *report_json = dup_string(rep.to_json().dump(2));
  if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
}

}  // namespace

extern "C" {

const char* hb_version(void) { return HAARBOOK_VERSION; }

const char* hb_last_error(void) { return g_last_error.c_str(); }

const char* hb_status_name(hb_status status) {
  switch (status) {
    case HB_OK:
      return "ok";
    case HB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case HB_ERR_DIMENSION:
      return "dimension mismatch";
    case HB_ERR_NOT_POSITIVE_DEFINITE:
      return "not positive definite";
    case HB_ERR_IMPROPER_POSTERIOR:
      return "improper posterior";
    case HB_ERR_ENVELOPE_UNAVAILABLE:
      return "envelope unavailable";
    case HB_ERR_IO:
      return "i/o error";
    case HB_ERR_CONFIG:
      return "configuration error";
    case HB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

hb_status hb_tau(size_t p, const double* spd, double* lower_out) {
  return guarded([&] {
    require(spd, "spd");
    copy_out(haarbook::tau(haarbook::SpdMatrix(p, std::vector<double>(spd, spd + p * p))),
             lower_out);
  });
}

hb_status hb_group_mul(size_t p, const double* g, const double* h,
                       double* lower_out) {
  return guarded([&] { copy_out(haarbook::group_mul(tri(p, g), tri(p, h)), lower_out); });
}

hb_status hb_inverse(size_t p, const double* g, double* lower_out) {
  return guarded([&] { copy_out(haarbook::inverse(tri(p, g)), lower_out); });
}

hb_status hb_solve_lower(size_t p, const double* g, const double* z, double* out) {
  return guarded([&] {
    require(z, "z");
    require(out, "output");
    haarbook::solve_lower_into(tri(p, g), view(z, p), std::span<double>(out, p));
  });
}

hb_status hb_modular_delta(size_t p, const double* g, double* out) {
  return guarded([&] {
    require(out, "output");
    *out = haarbook::modular_delta(tri(p, g));
  });
}

hb_status hb_psi_p(size_t p, const double* w, double* out) {
  return guarded([&] {
    require(w, "w");
    require(out, "output");
    if (p == 0) haarbook::fail(haarbook::ErrorCode::invalid_argument, "p must be >= 1");
    *out = haarbook::psi_p(view(w, p));
  });
}

hb_status hb_log_k0(size_t p, const double* w, size_t n, double* out) {
  return guarded([&] {
    require(w, "w");
    require(out, "output");
    *out = haarbook::log_k0(view(w, p), n);
  });
}

hb_status hb_log_k1(size_t p, const double* w, size_t n, double* out) {
  return guarded([&] {
    require(w, "w");
    require(out, "output");
    *out = haarbook::log_k1(view(w, p), n);
  });
}

hb_status hb_log_qH(size_t p, size_t n, const double* z, const double* x,
                    double* out) {
  return guarded([&] {
    require(z, "z");
    require(out, "output");
    *out = haarbook::log_qH(view(z, p), observations(p, n, x));
  });
}

hb_status hb_rng_create(uint64_t seed, uint64_t stream, hb_rng** out) {
  return guarded([&] {
    require(out, "output");
    *out = new hb_rng{haarbook::RngStream(seed, stream)};
  });
}

void hb_rng_destroy(hb_rng* rng) { delete rng; }

hb_status hb_kernel_create(const char* kind, double beta, size_t n, size_t p,
                           hb_kernel** out) {
  return guarded([&] {
    require(kind, "kind");
    require(out, "output");
    *out = new hb_kernel{
        haarbook::make_kernel(haarbook::parse_kernel_spec(kind, beta), n, p)};
  });
}

void hb_kernel_destroy(hb_kernel* kernel) { delete kernel; }

hb_status hb_kernel_dims(const hb_kernel* kernel, size_t* n, size_t* p) {
  return guarded([&] {
    require(kernel, "kernel");
    if (n) *n = kernel->kernel.n();
    if (p) *p = kernel->kernel.p();
  });
}

hb_status hb_kernel_log_density(const hb_kernel* kernel, const double* w,
                                double* out) {
  return guarded([&] {
    require(kernel, "kernel");
    require(w, "w");
    require(out, "output");
    *out = kernel->kernel.log_k(view(w, kernel->kernel.p()));
  });
}

hb_status hb_kernel_sample(const hb_kernel* kernel, hb_rng* rng, double* w_out) {
  return guarded([&] {
    require(kernel, "kernel");
    require(rng, "rng");
    require(w_out, "output");
    const auto w = kernel->kernel.sample(rng->rng);
    std::memcpy(w_out, w.data(), w.size() * sizeof(double));
  });
}

hb_status hb_kernel_log_predictive(const hb_kernel* kernel, const double* z,
                                   const double* x, double* out) {
  return guarded([&] {
    require(kernel, "kernel");
    require(z, "z");
    require(out, "output");
    const auto& k = kernel->kernel;
    *out = haarbook::log_predictive(k, view(z, k.p()), observations(k.p(), k.n(), x));
  });
}

hb_status hb_kernel_sample_predictive(const hb_kernel* kernel, hb_rng* rng,
                                      const double* x, double* z_out) {
  return guarded([&] {
    require(kernel, "kernel");
    require(rng, "rng");
    require(z_out, "output");
    const auto& k = kernel->kernel;
    const auto z = haarbook::sample_predictive(k, rng->rng, observations(k.p(), k.n(), x));
    std::memcpy(z_out, z.data(), z.size() * sizeof(double));
  });
}

hb_status hb_variation_distance(const hb_kernel* a, const hb_kernel* b,
                                hb_method method, uint64_t budget, uint64_t seed,
                                hb_estimate* out) {
  return guarded([&] {
    require(a, "kernel a");
    require(b, "kernel b");
    write_estimate(haarbook::variation_distance(a->kernel, b->kernel,
                                                integration(method, budget, seed)),
                   out);
  });
}

hb_status hb_ticket_price(const hb_kernel* q, hb_method method, uint64_t budget,
                          uint64_t seed, hb_estimate* out) {
  return guarded([&] {
    require(q, "kernel");
    write_estimate(haarbook::ticket_price(q->kernel, integration(method, budget, seed)),
                   out);
  });
}

hb_status hb_epsilon0(const hb_kernel* q, hb_method method, uint64_t budget,
                      uint64_t seed, hb_estimate* out) {
  return guarded([&] {
    require(q, "kernel");
    write_estimate(haarbook::epsilon0(q->kernel, integration(method, budget, seed)),
                   out);
  });
}

hb_status hb_payoff_phi(const hb_kernel* q, double price, const double* x,
                        const double* z, double* out) {
  return guarded([&] {
    require(q, "kernel");
    require(z, "z");
    require(out, "output");
    const auto& k = q->kernel;
    const haarbook::DisagreementRegion region(k);
    *out = haarbook::payoff_phi(region, price, observations(k.p(), k.n(), x),
                                view(z, k.p()));
  });
}

hb_status hb_config_create(hb_config** out) {
  return guarded([&] {
    require(out, "output");
    *out = new hb_config{};
  });
}

void hb_config_destroy(hb_config* cfg) { delete cfg; }

hb_status hb_config_load_file(hb_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    cfg->config = haarbook::load_config_file(path, cfg->config);
  });
}

hb_status hb_config_set(hb_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    haarbook::apply_setting(cfg->config, key, value);
  });
}

hb_status hb_config_validate(const hb_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    haarbook::validate(cfg->config);
  });
}

hb_status hb_run(const hb_config* cfg, hb_command command, char** report_json,
                 int* all_pass) {
  return guarded([&] {
    require(cfg, "config");
    std::optional<haarbook::Report> rep;
    switch (command) {
      case HB_CMD_VERIFY:
        rep = haarbook::cmd_verify(cfg->config);
        break;
      case HB_CMD_DUTCH_BOOK:
        rep = haarbook::cmd_dutchbook(cfg->config);
        break;
      case HB_CMD_IDENTITY:
        rep = haarbook::cmd_identity(cfg->config);
        break;
      default:
        haarbook::fail(haarbook::ErrorCode::invalid_argument, "unknown command");
    }
    emit_report(*rep, report_json, all_pass);
  });
}

hb_status hb_run_dutch_book_csv(const hb_config* cfg, const char* csv_path,
                                char** report_json, int* all_pass) {
  return guarded([&] {
    require(cfg, "config");
    require(csv_path, "csv path");
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv)
      haarbook::fail(haarbook::ErrorCode::io,
                     std::string("cannot write '") + csv_path + "'");
    std::vector<std::vector<double>> payoffs;
    const auto rep = haarbook::cmd_dutchbook(cfg->config, &payoffs);
    haarbook::write_payoff_csv(csv, haarbook::theta_fixtures(cfg->config), payoffs);
    if (!csv)
      haarbook::fail(haarbook::ErrorCode::io,
                     std::string("failed writing '") + csv_path + "'");
    emit_report(rep, report_json, all_pass);
  });
}

hb_status hb_run_simulate(const hb_config* cfg, const char* csv_path,
                          char** report_json, int* all_pass) {
  return guarded([&] {
    require(cfg, "config");
    haarbook::validate(cfg->config);
    if (!csv_path || std::string(csv_path) == "-") {
      const auto rep = haarbook::cmd_simulate(cfg->config, std::cout);
      std::cout.flush();
      emit_report(rep, report_json, all_pass);
      return;
    }
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv)
      haarbook::fail(haarbook::ErrorCode::io,
                     std::string("cannot write '") + csv_path + "'");
    const auto rep = haarbook::cmd_simulate(cfg->config, csv);
    emit_report(rep, report_json, all_pass);
  });
}

void hb_string_free(char* s) { std::free(s); }

}  // extern "C"
