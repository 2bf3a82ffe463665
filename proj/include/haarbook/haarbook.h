/*
 * haarbook C API.
 *
 * Opaque handles own C++ objects; every call returns an hb_status and writes
 * results through out-pointers. On failure hb_last_error() returns a message
 * describing the most recent error on the calling thread.
 *
 * Matrix conventions:
 *   - lower-triangular matrices are packed row by row, p(p+1)/2 values;
 *   - symmetric matrices are dense row-major, p*p values;
 *   - data matrices X (p x n) are column-major: n columns of length p.
 */
#ifndef HAARBOOK_H
#define HAARBOOK_H

#include <stddef.h>
#include <stdint.h>

#if defined(HB_BUILDING_LIBRARY)
#define HB_API __attribute__((visibility("default")))
#else
#define HB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hb_status {
  HB_OK = 0,
  HB_ERR_INVALID_ARGUMENT = 1,
  HB_ERR_DIMENSION = 2,
  HB_ERR_NOT_POSITIVE_DEFINITE = 3,
  HB_ERR_IMPROPER_POSTERIOR = 4,
  HB_ERR_ENVELOPE_UNAVAILABLE = 5,
  HB_ERR_IO = 6,
  HB_ERR_CONFIG = 7,
  HB_ERR_INTERNAL = 99
} hb_status;

typedef enum hb_method {
  HB_METHOD_AUTO = 0,
  HB_METHOD_QUADRATURE = 1,
  HB_METHOD_MONTE_CARLO = 2
} hb_method;

typedef enum hb_command {
  HB_CMD_VERIFY = 0,
  HB_CMD_DUTCH_BOOK = 1,
  HB_CMD_IDENTITY = 2
} hb_command;

typedef struct hb_estimate {
  double value;
  double error; /* standard error (Monte Carlo) or error bound (quadrature) */
  uint64_t samples;
  uint64_t seed;
  int partial;
} hb_estimate;

typedef struct hb_kernel hb_kernel;
typedef struct hb_rng hb_rng;
typedef struct hb_config hb_config;

HB_API const char* hb_version(void);
HB_API const char* hb_last_error(void);
HB_API const char* hb_status_name(hb_status status);

/* Group G_T^+ ----------------------------------------------------------- */

HB_API hb_status hb_tau(size_t p, const double* spd, double* lower_out);
HB_API hb_status hb_group_mul(size_t p, const double* g, const double* h,
                              double* lower_out);
HB_API hb_status hb_inverse(size_t p, const double* g, double* lower_out);
HB_API hb_status hb_solve_lower(size_t p, const double* g, const double* z,
                                double* out);
HB_API hb_status hb_modular_delta(size_t p, const double* g, double* out);
HB_API hb_status hb_psi_p(size_t p, const double* w, double* out);

/* Densities ------------------------------------------------------------- */

HB_API hb_status hb_log_k0(size_t p, const double* w, size_t n, double* out);
HB_API hb_status hb_log_k1(size_t p, const double* w, size_t n, double* out);
HB_API hb_status hb_log_qH(size_t p, size_t n, const double* z,
                           const double* x, double* out);

/* Random streams -------------------------------------------------------- */

HB_API hb_status hb_rng_create(uint64_t seed, uint64_t stream, hb_rng** out);
HB_API void hb_rng_destroy(hb_rng* rng);

/* Predictive kernels ---------------------------------------------------- */

/* kind: "naive", "jeffreys", "haar" or "beta" (beta ignored otherwise). */
HB_API hb_status hb_kernel_create(const char* kind, double beta, size_t n,
                                  size_t p, hb_kernel** out);
HB_API void hb_kernel_destroy(hb_kernel* kernel);
HB_API hb_status hb_kernel_dims(const hb_kernel* kernel, size_t* n, size_t* p);
HB_API hb_status hb_kernel_log_density(const hb_kernel* kernel, const double* w,
                                       double* out);
HB_API hb_status hb_kernel_sample(const hb_kernel* kernel, hb_rng* rng,
                                  double* w_out);
/* x is p x n, column-major, with n taken from the kernel. */
HB_API hb_status hb_kernel_log_predictive(const hb_kernel* kernel,
                                          const double* z, const double* x,
                                          double* out);
HB_API hb_status hb_kernel_sample_predictive(const hb_kernel* kernel,
                                             hb_rng* rng, const double* x,
                                             double* z_out);
HB_API hb_status hb_variation_distance(const hb_kernel* a, const hb_kernel* b,
                                       hb_method method, uint64_t budget,
                                       uint64_t seed, hb_estimate* out);

/* Dutch book ------------------------------------------------------------ */

HB_API hb_status hb_ticket_price(const hb_kernel* q, hb_method method,
                                 uint64_t budget, uint64_t seed,
                                 hb_estimate* out);
HB_API hb_status hb_epsilon0(const hb_kernel* q, hb_method method,
                             uint64_t budget, uint64_t seed, hb_estimate* out);
/* phi(x, z) for a price previously obtained from hb_ticket_price. */
HB_API hb_status hb_payoff_phi(const hb_kernel* q, double price,
                               const double* x, const double* z, double* out);

/* Runs / configuration -------------------------------------------------- */

HB_API hb_status hb_config_create(hb_config** out);
HB_API void hb_config_destroy(hb_config* cfg);
/* key = value text, '#' comments. */
HB_API hb_status hb_config_load_file(hb_config* cfg, const char* path);
HB_API hb_status hb_config_set(hb_config* cfg, const char* key,
                               const char* value);
HB_API hb_status hb_config_validate(const hb_config* cfg);

/* Runs a verification and returns its JSON report (free with
 * hb_string_free). *all_pass receives 1 when every check passed. */
HB_API hb_status hb_run(const hb_config* cfg, hb_command command,
                        char** report_json, int* all_pass);
/* dutch-book plus the per-theta round payoffs written to csv_path. */
HB_API hb_status hb_run_dutch_book_csv(const hb_config* cfg,
                                       const char* csv_path, char** report_json,
                                       int* all_pass);
/* Betting simulation: CSV trajectory to csv_path ("-" or NULL for stdout). */
HB_API hb_status hb_run_simulate(const hb_config* cfg, const char* csv_path,
                                 char** report_json, int* all_pass);

HB_API void hb_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HAARBOOK_H */
