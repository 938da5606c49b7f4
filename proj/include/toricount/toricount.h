#ifndef TORICOUNT_H
#define TORICOUNT_H

/* C interface to the toricount library: fans of smooth projective toric
 * varieties, lattice points of bounded anticanonical height on the universal
 * torsor, leading-constant ingredients and sieve experiments.
 *
 * Conventions: every function returns a toric_status; outputs go through
 * pointer arguments. On failure toric_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread). Strings
 * returned through char** are heap-allocated and must be released with
 * toric_string_free. Handles are immutable once built and may be shared
 * between threads; a toric_query must not be modified while in use. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TORIC_API __declspec(dllexport)
#else
#define TORIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum toric_status {
  TORIC_OK = 0,
  TORIC_ERR_PARSE = 1,       /* malformed fan, plan, query or polynomial text */
  TORIC_ERR_INVALID_FAN = 2, /* fan fails validation; message names the check */
  TORIC_ERR_HYPOTHESIS = 3,  /* e.g. -K not globally generated, torsion in Pic */
  TORIC_ERR_ARGUMENT = 4,
  TORIC_ERR_LIMIT = 5,       /* size estimate or combinatorial guard exceeded */
  TORIC_ERR_IO = 6,
  TORIC_ERR_INTERNAL = 7
} toric_status;

typedef struct toric_fan toric_fan;
typedef struct toric_query toric_query;

TORIC_API const char* toric_last_error(void);
TORIC_API const char* toric_status_name(toric_status status);
TORIC_API const char* toric_version(void);
TORIC_API void toric_string_free(char* s);

/* ---- fans ---- */

/* Validation report {ok, violations:[{check, rays, cones, message}]}; *ok is 1
 * when the fan is valid. Fails only on syntax errors. */
TORIC_API toric_status toric_fan_check(const char* json_text, char** report_json, int* ok);
TORIC_API toric_status toric_fan_parse(const char* json_text, toric_fan** out);
TORIC_API toric_status toric_fan_load(const char* path, toric_fan** out);
TORIC_API void toric_fan_free(toric_fan* fan);

TORIC_API size_t toric_fan_dim(const toric_fan* fan);
TORIC_API size_t toric_fan_num_rays(const toric_fan* fan);
TORIC_API size_t toric_fan_num_cones(const toric_fan* fan);
TORIC_API size_t toric_fan_picard_rank(const toric_fan* fan);
TORIC_API toric_status toric_fan_serialize(const toric_fan* fan, char** out);
/* {index, admissible_order, m, a, e, f, class_map} for one maximal cone. */
TORIC_API toric_status toric_fan_cone_json(const toric_fan* fan, size_t cone, char** out);

/* ---- points ---- */

/* Height as a decimal string (it may exceed 64 bits). */
TORIC_API toric_status toric_height(const toric_fan* fan, const int64_t* x, size_t n, char** out);
TORIC_API toric_status toric_is_integral(const toric_fan* fan, const int64_t* x, size_t n, int* out);
TORIC_API toric_status toric_which_cone(const toric_fan* fan, const int64_t* x, size_t n, size_t* out);

/* ---- counting queries ---- */

TORIC_API toric_status toric_query_new(uint64_t B, toric_query** out);
/* {"B":..,"coprime_only":..,"box":{"cone":..,"lambda":["p/q",..]},"congruence":{"l":..,"xi":[..]},"divisibility":[..]} */
TORIC_API toric_status toric_query_from_json(const char* json_text, toric_query** out);
TORIC_API void toric_query_free(toric_query* q);
/* lambda entries are rationals such as "1/2". */
TORIC_API toric_status toric_query_set_box(toric_query* q, size_t cone, const char* const* lambda, size_t d);
TORIC_API toric_status toric_query_set_congruence(toric_query* q, uint64_t l, const uint64_t* xi, size_t n);
TORIC_API toric_status toric_query_set_divisibility(toric_query* q, const uint64_t* d, size_t n);
TORIC_API toric_status toric_query_set_coprime(toric_query* q, int coprime_only);
TORIC_API toric_status toric_query_set_threads(toric_query* q, unsigned threads);
TORIC_API toric_status toric_query_set_max_points(toric_query* q, double cap);

TORIC_API toric_status toric_count(const toric_fan* fan, const toric_query* q, uint64_t* out);
/* Record {query, count, wall_time_ms}. */
TORIC_API toric_status toric_count_json(const toric_fan* fan, const toric_query* q, char** out);

/* Called once per point in deterministic order; return nonzero to stop. The
 * coordinate array is only valid during the call. */
typedef int (*toric_point_cb)(const uint64_t* coords, size_t n, uint64_t height, int integral, void* user);
TORIC_API toric_status toric_enumerate(const toric_fan* fan, const toric_query* q, toric_point_cb cb, void* user);

TORIC_API toric_status toric_rational_point_count(const toric_fan* fan, uint64_t B, uint64_t* out);
TORIC_API toric_status toric_flat_complement_count(const toric_fan* fan, uint64_t B, double A, int chart_local,
                                                   unsigned threads, uint64_t* out);

/* ---- constants ---- */

TORIC_API toric_status toric_alpha(const toric_fan* fan, char** out);
TORIC_API toric_status toric_alpha_zero(const toric_fan* fan, size_t* out);
TORIC_API toric_status toric_kappa_p(const toric_fan* fan, uint64_t p, char** out);
/* prod_{p <= pmax} kappa_p and rigorous bounds for the full Euler product. */
TORIC_API toric_status toric_kappa_truncated(const toric_fan* fan, uint64_t pmax, double* value, double* lo,
                                             double* hi);
/* 1/l^n as an exact rational and the decimal value of kappa_(l). */
TORIC_API toric_status toric_kappa_level(const toric_fan* fan, uint64_t l, uint64_t pmax, char** inv_power,
                                         double* value);
TORIC_API toric_status toric_mobius(const toric_fan* fan, const uint64_t* d, size_t n, int64_t* out);
/* {alpha, alpha0, kappa:{value, tail_lo, tail_hi, P_max}, per_prime:[...]} */
TORIC_API toric_status toric_constants_json(const toric_fan* fan, uint64_t pmax, char** out);

/* ---- sieves ---- */

/* Problem {"sequence":[..],"primes":[..],"density":["1/2",..],"level":D,"mass":"X"}; result
 * {bound, J, main_term, remainder, quadratic, sifted, divisors} with exact rationals. */
TORIC_API toric_status toric_selberg_json(const char* problem_json, char** out);
TORIC_API toric_status toric_geometric_sieve(const toric_fan* fan, const char* f, const char* g, uint64_t N,
                                             uint64_t B, int coprime_only, unsigned threads, uint64_t* count,
                                             uint64_t* uncertain);
TORIC_API toric_status toric_subvariety_count(const toric_fan* fan, const char* phi, uint64_t B, unsigned threads,
                                              uint64_t* out);
TORIC_API toric_status toric_prime_section_count(const toric_fan* fan, const char* s, uint64_t B, unsigned threads,
                                                 uint64_t* out);

/* ---- experiments ---- */

/* Runs a plan file; writes <output>.csv/.json when the plan names an output. */
TORIC_API toric_status toric_run_plan_file(const char* path, char** csv, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
