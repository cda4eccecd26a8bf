/* C interface to the cmfiber library. Every function returns a cmf_status;
 * on failure cmf_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread). Handles are opaque and
 * owned by the caller, who releases them with the matching *_free. */
#ifndef CMFIBER_H
#define CMFIBER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CMF_API __declspec(dllexport)
#else
#define CMF_API __attribute__((visibility("default")))
#endif

typedef enum cmf_status {
    CMF_OK = 0,
    CMF_ERR_INVALID = -1,    /* malformed input or violated precondition */
    CMF_ERR_HYPOTHESIS = -2, /* context hypothesis or admissibility fails */
    CMF_ERR_RESOURCE = -3,   /* enumeration cap or 64-bit range exceeded */
    CMF_ERR_CHECK = -4,      /* a verified identity failed */
    CMF_ERR_INTERNAL = -5,   /* library invariant violated */
    CMF_ERR_NULL = -6,       /* null handle or output pointer */
    CMF_ERR_RANGE = -7       /* index out of range */
} cmf_status;

typedef enum cmf_kind { CMF_SPLIT = 0, CMF_INERT = 1, CMF_RAMIFIED = 2 } cmf_kind;

CMF_API const char * cmf_version(void);
CMF_API const char * cmf_last_error(void);
CMF_API const char * cmf_status_name(int status);
/* "split", "inert", "ramified" */
CMF_API int cmf_parse_kind(const char * name, cmf_kind * out);

/* ---- local tree ---- */

/* Closed-form orbit count N(n1, n2, delta) for residue field size q. */
CMF_API int cmf_closed_form_n(uint64_t q, cmf_kind kind, unsigned n1, unsigned n2,
                              unsigned delta, uint64_t * out);
/* The same count by enumerating the sphere; cap 0 selects the default. */
CMF_API int cmf_brute_force_n(int64_t p, cmf_kind kind, unsigned n1, unsigned n2,
                              unsigned delta, uint64_t cap, unsigned jobs, uint64_t * out);
CMF_API int cmf_sphere_size(int64_t p, unsigned delta, uint64_t * out);

/* ---- quadratic orders ---- */

CMF_API int cmf_class_number(int64_t dk, int64_t c, int64_t * out);
CMF_API int cmf_splitting_kind(int64_t dk, int64_t p, cmf_kind * out);

/* ---- checks ---- */

typedef struct cmf_report cmf_report;

CMF_API void cmf_report_free(cmf_report * r);
CMF_API int cmf_report_check_count(const cmf_report * r, size_t * out);
/* Borrowed strings, valid while the report lives. */
CMF_API int cmf_report_check(const cmf_report * r, size_t index, const char ** name,
                             int * pass, const char ** expected, const char ** actual);
/* 1 when every check passed. */
CMF_API int cmf_report_ok(const cmf_report * r, int * out);

/* ---- global context and orbit counts ---- */

typedef struct cmf_context cmf_context;

CMF_API int cmf_context_create(int64_t dk, const int64_t * ram_b, size_t n_ram,
                               int64_t level, const int64_t * s, size_t n_s,
                               cmf_context ** out);
CMF_API void cmf_context_free(cmf_context * ctx);
CMF_API int cmf_context_violation_count(const cmf_context * ctx, size_t * out);
CMF_API int cmf_context_violation(const cmf_context * ctx, size_t index,
                                  const char ** hypothesis, const char ** detail);
CMF_API int cmf_admissible(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                           int * out);
CMF_API int cmf_local_factor(const cmf_context * ctx, int64_t p, int64_t c_prime,
                             int64_t c_double, uint64_t * out);
CMF_API int cmf_orbit_count_b(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                              uint64_t * out);
/* c_prime and c_double must be prime to S. */
CMF_API int cmf_orbit_count_bs(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                               uint64_t * out);

typedef struct cmf_kappa {
    uint64_t value;   /* 0 on an empty fiber */
    int64_t degree;   /* ring class field degree */
    uint64_t s_local; /* product of the local factors at S */
    int empty_fiber;
} cmf_kappa;

CMF_API int cmf_kappa_compute(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                              cmf_kappa * out);

/* Writes up to cap (prime, bit) entries, sorted by prime; *count receives
 * the number of inert primes of S. profile may be null (all zero). */
CMF_API int cmf_sign_vector(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                            const int64_t * profile_primes, const int64_t * profile_values,
                            size_t n_profile, int64_t * primes, int * bits, size_t cap,
                            size_t * count);

typedef struct cmf_consistency {
    uint64_t count_b;
    uint64_t count_bs;
    uint64_t sign_classes;
    cmf_kappa kappa;
    int64_t h_coarse;
    int64_t h_coarse_s;
    uint64_t source_size;
    uint64_t target_size;
    int ok;
} cmf_consistency;

/* checks may be null; otherwise receives a report the caller frees. */
CMF_API int cmf_theorem_consistency(const cmf_context * ctx, int64_t c_prime,
                                    int64_t c_double, cmf_consistency * out,
                                    cmf_report ** checks);

/* ---- quaternion orders ---- */

typedef struct cmf_algebra_info {
    int64_t a, b, ell;
    int64_t maximal_red_disc;
    int64_t eichler_red_disc;
    int64_t maximal_units;
} cmf_algebra_info;

CMF_API int cmf_hilbert_symbol(int64_t a, int64_t b, int64_t p, int * out); /* p = 0: real place */
CMF_API int cmf_algebra_info_compute(int64_t ell, int64_t level, cmf_algebra_info * out);

typedef struct cmf_ideal_classes cmf_ideal_classes;

CMF_API int cmf_ideal_classes_create(int64_t ell, int64_t level, cmf_ideal_classes ** out);
CMF_API void cmf_ideal_classes_free(cmf_ideal_classes * ic);
CMF_API int cmf_ideal_classes_count(const cmf_ideal_classes * ic, size_t * out);
CMF_API int cmf_ideal_classes_units(const cmf_ideal_classes * ic, size_t index, int64_t * out);
CMF_API int cmf_ideal_classes_neighbor_prime(const cmf_ideal_classes * ic, int64_t * out);
/* "num/den" strings, borrowed. */
CMF_API int cmf_ideal_classes_mass(const cmf_ideal_classes * ic, const char ** mass,
                                   const char ** expected);

typedef struct cmf_census cmf_census;

typedef struct cmf_census_row {
    size_t ideal_class;
    int64_t unit_count;
    int64_t elements;
    int64_t classes;
    int64_t pairs;
    int64_t self_paired;
    int64_t sign0;
    int64_t sign1;
} cmf_census_row;

typedef struct cmf_census_info {
    int64_t ell, level, dk, c;
    int signs_defined;
    int64_t ideal_classes;
    uint64_t expected_total;
    cmf_census_row totals;
    int ok;
} cmf_census_info;

CMF_API int cmf_census_create(int64_t ell, int64_t level, int64_t dk, int64_t c,
                              cmf_census ** out);
CMF_API void cmf_census_free(cmf_census * cen);
CMF_API int cmf_census_info_get(const cmf_census * cen, cmf_census_info * out);
CMF_API int cmf_census_row_count(const cmf_census * cen, size_t * out);
CMF_API int cmf_census_row_get(const cmf_census * cen, size_t index, cmf_census_row * out);
/* Borrowed; lives as long as the census. */
CMF_API int cmf_census_checks(const cmf_census * cen, const cmf_report ** out);

/* ---- verification ---- */

/* suite: "local", "orbits", "quaternion" or "all". */
CMF_API int cmf_verify_run(const char * suite, uint64_t seed, unsigned jobs, cmf_report ** out);

#ifdef __cplusplus
}
#endif

#endif
