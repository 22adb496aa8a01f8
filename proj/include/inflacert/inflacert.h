/* C interface to the triangle-network nonlocality certification core.
 *
 * All functions return an inflacert_status; INFLACERT_OK means the
 * requested object was produced.  INFLACERT_FEASIBLE is not an error:
 * it reports that the linear program admits a solution, so there is no
 * infeasibility certificate at that point.  Detailed messages for the
 * most recent failure on the calling thread are available through
 * inflacert_last_error().
 *
 * Objects returned through out-parameters are opaque handles owned by
 * the caller; release them with the matching _free function.  Strings
 * returned through char** out-parameters must be released with
 * inflacert_string_free.
 */

#ifndef INFLACERT_H
#define INFLACERT_H

#include <stddef.h>

#if defined(_WIN32)
#define INFLACERT_API __declspec(dllexport)
#else
#define INFLACERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum inflacert_status {
    INFLACERT_OK = 0,
    INFLACERT_FEASIBLE = 1,
    INFLACERT_ERR_ARGUMENT = 2,
    INFLACERT_ERR_IO = 3,
    INFLACERT_ERR_FORMAT = 4,
    INFLACERT_ERR_NEGATIVE_CONDITIONAL = 5,
    INFLACERT_ERR_AMBIGUOUS = 6,
    INFLACERT_ERR_LABEL_MISMATCH = 7,
    INFLACERT_ERR_EMPTY_POLYTOPE = 8,
    INFLACERT_ERR_OUT_OF_RANGE = 9,
    INFLACERT_COVERAGE_LOST = 10,
    INFLACERT_ERR_INTERNAL = 11
} inflacert_status;

/* constraint-family selection for certify calls */
#define INFLACERT_CONSTRAINT_HIERARCHY 1u
#define INFLACERT_CONSTRAINT_HIGHER_DEGREE 2u
#define INFLACERT_CONSTRAINT_LPI 4u
#define INFLACERT_CONSTRAINTS_ALL 7u

typedef struct inflacert_cert inflacert_cert;
typedef struct inflacert_sweep_report inflacert_sweep_report;

INFLACERT_API const char* inflacert_version(void);
INFLACERT_API const char* inflacert_status_name(inflacert_status status);

/* Message describing the most recent failure on this thread. */
INFLACERT_API const char* inflacert_last_error(void);

INFLACERT_API void inflacert_string_free(char* text);
INFLACERT_API void inflacert_cert_free(inflacert_cert* cert);
INFLACERT_API void inflacert_sweep_report_free(inflacert_sweep_report* report);

/* Certify one point of the family.
 *   u:       decimal ("0.8090") or rational ("55/73") parameter
 *   f:       "a,b,c,d" correlators (F_AB,F_BC,F_AC,F_ABC) or "qplus-vertex"
 *   t:       +1 or -1, selecting the conditional
 *   mode:    "auto", "float" or "exact" (NULL = auto)
 *   flags:   INFLACERT_CONSTRAINT_* bitmask (hierarchy is always kept)
 * On INFLACERT_OK *out holds a verified infeasibility certificate; on
 * INFLACERT_FEASIBLE *out is NULL. */
INFLACERT_API inflacert_status inflacert_certify(const char* u, const char* f,
                                                 int t, const char* mode,
                                                 unsigned flags,
                                                 inflacert_cert** out);

INFLACERT_API inflacert_status inflacert_cert_save(const inflacert_cert* cert,
                                                   const char* path);
INFLACERT_API inflacert_status inflacert_cert_load(const char* path,
                                                   inflacert_cert** out);

INFLACERT_API inflacert_status inflacert_cert_margin(const inflacert_cert* cert,
                                                     double* out);
/* provenance accessors; returned strings are owned by the handle */
INFLACERT_API const char* inflacert_cert_u(const inflacert_cert* cert);
INFLACERT_API int inflacert_cert_t(const inflacert_cert* cert);
INFLACERT_API const char* inflacert_cert_mode(const inflacert_cert* cert);

/* Relaxed re-evaluation of the certificate against a freshly built
 * problem at (u, f, t); u/f/t may be NULL/0 to reuse the stored
 * provenance.  *margin_out receives y.b - max(y.A); status is
 * INFLACERT_OK when positive, INFLACERT_FEASIBLE when not. */
INFLACERT_API inflacert_status inflacert_cert_verify_at(
    const inflacert_cert* cert, const char* u, const char* f, int t,
    const char* mode, double* margin_out);

/* Render the certificate as a polynomial inequality over the eight
 * entries of a binary triangle distribution. */
INFLACERT_API inflacert_status inflacert_cert_inequality(
    const inflacert_cert* cert, char** text_out);

/* Continuation along u, writing one certificate file per covered
 * segment into out_dir (plus manifest.json).  Returns INFLACERT_OK if
 * u_stop was reached, INFLACERT_COVERAGE_LOST if the chain halted
 * early (the manifest is still written). */
INFLACERT_API inflacert_status inflacert_sweep(const char* u_start,
                                               const char* u_stop,
                                               const char* out_dir,
                                               inflacert_sweep_report** out);

INFLACERT_API inflacert_status inflacert_sweep_reached(
    const inflacert_sweep_report* report, int* reached);
INFLACERT_API inflacert_status inflacert_sweep_frontier(
    const inflacert_sweep_report* report, double* frontier);
INFLACERT_API inflacert_status inflacert_sweep_segment_count(
    const inflacert_sweep_report* report, size_t* count);
INFLACERT_API inflacert_status inflacert_sweep_segment(
    const inflacert_sweep_report* report, size_t index, double* u_start,
    double* u_end);

/* Halfspace table, optional vertex list and optional 2-d slice polyline
 * of the feasibility polytope, as CSV text. */
INFLACERT_API inflacert_status inflacert_polytope_csv(const char* u,
                                                      int with_vertices,
                                                      int project_f2f3,
                                                      const char* mode,
                                                      char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* INFLACERT_H */
