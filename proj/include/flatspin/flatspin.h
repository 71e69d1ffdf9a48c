#ifndef FLATSPIN_H
#define FLATSPIN_H

#include <stddef.h>

#if defined(_WIN32)
#define FLATSPIN_API __declspec(dllexport)
#else
#define FLATSPIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Same values as flatspin::ErrorCode. */
typedef enum flatspin_status {
  FLATSPIN_OK = 0,
  FLATSPIN_NOT_INVERTIBLE = 1,
  FLATSPIN_NOT_IN_CONE = 2,
  FLATSPIN_NOT_UNIT = 3,
  FLATSPIN_DEGENERATE_POINT = 4,
  FLATSPIN_NOT_IMMERSED = 5,
  FLATSPIN_SIGN_LOSS = 6,
  FLATSPIN_DOMAIN_ERROR = 7,
  FLATSPIN_GRID_MISMATCH = 8,
  FLATSPIN_DEGENERATE_TANGENT = 9,
  FLATSPIN_LATTICE_PARITY = 10,
  FLATSPIN_NOT_CLOSED = 11,
  FLATSPIN_NO_ADMISSIBLE_ALPHA = 12,
  FLATSPIN_INVALID_LATTICE = 13,
  FLATSPIN_ORIENTATION_REVERSED = 14,
  FLATSPIN_SCHEMA_ERROR = 15,
  FLATSPIN_UNKNOWN_KEY = 16,
  FLATSPIN_AT_POLE = 17,
  FLATSPIN_PROJECTION_REQUIRED = 18,
  FLATSPIN_INVALID_ARGUMENT = 19,
  FLATSPIN_IO_ERROR = 20,
  FLATSPIN_INTERNAL_ERROR = 99
} flatspin_status;

typedef struct flatspin_config flatspin_config;
typedef struct flatspin_result flatspin_result;
typedef struct flatspin_torus flatspin_torus;

FLATSPIN_API const char* flatspin_version(void);
FLATSPIN_API const char* flatspin_status_name(flatspin_status status);
/* Message of the last failure on the calling thread; empty when none. */
FLATSPIN_API const char* flatspin_last_error(void);

/* command may be NULL when the document names it. Warnings (non-strict unknown keys) are kept
   on the handle; errors leave *out NULL and list every problem in flatspin_last_error. */
FLATSPIN_API flatspin_status flatspin_config_parse(const char* json_text, const char* command, int strict,
                                                   flatspin_config** out);
FLATSPIN_API flatspin_status flatspin_config_load(const char* path, const char* command, int strict,
                                                  flatspin_config** out);
FLATSPIN_API flatspin_status flatspin_config_set_resolution(flatspin_config* cfg, int n);
FLATSPIN_API const char* flatspin_config_command(const flatspin_config* cfg);
FLATSPIN_API size_t flatspin_config_warning_count(const flatspin_config* cfg);
FLATSPIN_API const char* flatspin_config_warning(const flatspin_config* cfg, size_t i);
FLATSPIN_API void flatspin_config_free(flatspin_config* cfg);

/* Runs the command in memory. Returns OK when it ran to completion (checks may still fail),
   otherwise the error that stopped it; *out is set in both cases. */
FLATSPIN_API flatspin_status flatspin_run(const flatspin_config* cfg, flatspin_result** out);
FLATSPIN_API int flatspin_result_passed(const flatspin_result* r);
FLATSPIN_API const char* flatspin_result_diagnostics(const flatspin_result* r);
FLATSPIN_API size_t flatspin_result_file_count(const flatspin_result* r);
FLATSPIN_API const char* flatspin_result_file_name(const flatspin_result* r, size_t i);
FLATSPIN_API const char* flatspin_result_file_content(const flatspin_result* r, size_t i);
/* Writes all files under dir, creating it. */
FLATSPIN_API flatspin_status flatspin_result_write(const flatspin_result* r, const char* dir);
FLATSPIN_API void flatspin_result_free(flatspin_result* r);

/* Torus from a TorusSpec JSON document {"psi": ..., "lattice": ...} on an n1 x n2 grid. */
FLATSPIN_API flatspin_status flatspin_torus_build(const char* spec_json, int n1, int n2, int force, flatspin_torus** out);
FLATSPIN_API flatspin_status flatspin_torus_size(const flatspin_torus* t, int* n1, int* n2);
FLATSPIN_API flatspin_status flatspin_torus_point(const flatspin_torus* t, int i, int j, double out[4]);
FLATSPIN_API flatspin_status flatspin_torus_eval(const flatspin_torus* t, double s, double u, double out[4]);
FLATSPIN_API flatspin_status flatspin_torus_metric_residual(const flatspin_torus* t, double* out);
FLATSPIN_API flatspin_status flatspin_torus_export(const flatspin_torus* t, const char* format, const char* path);
FLATSPIN_API void flatspin_torus_free(flatspin_torus* t);

/* pole 0..3, sign +1 or -1. */
FLATSPIN_API flatspin_status flatspin_stereographic(const double p[4], int pole, int sign, double out[3]);

/* Thread cap for internal parallel loops; 0 restores the default. */
FLATSPIN_API void flatspin_set_threads(int n);

#ifdef __cplusplus
}
#endif

#endif
