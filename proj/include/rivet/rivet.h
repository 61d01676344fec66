/* rivet: rate-independent evolutions by time-adaptive local minimization. */
#ifndef RIVET_RIVET_H
#define RIVET_RIVET_H

#include <stddef.h>

#if defined(_WIN32)
#define RIVET_API __declspec(dllexport)
#else
#define RIVET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rivet_status {
  RIVET_OK = 0,
  RIVET_ERR_INVALID_ARGUMENT = 1,
  RIVET_ERR_CONFIG = 2,
  RIVET_ERR_MESH = 3,
  RIVET_ERR_NONCONVERGENCE = 4,
  RIVET_ERR_CONSTRAINT = 5,
  RIVET_ERR_SOLVER = 6,
  RIVET_ERR_IO = 7,
  RIVET_ERR_INTERNAL = 8
} rivet_status;

/* A run configuration: a flat set of "section.key" = value entries. */
typedef struct rivet_config rivet_config;

RIVET_API const char* rivet_version(void);

/* Message of the last failed call on this thread, or "" after a success. */
RIVET_API const char* rivet_last_error(void);

/* Process exit code for a status: 0 ok, 2 input, 3 solver, 4 I/O. */
RIVET_API int rivet_exit_code(rivet_status status);

RIVET_API rivet_status rivet_config_new(rivet_config** out);
RIVET_API rivet_status rivet_config_load(const char* path, rivet_config** out);
/* "ct" or "lshape". Later rivet_config_set calls override preset values. */
RIVET_API rivet_status rivet_config_from_preset(const char* name, rivet_config** out);
RIVET_API void rivet_config_free(rivet_config* config);

RIVET_API rivet_status rivet_config_set(rivet_config* config, const char* key, const char* value);
/* Copies the value into buf (always terminated). RIVET_ERR_INVALID_ARGUMENT if absent or too long. */
RIVET_API rivet_status rivet_config_get(const rivet_config* config, const char* key, char* buf,
                                        size_t len);

/* Full validation; every violation is listed in rivet_last_error(). */
RIVET_API rivet_status rivet_config_validate(const rivet_config* config);

/* Runs the experiment and writes its outputs. steps_out may be NULL. */
RIVET_API rivet_status rivet_run(const rivet_config* config, int* steps_out);

#ifdef __cplusplus
}
#endif

#endif
