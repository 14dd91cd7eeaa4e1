#ifndef NLSLAB_H
#define NLSLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NLSLAB_API __declspec(dllexport)
#else
#define NLSLAB_API __attribute__((visibility("default")))
#endif

typedef enum nlslab_status {
    NLSLAB_OK = 0,
    NLSLAB_ERR_INTERNAL = 1,
    NLSLAB_ERR_VALIDATION = 2,
    NLSLAB_ERR_CAP = 3,
    NLSLAB_ERR_SINGULAR = 4
} nlslab_status;

typedef struct nlslab_report nlslab_report;

/* Library version string, static storage. */
NLSLAB_API const char* nlslab_version(void);

/* Number of experiments and the id at position i (NULL when out of range). */
NLSLAB_API size_t nlslab_experiment_count(void);
NLSLAB_API const char* nlslab_experiment_id(size_t i);

/* Declared parameters of an experiment as "key=default" lines; caller frees with nlslab_string_free. */
NLSLAB_API nlslab_status nlslab_experiment_schema(const char* experiment, char** out);

/* Runs an experiment. config_text holds "key = value" lines and may be NULL.
   threads <= 0 selects the hardware concurrency. */
NLSLAB_API nlslab_status nlslab_run(const char* experiment, const char* config_text, uint64_t seed, int threads,
                                    nlslab_report** out);

NLSLAB_API size_t nlslab_report_row_count(const nlslab_report* r);
NLSLAB_API double nlslab_report_wall_ms(const nlslab_report* r);

/* Serialized report; format is "json" or "csv". Caller frees with nlslab_string_free. */
NLSLAB_API nlslab_status nlslab_report_serialize(const nlslab_report* r, const char* format, char** out);
NLSLAB_API nlslab_status nlslab_report_write(const nlslab_report* r, const char* format, const char* path);

NLSLAB_API void nlslab_report_free(nlslab_report* r);
NLSLAB_API void nlslab_string_free(char* s);

/* Message of the last failure on the calling thread; empty when none. */
NLSLAB_API const char* nlslab_last_error(void);

#ifdef __cplusplus
}
#endif

#endif
