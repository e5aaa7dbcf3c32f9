/* C interface to the growth-estimate toolkit. */
#ifndef KGC_KGC_H
#define KGC_KGC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define KGC_API __declspec(dllexport)
#else
#define KGC_API __attribute__((visibility("default")))
#endif

typedef struct kgc_scenario kgc_scenario;
typedef struct kgc_report kgc_report;

typedef enum kgc_status {
  KGC_OK = 0,
  KGC_ERR_ARGUMENT = 1,
  KGC_ERR_CONFIG = 2,
  KGC_ERR_IO = 3,
  KGC_ERR_RUNTIME = 4
} kgc_status;

KGC_API const char *kgc_version(void);
/* Message of the last failed call on this thread; empty when none. */
KGC_API const char *kgc_last_error(void);

KGC_API kgc_status kgc_scenario_parse(const char *text, kgc_scenario **out);
KGC_API kgc_status kgc_scenario_load(const char *path, kgc_scenario **out);
KGC_API size_t kgc_catalog_size(void);
KGC_API kgc_status kgc_catalog_get(size_t index, kgc_scenario **out);
KGC_API void kgc_scenario_free(kgc_scenario *s);

KGC_API const char *kgc_scenario_name(const kgc_scenario *s);
KGC_API kgc_status kgc_scenario_set_tolerance(kgc_scenario *s, double tolerance);
KGC_API kgc_status kgc_scenario_set_seed(kgc_scenario *s, uint64_t seed);
KGC_API kgc_status kgc_scenario_set_grid(kgc_scenario *s, int grid);
/* Comma separated check names, e.g. "audit,monotone-Mplus". */
KGC_API kgc_status kgc_scenario_set_checks(kgc_scenario *s, const char *checks);

KGC_API kgc_status kgc_run(const kgc_scenario *s, kgc_report **out);
/* Standalone monotonicity-oracle suite. */
KGC_API kgc_status kgc_lemma_a(uint64_t seed, kgc_report **out);

/* 0 passed, 2 a check failed, 3 audit failed or checks skipped. */
KGC_API int kgc_report_exit_code(const kgc_report *r);
/* Owned by the report; valid until the report is freed or emitted again. */
KGC_API const char *kgc_report_summary(const kgc_report *r);
KGC_API kgc_status kgc_report_emit(kgc_report *r, const char *dir);
KGC_API void kgc_report_free(kgc_report *r);

#ifdef __cplusplus
}
#endif

#endif
