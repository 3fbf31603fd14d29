/* C interface of the skewnet shared library.
 *
 * A job is described by a JSON config (see README for the schema), executed
 * with skewnet_job_run, and reports through an opaque handle. Status codes
 * match the CLI exit codes: 0 success, 2 validation failure, 3 numerical
 * failure, 4 I/O failure.
 */
#ifndef SKEWNET_C_H
#define SKEWNET_C_H

#ifdef __cplusplus
extern "C" {
#endif

#define SKEWNET_OK 0
#define SKEWNET_E_VALIDATION 2
#define SKEWNET_E_NUMERICAL 3
#define SKEWNET_E_IO 4

typedef struct skewnet_job skewnet_job;

const char* skewnet_version(void);

/* Runs a job; never returns NULL. The handle owns all returned strings. */
skewnet_job* skewnet_job_run(const char* config_json);

int skewnet_job_status(const skewnet_job* job);

/* JSON residual report (empty object on early failure). */
const char* skewnet_job_report(const skewnet_job* job);

/* Empty string when the job succeeded. */
const char* skewnet_job_error(const skewnet_job* job);

void skewnet_job_free(skewnet_job* job);

#ifdef __cplusplus
}
#endif

#endif /* SKEWNET_C_H */
