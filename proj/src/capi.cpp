#include "skewnet/skewnet_c.h"

#include <string>

#include "skewnet/jobs.hpp"

struct skewnet_job {
  int status = SKEWNET_E_VALIDATION;
  std::string report;
  std::string error;
};

extern "C" {

const char* skewnet_version(void) { return "skewnet 0.1.0"; }

skewnet_job* skewnet_job_run(const char* config_json) {
  auto* job = new skewnet_job;
  if (!config_json) {
    job->error = "null config";
    job->report = "{\"error\":\"null config\",\"status\":2}";
    return job;
  }
  try {
    skewnet::jobs::RunResult r = skewnet::jobs::run_json_text(config_json);
    job->status = r.status;
    job->report = r.report.dump(2);
    job->error = r.error;
  } catch (const std::exception& e) {
    job->status = SKEWNET_E_VALIDATION;
    job->error = e.what();
    job->report = "{}";
  }
  return job;
}

int skewnet_job_status(const skewnet_job* job) { return job ? job->status : SKEWNET_E_VALIDATION; }

const char* skewnet_job_report(const skewnet_job* job) { return job ? job->report.c_str() : "{}"; }

const char* skewnet_job_error(const skewnet_job* job) { return job ? job->error.c_str() : ""; }

void skewnet_job_free(skewnet_job* job) { delete job; }

}  // extern "C"
