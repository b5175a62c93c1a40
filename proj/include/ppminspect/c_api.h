/*
 * Copyright 2026 the ppminspect authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef PPMINSPECT_C_API_H_
#define PPMINSPECT_C_API_H_

/*
 * C interface to the ppminspect core: event-log driven training, explanation,
 * mining and inspection of business process prediction models.
 *
 * Usage pattern:
 *
 *   ppmi_session* session = NULL;
 *   if (ppmi_session_open_file("run.json", &session) != PPMI_OK) {
 *     fprintf(stderr, "%s\n", ppmi_last_error());
 *     return 2;
 *   }
 *   char* metrics = NULL;
 *   if (ppmi_train(session, &metrics) == PPMI_OK) {
 *     puts(metrics);
 *     ppmi_string_free(metrics);
 *   }
 *   ppmi_session_close(session);
 *
 * All functions returning `char**` allocate the string with the library
 * allocator; release it with ppmi_string_free. Output files are written to
 * the session's output directory as a side effect of each run call.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef PPMI_API
#define PPMI_API __attribute__((visibility("default")))
#endif

typedef enum ppmi_status {
  PPMI_OK = 0,
  PPMI_ERROR_INVALID_ARGUMENT = 1,
  PPMI_ERROR_IO = 2,
  PPMI_ERROR_CONFIG = 3,
  PPMI_ERROR_DATA = 4,
  PPMI_ERROR_STATE = 5,
  PPMI_ERROR_INTERNAL = 6
} ppmi_status;

/* Opaque handle for one configured run over one event log. Not thread-safe;
 * use one session per thread. */
typedef struct ppmi_session ppmi_session;

PPMI_API const char* ppmi_version(void);

/* Message for the most recent failure on the calling thread. Never NULL;
 * empty string when no error occurred. */
PPMI_API const char* ppmi_last_error(void);

/* Creates a session from a JSON run configuration (document or file). */
PPMI_API ppmi_status ppmi_session_open(const char* config_json, ppmi_session** out);
PPMI_API ppmi_status ppmi_session_open_file(const char* path, ppmi_session** out);
PPMI_API void ppmi_session_close(ppmi_session* session);

PPMI_API ppmi_status ppmi_session_set_seed(ppmi_session* session, uint64_t seed);
PPMI_API ppmi_status ppmi_session_set_output_dir(ppmi_session* session, const char* dir);

/* Parses the log and returns a schema/coverage summary. */
PPMI_API ppmi_status ppmi_validate(ppmi_session* session, char** summary_json);

/* Trains per-bucket models; writes metrics.json, plot_data.csv and model
 * files; returns the metrics document. */
PPMI_API ppmi_status ppmi_train(ppmi_session* session, char** metrics_json);

/* Writes global_explanation.json; returns the document. */
PPMI_API ppmi_status ppmi_explain_global(ppmi_session* session, char** explanation_json);

/* Local surrogate explanation for one case at one prefix length; writes
 * local_<case>_<L>.json. */
PPMI_API ppmi_status ppmi_explain_local(ppmi_session* session, const char* case_id,
                                        int prefix_length, char** explanation_json);

/* Discovers the directly-follows graph; writes dfg.dot and
 * dfg_statistics.json. */
PPMI_API ppmi_status ppmi_mine(ppmi_session* session, char** stats_json);

/* Full pipeline plus every inspection rule; writes inspection_report.json
 * and inspection_report.txt. error_finding_count receives the number of
 * error-severity findings (may be NULL). */
PPMI_API ppmi_status ppmi_inspect(ppmi_session* session, int* error_finding_count,
                                  char** report_json);

PPMI_API void ppmi_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PPMINSPECT_C_API_H_ */
