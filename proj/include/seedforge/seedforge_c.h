/* seedforge C API: opaque toolkit handle + error codes over the C++ core.
 *
 * Conventions:
 *   - every function returns sf_status; SF_OK is 0.
 *   - char** out parameters receive a heap string owned by the caller;
 *     release with sf_string_free().
 *   - sf_last_error() returns the message of the most recent failure on
 *     the calling thread, valid until the next seedforge call there.
 */
#ifndef SEEDFORGE_C_H
#define SEEDFORGE_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_INVALID_ARGUMENT = 1,
  SF_ERR_PARSE = 2,
  SF_ERR_IO = 3,
  SF_ERR_AUTH = 4,
  SF_ERR_TRANSPORT = 5,
  SF_ERR_SCRIPT_EXHAUSTED = 6,
  SF_ERR_CASSETTE_MISS = 7,
  SF_ERR_SIZE_LIMIT = 8,
  SF_ERR_EMPTY_EVALUATION = 9,
  SF_ERR_PROPOSAL_EXHAUSTED = 10,
  SF_ERR_REGENERATION_INCOMPLETE = 11,
  SF_ERR_EXTRACTION_PARSE = 12,
  SF_ERR_UNSUPPORTED = 13,
  SF_ERR_INTERNAL = 14
} sf_status;

typedef struct sf_toolkit sf_toolkit;

SF_API const char* sf_version(void);
SF_API const char* sf_status_name(sf_status status);
SF_API const char* sf_last_error(void);
SF_API void sf_string_free(char* s);

/* config: a JSON object string, or a path to a JSON config file. */
SF_API sf_status sf_toolkit_open(const char* config, sf_toolkit** out);
SF_API void sf_toolkit_close(sf_toolkit* toolkit);

/* -------- batch jobs (paths in, files + JSON summaries out) -------- */

/* Runs the generation loop over a seeds JSONL file into out_dir
 * (benchmark.jsonl, manifest.json, probes.jsonl). Resumable: seeds already
 * accepted in an existing manifest are skipped. */
SF_API sf_status sf_generate(sf_toolkit* toolkit, const char* seeds_path,
                             const char* out_dir, char** summary_json);

/* Re-runs generation against the manifest already in out_dir. */
SF_API sf_status sf_resume(sf_toolkit* toolkit, const char* seeds_path,
                           const char* out_dir, char** summary_json);

/* Repeated generation under distinct run seeds, outputs under
 * out_dir/run_NNN plus a per-run metrics table. */
SF_API sf_status sf_regenerate(sf_toolkit* toolkit, const char* seeds_path,
                               const char* out_dir, const int64_t* run_seeds,
                               size_t n_runs, char** summary_json);

/* Audits a QA dataset (Sample JSONL): no-context + gold conditions,
 * leakage error / answerability accuracy, and the three-way quality
 * classification of no-context responses. */
SF_API sf_status sf_audit(sf_toolkit* toolkit, const char* dataset_path,
                          const char* dataset_id, char** report_json);

/* Evaluates a benchmark (Sample or generated JSONL) under the configured
 * conditions and retrievers; emits a Table-1-shaped report. */
SF_API sf_status sf_evaluate(sf_toolkit* toolkit, const char* benchmark_path,
                             const char* dataset_id, char** report_json);

/* Generation study mode: cyclic structure perturbation with the given
 * shift on the triplet-regeneration path. */
SF_API sf_status sf_perturb(sf_toolkit* toolkit, const char* seeds_path,
                            int shift, const char* out_dir, char** summary_json);

/* Graph statistics per sample + aggregates over a generated benchmark. */
SF_API sf_status sf_dataset_stats(sf_toolkit* toolkit, const char* benchmark_path,
                                  char** stats_json);

/* -------- pure helpers (no toolkit required) -------- */

/* scheme: hotpotqa | 2wikimultihopqa | wikihop | qasc | jsonl */
SF_API sf_status sf_import_dataset(const char* scheme, const char* input_path,
                                   const char* output_path, char** summary_json);

SF_API sf_status sf_validate_sample(const char* sample_json, char** violations_json);

SF_API sf_status sf_graph_stats(const char* graph_json, char** stats_json);

/* strict != 0 -> label-respecting isomorphism. */
SF_API sf_status sf_graphs_equivalent(const char* graph1_json, const char* graph2_json,
                                      int strict, char** report_json);

SF_API sf_status sf_cyclic_perturbation(const char* triplets_json, int shift,
                                        char** out_triplets_json);

SF_API sf_status sf_apply_mapping(const char* sample_json, const char* mapping_json,
                                  char** out_sample_json);

/* choices_json: JSON array of strings, or NULL. *out_contains in {0,1}. */
SF_API sf_status sf_answer_contains(const char* response, const char* answer,
                                    const char* choices_json, int* out_contains);

/* Both arguments are JSON arrays of EvalRecord objects. */
SF_API sf_status sf_compute_metrics(const char* no_ctx_records_json,
                                    const char* gold_records_json,
                                    const char* dataset_id, const char* model_id,
                                    char** metrics_json);

/* Array of evaluation-report JSON objects (sf_evaluate output) -> combined
 * comparison table. */
SF_API sf_status sf_compare_reports(const char* reports_json_array, char** report_json);

SF_API sf_status sf_report_to_csv(const char* report_json, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* SEEDFORGE_C_H */
