/* tedkit C API: datasets, label+explanation composite training, evaluation
 * and the bundled benchmark protocol, behind opaque handles.
 *
 * Every function that can fail returns a tedkit_status; on failure,
 * tedkit_last_error() holds a message for the calling thread until the next
 * failing call. Strings returned through char** are heap-allocated and must
 * be released with tedkit_string_free(); handles with the matching *_free().
 */
#ifndef TEDKIT_H
#define TEDKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TEDKIT_API __declspec(dllexport)
#else
#define TEDKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tedkit_status {
  TEDKIT_OK = 0,
  TEDKIT_ERR_INVALID_ARGUMENT = 1,
  TEDKIT_ERR_IO = 2,
  TEDKIT_ERR_FORMAT = 3,
  TEDKIT_ERR_STATE = 4,
  TEDKIT_ERR_INTERNAL = 5
} tedkit_status;

typedef struct tedkit_dataset tedkit_dataset;
typedef struct tedkit_model tedkit_model;

TEDKIT_API const char* tedkit_version(void);
TEDKIT_API const char* tedkit_status_name(tedkit_status status);
/* Message for the last failure on this thread; never NULL. */
TEDKIT_API const char* tedkit_last_error(void);
TEDKIT_API void tedkit_string_free(char* s);

/* -- datasets ------------------------------------------------------------ */

/* All 4520 legal non-terminal tic-tac-toe positions, rule-labeled. */
TEDKIT_API tedkit_status tedkit_dataset_tictactoe(int with_explanations,
                                                  tedkit_dataset** out);
/* n synthetic loan records, rule-labeled with explanations. */
TEDKIT_API tedkit_status tedkit_dataset_loan(int64_t n, uint64_t seed,
                                             tedkit_dataset** out);
TEDKIT_API tedkit_status tedkit_dataset_read_csv(const char* path, tedkit_dataset** out);
TEDKIT_API tedkit_status tedkit_dataset_write_csv(const tedkit_dataset* dataset,
                                                  const char* path);
TEDKIT_API tedkit_status tedkit_dataset_drop_explanations(const tedkit_dataset* dataset,
                                                          tedkit_dataset** out);
/* Seeded shuffle split into floor(train_fraction * n) / remainder. */
TEDKIT_API tedkit_status tedkit_dataset_split(const tedkit_dataset* dataset,
                                              double train_fraction, uint64_t seed,
                                              tedkit_dataset** train, tedkit_dataset** test);
TEDKIT_API int64_t tedkit_dataset_size(const tedkit_dataset* dataset);
TEDKIT_API int64_t tedkit_dataset_feature_count(const tedkit_dataset* dataset);
TEDKIT_API int tedkit_dataset_has_explanations(const tedkit_dataset* dataset);
/* Instance/class tallies as JSON. */
TEDKIT_API tedkit_status tedkit_dataset_summary_json(const tedkit_dataset* dataset,
                                                     char** out_json);
/* Composite-class sidecar for an explanation-carrying dataset:
 * {"labels":[...], "explanations":[...], "pairs":[[y,e,c],...]}. */
TEDKIT_API tedkit_status tedkit_dataset_codec_json(const tedkit_dataset* dataset,
                                                   char** out_json);
TEDKIT_API void tedkit_dataset_free(tedkit_dataset* dataset);

/* -- training and models -------------------------------------------------- */

/* learner: "mlp" | "forest"; mode: "baseline" | "ted".
 * options_json (NULL for defaults) may set hidden_units, epochs, batch_size,
 * learning_rate, n_trees, min_samples_leaf, bootstrap. */
TEDKIT_API tedkit_status tedkit_train(const tedkit_dataset* dataset, const char* learner,
                                      const char* mode, uint64_t seed,
                                      const char* options_json, tedkit_model** out);
TEDKIT_API tedkit_status tedkit_model_save(const tedkit_model* model, const char* path);
TEDKIT_API tedkit_status tedkit_model_load(const char* path, tedkit_model** out);
TEDKIT_API tedkit_status tedkit_model_info_json(const tedkit_model* model, char** out_json);
TEDKIT_API void tedkit_model_free(tedkit_model* model);

/* -- evaluation and prediction -------------------------------------------- */

/* options_json (NULL ok) may set {"derive_y_from_e": bool}. */
TEDKIT_API tedkit_status tedkit_evaluate(const tedkit_model* model,
                                         const tedkit_dataset* dataset,
                                         const char* options_json, char** out_report_json);
/* TED models only: decoded label/explanation names + composite score. */
TEDKIT_API tedkit_status tedkit_predict_row(const tedkit_model* model,
                                            const double* features, int64_t count,
                                            char** out_json);

/* -- benchmark protocol ---------------------------------------------------- */

/* options_json (NULL ok) may set ttt_seed, loan_seeds, loan_n, loan_gen_seed.
 * The report JSON is byte-stable for fixed options. */
TEDKIT_API tedkit_status tedkit_reproduce_table1(const char* options_json,
                                                 char** out_report_json);

/* Text renderings of the JSON reports. */
TEDKIT_API tedkit_status tedkit_eval_report_text(const char* report_json, char** out_text);
TEDKIT_API tedkit_status tedkit_table1_report_text(const char* report_json, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* TEDKIT_H */
