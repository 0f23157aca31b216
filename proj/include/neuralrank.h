/*
 * neuralrank - C API for the rank-collapse numerics library.
 *
 * All functions return nrc_status (NRC_OK on success) unless they are pure
 * accessors. Objects are opaque handles created and destroyed through this
 * API; every *_free accepts NULL. On failure, nrc_last_error() returns a
 * thread-local message describing the most recent error in the calling
 * thread.
 */
#ifndef NEURALRANK_H
#define NEURALRANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NRC_API __declspec(dllexport)
#else
#define NRC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nrc_status {
  NRC_OK = 0,
  NRC_ERR_INVALID_ARGUMENT = 1,
  NRC_ERR_NOT_FINITE = 2,
  NRC_ERR_NOT_POSITIVE_DEFINITE = 3,
  NRC_ERR_NO_CONVERGENCE = 4,
  NRC_ERR_DIVERGENCE = 5,
  NRC_ERR_FORMAT = 6,
  NRC_ERR_MISMATCH = 7,
  NRC_ERR_IO = 8,
  NRC_ERR_PRECONDITION = 9,
  NRC_ERR_INTERNAL = 10
} nrc_status;

typedef struct nrc_matrix nrc_matrix;
typedef struct nrc_dataset nrc_dataset;
typedef struct nrc_model nrc_model;

NRC_API const char* nrc_version(void);
NRC_API const char* nrc_status_name(nrc_status status);
NRC_API const char* nrc_last_error(void);
NRC_API void nrc_string_free(char* s);

/* --- matrices (row-major doubles) ------------------------------------- */

NRC_API nrc_status nrc_matrix_create(size_t rows, size_t cols, const double* row_major,
                                     nrc_matrix** out);
NRC_API void nrc_matrix_free(nrc_matrix* m);
NRC_API size_t nrc_matrix_rows(const nrc_matrix* m);
NRC_API size_t nrc_matrix_cols(const nrc_matrix* m);
/* Copies rows*cols doubles into buf (buf_len must be large enough). */
NRC_API nrc_status nrc_matrix_copy_data(const nrc_matrix* m, double* buf, size_t buf_len);

/* --- spectral kernels --------------------------------------------------- */

/* Thin SVD: *u (rows x r), sigma (r doubles, non-increasing), *vt (r x cols)
 * with r = min(rows, cols). sigma_len must be >= r. */
NRC_API nrc_status nrc_svd(const nrc_matrix* a, nrc_matrix** u, double* sigma, size_t sigma_len,
                           nrc_matrix** vt);
NRC_API nrc_status nrc_truncate_rank(const nrc_matrix* a, size_t k, nrc_matrix** out);
NRC_API nrc_status nrc_dist_to_rank_k(const nrc_matrix* a, size_t k, double* out);
NRC_API nrc_status nrc_numerical_rank(const nrc_matrix* a, double rel_tol, size_t* out);
/* softrank rk(eps): smallest r with the inclusive singular value tail below eps. */
NRC_API nrc_status nrc_softrank(const nrc_matrix* a, double epsilon, size_t* out);
NRC_API nrc_status nrc_spd_solve(const nrc_matrix* a, const nrc_matrix* b, nrc_matrix** out);
NRC_API nrc_status nrc_spd_inv_sqrt(const nrc_matrix* a, nrc_matrix** out);

/* --- datasets ------------------------------------------------------------ */

/* spec_json: {"clusters":K,"dim":d,"n":N,"sigma":s,"seed":u64,
 *             "mean_radius":r (optional, default 5*sigma)}
 * Labels default to one-hot cluster indicators. */
NRC_API nrc_status nrc_dataset_sample_mixture(const char* spec_json, nrc_dataset** out);
NRC_API nrc_status nrc_dataset_load_idx(const char* images_path, const char* labels_path,
                                        size_t limit /* 0 = all */, nrc_dataset** out);
NRC_API nrc_status nrc_dataset_autoencoder_labels(const nrc_dataset* ds, nrc_dataset** out);
NRC_API nrc_status nrc_dataset_one_hot_labels(const nrc_dataset* ds, size_t num_classes,
                                              nrc_dataset** out);
NRC_API void nrc_dataset_free(nrc_dataset* ds);
NRC_API size_t nrc_dataset_size(const nrc_dataset* ds);
NRC_API nrc_status nrc_dataset_x(const nrc_dataset* ds, nrc_matrix** out);
NRC_API nrc_status nrc_dataset_y(const nrc_dataset* ds, nrc_matrix** out);

/* --- training ------------------------------------------------------------ */

/* config_json: {"hidden_widths":[...],"activation":"tanh|identity",
 *               "output_activation":"tanh|identity","weight_decay":l,
 *               "learning_rate":lr,"max_epochs":n,"batch_size":b,
 *               "grad_tol":t,"seed":u64,"record_every":n,
 *               "task":"autoencoder|classification"} */
NRC_API nrc_status nrc_train(const nrc_dataset* ds, const char* config_json, nrc_model** out);
NRC_API void nrc_model_free(nrc_model* m);
NRC_API size_t nrc_model_layers(const nrc_model* m);
NRC_API nrc_status nrc_model_weight(const nrc_model* m, size_t layer, nrc_matrix** out);
NRC_API nrc_status nrc_model_stationarity_residual(const nrc_model* m, const nrc_dataset* ds,
                                                   double lambda, double* out);

/* --- experiments and verification ---------------------------------------- */

/* Default JSON config for an experiment name (fig1_sweep, fig2_linear,
 * fig3_trace, width_sweep, depth_sweep, verify_all). Caller frees with
 * nrc_string_free. */
NRC_API nrc_status nrc_default_config(const char* experiment, char** out_json);

/* Runs a sweep experiment; writes one CSV into config["output_dir"] (the
 * directory must exist). *out_path (optional) receives the file path. */
NRC_API nrc_status nrc_experiment_run(const char* config_json, size_t workers, char** out_path);

/* Runs the verification suite; writes a JSON report into out_dir.
 * *n_failed counts failed checks (negative controls count as failed when
 * they do NOT fail as designed). */
NRC_API nrc_status nrc_verify_run(const char* config_json, size_t workers, int* n_failed,
                                  char** out_path);

#ifdef __cplusplus
}
#endif

#endif /* NEURALRANK_H */
