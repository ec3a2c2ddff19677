/* oddforge C API: data-driven operational-design-domain models.
 *
 * The library derives a kernel-based ODD from labeled samples, answers
 * affinity/membership queries against it, and validates the construction
 * with a seeded Monte-Carlo precision-recall protocol.
 *
 * All functions that can fail return odf_status; odf_last_error() gives a
 * thread-local description of the most recent failure on the calling
 * thread. Handles are opaque and freed with their odf_*_free function.
 * A returned handle is owned by the caller unless stated otherwise.
 * Handles are immutable after creation and safe to share across threads.
 */

#ifndef ODDFORGE_H
#define ODDFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ODDFORGE_API __declspec(dllexport)
#else
#define ODDFORGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define ODDFORGE_ABI_VERSION 1u

typedef enum odf_status {
  ODF_OK = 0,
  ODF_ERR_INVALID_ARGUMENT = 1,
  ODF_ERR_DIMENSION_MISMATCH = 2,
  ODF_ERR_PARSE = 3,
  ODF_ERR_IO = 4,
  ODF_ERR_DEGENERATE_GEOMETRY = 5,
  ODF_ERR_INFEASIBLE_REGION = 6,
  ODF_ERR_UNSATISFIABLE_CONSTRAINT = 7,
  ODF_ERR_NON_CONVERGENCE = 8,
  ODF_ERR_VERSION_MISMATCH = 9,
  ODF_ERR_UNKNOWN = 10
} odf_status;

typedef struct odf_dataset odf_dataset;
typedef struct odf_model odf_model;
typedef struct odf_report odf_report;
typedef struct odf_mc_result odf_mc_result;

ODDFORGE_API uint32_t odf_abi_version(void);
ODDFORGE_API const char* odf_version(void);

/* Message describing the last failure on this thread; empty string if none. */
ODDFORGE_API const char* odf_last_error(void);

/* Shortest decimal form that parses back to the same double; the same
 * formatting the library uses in its own files. Returns the length written
 * (excluding the terminator), or 0 if the buffer is too small. */
ODDFORGE_API size_t odf_format_real(double value, char* buffer, size_t size);

/* ---- datasets ---------------------------------------------------------- */

/* Points are row-major: n_points rows of `dimension` doubles. ood may be
 * NULL when n_ood is 0. */
ODDFORGE_API odf_status odf_dataset_create(size_t dimension, const double* id_points,
                                           size_t n_id, const double* ood_points,
                                           size_t n_ood, odf_dataset** out);

/* dim_columns name the CSV columns (in order) that form the point; label_column
 * may be NULL (all rows ID). Rows whose label equals ood_label go to OOD,
 * id_label to ID; anything else is an error. */
ODDFORGE_API odf_status odf_dataset_from_csv(const char* path,
                                             const char* const* dim_columns,
                                             size_t n_dim_columns,
                                             const char* label_column,
                                             const char* id_label,
                                             const char* ood_label,
                                             odf_dataset** out);

/* strict != 0 makes frames missing a mapped attribute an error; otherwise
 * they are skipped and counted in *skipped (which may be NULL). */
ODDFORGE_API odf_status odf_dataset_from_openlabel(const char* path,
                                                   const char* const* dim_columns,
                                                   size_t n_dim_columns, int strict,
                                                   size_t* skipped, odf_dataset** out);

ODDFORGE_API size_t odf_dataset_dimension(const odf_dataset* ds);
ODDFORGE_API size_t odf_dataset_id_count(const odf_dataset* ds);
ODDFORGE_API size_t odf_dataset_ood_count(const odf_dataset* ds);

/* Copies one sample (ood = 0: ID list, ood != 0: OOD list) into out, which
 * needs odf_dataset_dimension(ds) slots. */
ODDFORGE_API odf_status odf_dataset_point(const odf_dataset* ds, int ood, size_t index,
                                          double* out);

ODDFORGE_API void odf_dataset_free(odf_dataset* ds);

/* ---- derivation -------------------------------------------------------- */

typedef struct odf_derive_params {
  double kappa;            /* max sigma diagonal entry, > 0 */
  double eta;              /* decay factor, >= 0 */
  double lambda;           /* sigma lower bound, 0 < lambda <= kappa */
  int per_dimension;       /* 0: global nearest-neighbor distance, 1: per dimension */
  int normalize;           /* min/range rescaling fitted on ID samples */
  double zeta;             /* membership threshold in [0, 1] */
  double xi;               /* max OOD affinity in [0, 1), xi < zeta */
  double shrink_factor;    /* sigma contraction per adjustment, in (0, 1) */
  int max_shrink_iters;    /* per OOD point and pass */
  int max_passes;
  double shrink_floor;     /* hard sigma floor */
} odf_derive_params;

ODDFORGE_API odf_derive_params odf_derive_params_default(void);

/* report_out may be NULL. On ODF_ERR_NON_CONVERGENCE a report is still
 * produced when report_out is given. */
ODDFORGE_API odf_status odf_derive(const odf_dataset* ds,
                                   const odf_derive_params* params, odf_model** out,
                                   odf_report** report_out);

ODDFORGE_API size_t odf_report_anchor_count(const odf_report* r);
ODDFORGE_API size_t odf_report_ood_count(const odf_report* r);
ODDFORGE_API size_t odf_report_adjustment_count(const odf_report* r);
ODDFORGE_API int odf_report_passes_used(const odf_report* r);
ODDFORGE_API int odf_report_constraint_satisfied(const odf_report* r);
ODDFORGE_API odf_status odf_report_adjustment(const odf_report* r, size_t index,
                                              size_t* anchor_index, size_t* ood_index);
ODDFORGE_API void odf_report_free(odf_report* r);

/* ---- models ------------------------------------------------------------ */

ODDFORGE_API odf_status odf_model_save(const odf_model* m, const char* path);
ODDFORGE_API odf_status odf_model_load(const char* path, odf_model** out);
ODDFORGE_API void odf_model_free(odf_model* m);

ODDFORGE_API size_t odf_model_dimension(const odf_model* m);
ODDFORGE_API size_t odf_model_anchor_count(const odf_model* m);
ODDFORGE_API double odf_model_zeta(const odf_model* m);
ODDFORGE_API double odf_model_xi(const odf_model* m);
ODDFORGE_API double odf_model_kappa(const odf_model* m);
ODDFORGE_API double odf_model_eta(const odf_model* m);
ODDFORGE_API double odf_model_lambda(const odf_model* m);
ODDFORGE_API int odf_model_per_dimension(const odf_model* m);
ODDFORGE_API int odf_model_normalized(const odf_model* m);

/* Copies the digest / the i-th dimension name into buffer (always
 * NUL-terminated); returns the full length. Empty string if unnamed. */
ODDFORGE_API size_t odf_model_digest(const odf_model* m, char* buffer, size_t size);
ODDFORGE_API size_t odf_model_dimension_name(const odf_model* m, size_t index,
                                             char* buffer, size_t size);

/* inside_out may be NULL. */
ODDFORGE_API odf_status odf_model_affinity(const odf_model* m, const double* x,
                                           size_t dimension, double* affinity_out,
                                           int* inside_out);

/* Row-major batch; affinities_out has n_points slots, inside_out likewise
 * or NULL. May use worker threads (capped by ODDFORGE_THREADS) without
 * changing results. */
ODDFORGE_API odf_status odf_model_affinity_batch(const odf_model* m, const double* xs,
                                                 size_t n_points, size_t dimension,
                                                 double* affinities_out,
                                                 int* inside_out);

/* bands must be strictly increasing within [0, 1]; band_out gets the index
 * of the highest boundary <= affinity (0 = below all bands). */
ODDFORGE_API odf_status odf_model_band(const odf_model* m, const double* x,
                                       size_t dimension, const double* bands,
                                       size_t n_bands, int* band_out);

ODDFORGE_API odf_status odf_model_affinity_gradient(const odf_model* m, const double* x,
                                                    size_t dimension,
                                                    double* gradient_out);

/* ---- precision/recall against labeled data ----------------------------- */

/* Scores the dataset (ID = positive, OOD = negative) over the default
 * threshold grid and writes a CSV with columns
 * zeta,precision,recall,degenerate_truth. degenerate_out (may be NULL) is
 * set to 1 when the truth holds a single class only. */
ODDFORGE_API odf_status odf_pr_curve(const odf_model* m, const odf_dataset* labeled,
                                     const char* csv_path, int* degenerate_out);

/* ---- Monte-Carlo validation -------------------------------------------- */

typedef struct odf_mc_params {
  const size_t* anchor_counts;
  size_t n_anchor_counts;
  size_t n_validation;
  uint64_t seed;
  odf_derive_params derive;
} odf_mc_params;

/* Runs the Monte-Carlo protocol against the ground-truth spec JSON (which
 * must carry a `box`) and writes the per-threshold results CSV and the R^2
 * summary CSV. results_out may be NULL. */
ODDFORGE_API odf_status odf_validate_mc(const char* gt_spec_path,
                                        const odf_mc_params* params,
                                        const char* results_csv_path,
                                        const char* summary_csv_path,
                                        odf_mc_result** results_out);

ODDFORGE_API size_t odf_mc_result_count(const odf_mc_result* r);
ODDFORGE_API odf_status odf_mc_result_entry(const odf_mc_result* r, size_t index,
                                            size_t* anchor_count, double* r2_precision,
                                            double* r2_recall);
/* R^2 between the curves averaged across anchor counts. */
ODDFORGE_API odf_status odf_mc_result_overall(const odf_mc_result* r,
                                              double* r2_precision, double* r2_recall);
ODDFORGE_API void odf_mc_result_free(odf_mc_result* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ODDFORGE_H */
