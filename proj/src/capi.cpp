#include "oddforge.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "oddforge/derivation.hpp"
#include "oddforge/errors.hpp"
#include "oddforge/ingestion.hpp"
#include "oddforge/model.hpp"
#include "oddforge/numeric_text.hpp"
#include "oddforge/validation.hpp"

struct odf_dataset {
  oddforge::Dataset ds;
};
struct odf_model {
  oddforge::KernelOdd model;
};
struct odf_report {
  oddforge::DerivationReport report;
};
struct odf_mc_result {
  oddforge::McResult result;
};

namespace {

thread_local std::string g_last_error;

odf_status status_from(oddforge::errc code) {
  using oddforge::errc;
  switch (code) {
    case errc::invalid_argument:
      return ODF_ERR_INVALID_ARGUMENT;
    case errc::dimension_mismatch:
      return ODF_ERR_DIMENSION_MISMATCH;
    case errc::parse:
      return ODF_ERR_PARSE;
    case errc::io:
      return ODF_ERR_IO;
    case errc::degenerate_geometry:
      return ODF_ERR_DEGENERATE_GEOMETRY;
    case errc::infeasible_region:
      return ODF_ERR_INFEASIBLE_REGION;
    case errc::unsatisfiable_constraint:
      return ODF_ERR_UNSATISFIABLE_CONSTRAINT;
    case errc::non_convergence:
      return ODF_ERR_NON_CONVERGENCE;
    case errc::version_mismatch:
      return ODF_ERR_VERSION_MISMATCH;
  }
  return ODF_ERR_UNKNOWN;
}

template <typename Fn>
odf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ODF_OK;
  } catch (const oddforge::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ODF_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return ODF_ERR_UNKNOWN;
  }
}

odf_status invalid(const char* message) {
  g_last_error = message;
  return ODF_ERR_INVALID_ARGUMENT;
}

std::vector<oddforge::Point> rows_to_points(const double* data, size_t n_points,
                                            size_t dimension) {
  std::vector<oddforge::Point> points(n_points, oddforge::Point(dimension));
  for (size_t i = 0; i < n_points; ++i) {
    for (size_t k = 0; k < dimension; ++k) points[i][k] = data[i * dimension + k];
  }
  return points;
}

oddforge::DerivationConfig config_from(const odf_derive_params& p) {
  oddforge::DerivationConfig cfg;
  cfg.kernel.kappa = p.kappa;
  cfg.kernel.eta = p.eta;
  cfg.kernel.lambda = p.lambda;
  cfg.kernel.distance_mode = p.per_dimension ? oddforge::DistanceMode::PerDimension
                                             : oddforge::DistanceMode::Global;
  cfg.kernel.normalize = p.normalize != 0;
  cfg.zeta = p.zeta;
  cfg.xi = p.xi;
  cfg.shrink_factor = p.shrink_factor;
  cfg.max_shrink_iters = p.max_shrink_iters;
  cfg.max_passes = p.max_passes;
  cfg.shrink_floor = p.shrink_floor;
  return cfg;
}

size_t copy_string(const std::string& s, char* buffer, size_t size) {
  if (buffer && size > 0) {
    const size_t n = s.size() < size - 1 ? s.size() : size - 1;
    std::memcpy(buffer, s.data(), n);
    buffer[n] = '\0';
  }
  return s.size();
}

}  // namespace

extern "C" {

uint32_t odf_abi_version(void) { return ODDFORGE_ABI_VERSION; }

const char* odf_version(void) { return "1.0.0"; }

const char* odf_last_error(void) { return g_last_error.c_str(); }

size_t odf_format_real(double value, char* buffer, size_t size) {
  const std::string s = oddforge::format_real(value);
  if (!buffer || size <= s.size()) return 0;
  std::memcpy(buffer, s.data(), s.size());
  buffer[s.size()] = '\0';
  return s.size();
}

odf_status odf_dataset_create(size_t dimension, const double* id_points, size_t n_id,
                              const double* ood_points, size_t n_ood,
                              odf_dataset** out) {
  if (!out) return invalid("out must not be NULL");
  if (n_id > 0 && !id_points) return invalid("id_points must not be NULL");
  if (n_ood > 0 && !ood_points) return invalid("ood_points must not be NULL");
  *out = nullptr;
  return guarded([&] {
    oddforge::Dataset ds;
    ds.dimension = dimension;
    ds.id_samples = rows_to_points(id_points, n_id, dimension);
    ds.ood_samples = rows_to_points(ood_points, n_ood, dimension);
    ds.validate();
    *out = new odf_dataset{std::move(ds)};
  });
}

odf_status odf_dataset_from_csv(const char* path, const char* const* dim_columns,
                                size_t n_dim_columns, const char* label_column,
                                const char* id_label, const char* ood_label,
                                odf_dataset** out) {
  if (!out || !path || !dim_columns) return invalid("path, dim_columns and out are required");
  *out = nullptr;
  return guarded([&] {
    oddforge::ColumnMapping mapping;
    for (size_t i = 0; i < n_dim_columns; ++i) {
      mapping.dimension_columns.emplace_back(dim_columns[i]);
    }
    if (label_column) mapping.label_column = label_column;
    if (id_label) mapping.id_label = id_label;
    if (ood_label) mapping.ood_label = ood_label;
    *out = new odf_dataset{oddforge::parse_csv(path, mapping)};
  });
}

odf_status odf_dataset_from_openlabel(const char* path, const char* const* dim_columns,
                                      size_t n_dim_columns, int strict, size_t* skipped,
                                      odf_dataset** out) {
  if (!out || !path || !dim_columns) return invalid("path, dim_columns and out are required");
  *out = nullptr;
  return guarded([&] {
    oddforge::ColumnMapping mapping;
    for (size_t i = 0; i < n_dim_columns; ++i) {
      mapping.dimension_columns.emplace_back(dim_columns[i]);
    }
    oddforge::OpenLabelStats stats;
    auto ds = oddforge::parse_openlabel(
        path, mapping,
        strict ? oddforge::OpenLabelMode::Strict : oddforge::OpenLabelMode::Lenient,
        &stats);
    if (skipped) *skipped = stats.frames_skipped;
    *out = new odf_dataset{std::move(ds)};
  });
}

size_t odf_dataset_dimension(const odf_dataset* ds) { return ds ? ds->ds.dimension : 0; }
size_t odf_dataset_id_count(const odf_dataset* ds) {
  return ds ? ds->ds.id_samples.size() : 0;
}
size_t odf_dataset_ood_count(const odf_dataset* ds) {
  return ds ? ds->ds.ood_samples.size() : 0;
}

odf_status odf_dataset_point(const odf_dataset* ds, int ood, size_t index, double* out) {
  if (!ds || !out) return invalid("dataset and out are required");
  const auto& list = ood ? ds->ds.ood_samples : ds->ds.id_samples;
  if (index >= list.size()) return invalid("sample index out of range");
  for (size_t k = 0; k < list[index].size(); ++k) out[k] = list[index][k];
  return ODF_OK;
}

void odf_dataset_free(odf_dataset* ds) { delete ds; }

odf_derive_params odf_derive_params_default(void) {
  odf_derive_params p;
  p.kappa = 1.0;
  p.eta = 0.5;
  p.lambda = 0.05;
  p.per_dimension = 0;
  p.normalize = 0;
  p.zeta = 0.5;
  p.xi = 0.05;
  p.shrink_factor = 0.5;
  p.max_shrink_iters = 200;
  p.max_passes = 50;
  p.shrink_floor = 1e-9;
  return p;
}

odf_status odf_derive(const odf_dataset* ds, const odf_derive_params* params,
                      odf_model** out, odf_report** report_out) {
  if (!ds || !params || !out) return invalid("ds, params and out are required");
  *out = nullptr;
  if (report_out) *report_out = nullptr;
  try {
    auto [model, report] = oddforge::derive(ds->ds, config_from(*params));
    *out = new odf_model{std::move(model)};
    if (report_out) *report_out = new odf_report{std::move(report)};
    g_last_error.clear();
    return ODF_OK;
  } catch (const oddforge::NonConvergenceError& e) {
    g_last_error = e.what();
    if (report_out) *report_out = new odf_report{e.report()};
    return ODF_ERR_NON_CONVERGENCE;
  } catch (const oddforge::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ODF_ERR_UNKNOWN;
  }
}

size_t odf_report_anchor_count(const odf_report* r) { return r ? r->report.n_anchors : 0; }
size_t odf_report_ood_count(const odf_report* r) { return r ? r->report.n_ood : 0; }
size_t odf_report_adjustment_count(const odf_report* r) {
  return r ? r->report.adjustments.size() : 0;
}
int odf_report_passes_used(const odf_report* r) { return r ? r->report.passes_used : 0; }
int odf_report_constraint_satisfied(const odf_report* r) {
  return r && r->report.constraint_satisfied ? 1 : 0;
}

odf_status odf_report_adjustment(const odf_report* r, size_t index, size_t* anchor_index,
                                 size_t* ood_index) {
  if (!r || index >= r->report.adjustments.size()) {
    return invalid("adjustment index out of range");
  }
  if (anchor_index) *anchor_index = r->report.adjustments[index].anchor_index;
  if (ood_index) *ood_index = r->report.adjustments[index].ood_index;
  return ODF_OK;
}

void odf_report_free(odf_report* r) { delete r; }

odf_status odf_model_save(const odf_model* m, const char* path) {
  if (!m || !path) return invalid("model and path are required");
  return guarded([&] { oddforge::save_model(m->model, path); });
}

odf_status odf_model_load(const char* path, odf_model** out) {
  if (!path || !out) return invalid("path and out are required");
  *out = nullptr;
  return guarded([&] { *out = new odf_model{oddforge::load_model(path)}; });
}

void odf_model_free(odf_model* m) { delete m; }

size_t odf_model_dimension(const odf_model* m) { return m ? m->model.dimension() : 0; }
size_t odf_model_anchor_count(const odf_model* m) {
  return m ? m->model.kernels.size() : 0;
}
double odf_model_zeta(const odf_model* m) { return m ? m->model.zeta : 0.0; }
double odf_model_xi(const odf_model* m) { return m ? m->model.xi : 0.0; }
double odf_model_kappa(const odf_model* m) { return m ? m->model.config.kappa : 0.0; }
double odf_model_eta(const odf_model* m) { return m ? m->model.config.eta : 0.0; }
double odf_model_lambda(const odf_model* m) { return m ? m->model.config.lambda : 0.0; }
int odf_model_per_dimension(const odf_model* m) {
  return m && m->model.config.distance_mode == oddforge::DistanceMode::PerDimension ? 1
                                                                                    : 0;
}
int odf_model_normalized(const odf_model* m) {
  return m && m->model.normalizer ? 1 : 0;
}

size_t odf_model_digest(const odf_model* m, char* buffer, size_t size) {
  if (!m) return 0;
  return copy_string(m->model.dataset_digest, buffer, size);
}

size_t odf_model_dimension_name(const odf_model* m, size_t index, char* buffer,
                                size_t size) {
  if (!m || index >= m->model.dimension_names.size()) {
    return copy_string(std::string(), buffer, size);
  }
  return copy_string(m->model.dimension_names[index], buffer, size);
}

odf_status odf_model_affinity(const odf_model* m, const double* x, size_t dimension,
                              double* affinity_out, int* inside_out) {
  if (!m || !x || !affinity_out) return invalid("model, x and affinity_out are required");
  return guarded([&] {
    const auto res = oddforge::is_inside(m->model, oddforge::Point(x, x + dimension));
    *affinity_out = res.affinity;
    if (inside_out) *inside_out = res.inside ? 1 : 0;
  });
}

odf_status odf_model_affinity_batch(const odf_model* m, const double* xs, size_t n_points,
                                    size_t dimension, double* affinities_out,
                                    int* inside_out) {
  if (!m || !affinities_out || (n_points > 0 && !xs)) {
    return invalid("model, xs and affinities_out are required");
  }
  return guarded([&] {
    const auto points = rows_to_points(xs, n_points, dimension);
    const auto results = oddforge::score_batch(m->model, points);
    for (size_t i = 0; i < results.size(); ++i) {
      affinities_out[i] = results[i].affinity;
      if (inside_out) inside_out[i] = results[i].inside ? 1 : 0;
    }
  });
}

odf_status odf_model_band(const odf_model* m, const double* x, size_t dimension,
                          const double* bands, size_t n_bands, int* band_out) {
  if (!m || !x || !band_out || (n_bands > 0 && !bands)) {
    return invalid("model, x and band_out are required");
  }
  return guarded([&] {
    *band_out = oddforge::affinity_band(m->model, oddforge::Point(x, x + dimension),
                                        std::vector<double>(bands, bands + n_bands));
  });
}

odf_status odf_model_affinity_gradient(const odf_model* m, const double* x,
                                       size_t dimension, double* gradient_out) {
  if (!m || !x || !gradient_out) return invalid("model, x and gradient_out are required");
  return guarded([&] {
    const auto grad = oddforge::affinity_gradient(
        m->model.kernels, m->model.normalizer ? &*m->model.normalizer : nullptr,
        oddforge::Point(x, x + dimension));
    for (size_t k = 0; k < grad.size(); ++k) gradient_out[k] = grad[k];
  });
}

odf_status odf_pr_curve(const odf_model* m, const odf_dataset* labeled,
                        const char* csv_path, int* degenerate_out) {
  if (!m || !labeled || !csv_path) return invalid("model, dataset and csv_path are required");
  return guarded([&] {
    std::vector<oddforge::Point> points = labeled->ds.id_samples;
    points.insert(points.end(), labeled->ds.ood_samples.begin(),
                  labeled->ds.ood_samples.end());
    if (points.empty()) {
      oddforge::fail(oddforge::errc::invalid_argument, "labeled dataset is empty");
    }
    std::vector<std::uint8_t> truth(points.size(), 0);
    std::fill(truth.begin(), truth.begin() + labeled->ds.id_samples.size(), 1);
    const auto scored = oddforge::score_batch(m->model, points);
    std::vector<double> affinities(scored.size());
    for (size_t i = 0; i < scored.size(); ++i) affinities[i] = scored[i].affinity;
    const auto curve =
        oddforge::pr_sweep(affinities, truth, oddforge::default_threshold_grid());
    std::vector<std::vector<oddforge::Cell>> rows;
    for (size_t g = 0; g < curve.thresholds.size(); ++g) {
      std::vector<oddforge::Cell> row;
      row.emplace_back(curve.thresholds[g]);
      if (curve.precision[g]) {
        row.emplace_back(*curve.precision[g]);
      } else {
        row.emplace_back(std::string());
      }
      row.emplace_back(curve.recall[g]);
      row.emplace_back(static_cast<long long>(curve.degenerate_truth ? 1 : 0));
      rows.push_back(std::move(row));
    }
    oddforge::write_table(csv_path, {"zeta", "precision", "recall", "degenerate_truth"},
                          rows);
    if (degenerate_out) *degenerate_out = curve.degenerate_truth ? 1 : 0;
  });
}

odf_status odf_validate_mc(const char* gt_spec_path, const odf_mc_params* params,
                           const char* results_csv_path, const char* summary_csv_path,
                           odf_mc_result** results_out) {
  if (!gt_spec_path || !params || !results_csv_path || !summary_csv_path) {
    return invalid("gt_spec_path, params and output paths are required");
  }
  if (!params->anchor_counts || params->n_anchor_counts == 0) {
    return invalid("at least one anchor count is required");
  }
  if (results_out) *results_out = nullptr;
  return guarded([&] {
    std::vector<double> lower;
    std::vector<double> upper;
    const auto gt = oddforge::load_ground_truth(gt_spec_path, &lower, &upper);
    if (lower.empty()) {
      oddforge::fail(oddforge::errc::invalid_argument,
                     "ground-truth spec needs a 'box' for Monte-Carlo sampling");
    }
    oddforge::McConfig cfg;
    cfg.dimension = gt.dimension();
    cfg.box_lower = std::move(lower);
    cfg.box_upper = std::move(upper);
    cfg.anchor_counts.assign(params->anchor_counts,
                             params->anchor_counts + params->n_anchor_counts);
    cfg.n_validation = params->n_validation;
    cfg.seed = params->seed;
    cfg.derivation = config_from(params->derive);
    auto result = oddforge::run_monte_carlo(gt, cfg);
    oddforge::write_mc_results_csv(result, results_csv_path);
    oddforge::write_mc_summary_csv(result, summary_csv_path);
    if (results_out) *results_out = new odf_mc_result{std::move(result)};
  });
}

size_t odf_mc_result_count(const odf_mc_result* r) {
  return r ? r->result.per_count.size() : 0;
}

odf_status odf_mc_result_entry(const odf_mc_result* r, size_t index, size_t* anchor_count,
                               double* r2_precision, double* r2_recall) {
  if (!r || index >= r->result.per_count.size()) return invalid("entry index out of range");
  const auto& entry = r->result.per_count[index];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (anchor_count) *anchor_count = entry.anchor_count;
  if (r2_precision) *r2_precision = entry.r2_precision.value_or(nan);
  if (r2_recall) *r2_recall = entry.r2_recall.value_or(nan);
  return ODF_OK;
}

odf_status odf_mc_result_overall(const odf_mc_result* r, double* r2_precision,
                                 double* r2_recall) {
  if (!r) return invalid("result is required");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (r2_precision) *r2_precision = r->result.r2_precision.value_or(nan);
  if (r2_recall) *r2_recall = r->result.r2_recall.value_or(nan);
  return ODF_OK;
}

void odf_mc_result_free(odf_mc_result* r) { delete r; }

}  // extern "C"
