#include "oddforge/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "oddforge/ingestion.hpp"
#include "oddforge/model.hpp"

namespace oddforge {

void McConfig::validate() const {
  if (dimension == 0) fail(errc::invalid_argument, "dimension must be at least 1");
  if (box_lower.size() != dimension || box_upper.size() != dimension) {
    fail(errc::invalid_argument, "box bounds must have length 'dimension'");
  }
  for (std::size_t k = 0; k < dimension; ++k) {
    if (!std::isfinite(box_lower[k]) || !std::isfinite(box_upper[k]) ||
        box_lower[k] > box_upper[k]) {
      fail(errc::invalid_argument, "box bounds must be finite with lower <= upper");
    }
  }
  if (anchor_counts.empty()) {
    fail(errc::invalid_argument, "at least one anchor count is required");
  }
  for (std::size_t c : anchor_counts) {
    if (c < dimension + 1) {
      fail(errc::invalid_argument,
           "anchor count " + std::to_string(c) + " is below dimension+1 = " +
               std::to_string(dimension + 1) + "; the hull needs a full-dimensional set");
    }
  }
  if (n_validation < 1) fail(errc::invalid_argument, "n_validation must be at least 1");
  derivation.validate();
  if (!threshold_grid.empty()) {
    for (std::size_t i = 0; i < threshold_grid.size(); ++i) {
      if (!std::isfinite(threshold_grid[i]) || threshold_grid[i] < 0.0 ||
          threshold_grid[i] > 1.0) {
        fail(errc::invalid_argument, "threshold grid must lie in [0, 1]");
      }
      if (i > 0 && threshold_grid[i] <= threshold_grid[i - 1]) {
        fail(errc::invalid_argument, "threshold grid must be strictly increasing");
      }
    }
  }
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid(101);
  for (int i = 0; i <= 100; ++i) grid[i] = static_cast<double>(i) / 100.0;
  return grid;
}

std::vector<Point> sample_anchors(const GroundTruthOdd& gt,
                                  const std::vector<double>& box_lower,
                                  const std::vector<double>& box_upper,
                                  std::size_t count, Pcg32& rng) {
  gt.validate();
  const std::size_t n = gt.dimension();
  if (box_lower.size() != n || box_upper.size() != n) {
    fail(errc::dimension_mismatch, "sampling box does not match ground-truth dimension");
  }
  std::vector<Point> accepted;
  accepted.reserve(count);
  std::size_t drawn = 0;
  Point candidate(n);
  while (accepted.size() < count) {
    for (std::size_t k = 0; k < n; ++k) {
      candidate[k] = rng.uniform(box_lower[k], box_upper[k]);
    }
    ++drawn;
    if (ground_truth_contains(gt, candidate)) {
      accepted.push_back(candidate);
    }
    if (drawn >= kMinSamplesBeforeInfeasible &&
        static_cast<double>(accepted.size()) < 1e-4 * static_cast<double>(drawn)) {
      fail(errc::infeasible_region,
           "rejection acceptance rate below 1e-4; the feasible region is "
           "effectively empty within the sampling box");
    }
  }
  return accepted;
}

std::vector<Point> sample_validation(const McConfig& cfg, Pcg32& rng) {
  cfg.validate();
  const std::size_t n = cfg.dimension;
  std::vector<double> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double center = 0.5 * (cfg.box_lower[k] + cfg.box_upper[k]);
    const double half = 0.5 * (cfg.box_upper[k] - cfg.box_lower[k]);
    lo[k] = center - 2.0 * half;
    hi[k] = center + 2.0 * half;
  }
  std::vector<Point> samples(cfg.n_validation, Point(n));
  for (auto& p : samples) {
    for (std::size_t k = 0; k < n; ++k) p[k] = rng.uniform(lo[k], hi[k]);
  }
  return samples;
}

ConfusionCounts confusion_at(const std::vector<double>& affinities,
                             const std::vector<std::uint8_t>& truth, double zeta) {
  if (affinities.size() != truth.size()) {
    fail(errc::invalid_argument, "affinities and truth must have equal length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < affinities.size(); ++i) {
    const bool predicted = affinities[i] >= zeta;
    if (predicted) {
      truth[i] ? ++c.tp : ++c.fp;
    } else {
      truth[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

PrCurve pr_sweep(const std::vector<double>& affinities,
                 const std::vector<std::uint8_t>& truth,
                 const std::vector<double>& grid) {
  if (truth.empty()) fail(errc::invalid_argument, "pr_sweep needs a non-empty truth");
  if (affinities.size() != truth.size()) {
    fail(errc::invalid_argument, "affinities and truth must have equal length");
  }
  PrCurve curve;
  curve.thresholds = grid;
  curve.precision.reserve(grid.size());
  curve.recall.reserve(grid.size());
  std::size_t positives = 0;
  for (auto t : truth) positives += t ? 1 : 0;
  curve.degenerate_truth = positives == 0 || positives == truth.size();
  for (double zeta : grid) {
    const ConfusionCounts c = confusion_at(affinities, truth, zeta);
    if (c.tp + c.fp == 0) {
      curve.precision.emplace_back(std::nullopt);
    } else {
      curve.precision.emplace_back(static_cast<double>(c.tp) /
                                   static_cast<double>(c.tp + c.fp));
    }
    curve.recall.push_back(positives == 0
                               ? 0.0
                               : static_cast<double>(c.tp) /
                                     static_cast<double>(positives));
  }
  return curve;
}

double r_squared(const std::vector<std::optional<double>>& reference,
                 const std::vector<std::optional<double>>& other) {
  if (reference.size() != other.size()) {
    fail(errc::invalid_argument, "curves must have equal length");
  }
  std::vector<double> y;
  std::vector<double> yhat;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] && other[i]) {
      y.push_back(*reference[i]);
      yhat.push_back(*other[i]);
    }
  }
  if (y.size() < 2) {
    fail(errc::invalid_argument, "R^2 needs at least two points defined on both curves");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) {
    fail(errc::invalid_argument, "R^2 is undefined against a constant reference curve");
  }
  return 1.0 - ss_res / ss_tot;
}

double r_squared(const std::vector<double>& reference, const std::vector<double>& other) {
  std::vector<std::optional<double>> ref(reference.begin(), reference.end());
  std::vector<std::optional<double>> oth(other.begin(), other.end());
  return r_squared(ref, oth);
}

namespace {

CurveBand average_optional(const std::vector<const std::vector<std::optional<double>>*>& curves,
                           std::size_t grid_size) {
  CurveBand band;
  band.mean.resize(grid_size);
  band.std_dev.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto* c : curves) {
      if ((*c)[g]) {
        sum += *(*c)[g];
        ++defined;
      }
    }
    if (defined == 0) continue;
    const double mean = sum / static_cast<double>(defined);
    double var = 0.0;
    for (const auto* c : curves) {
      if ((*c)[g]) {
        var += (*(*c)[g] - mean) * (*(*c)[g] - mean);
      }
    }
    band.mean[g] = mean;
    band.std_dev[g] = std::sqrt(var / static_cast<double>(defined));
  }
  return band;
}

std::vector<std::optional<double>> to_optional(const std::vector<double>& v) {
  return std::vector<std::optional<double>>(v.begin(), v.end());
}

std::optional<double> try_r_squared(const std::vector<std::optional<double>>& reference,
                                    const std::vector<std::optional<double>>& other) {
  try {
    return r_squared(reference, other);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

McResult run_monte_carlo(const GroundTruthOdd& gt, const McConfig& cfg_in) {
  McConfig cfg = cfg_in;
  if (cfg.threshold_grid.empty()) cfg.threshold_grid = default_threshold_grid();
  cfg.validate();
  gt.validate();
  if (gt.dimension() != cfg.dimension) {
    fail(errc::dimension_mismatch, "ground truth does not match configured dimension");
  }

  McResult result;
  result.thresholds = cfg.threshold_grid;

  // One shared validation set; its RNG stream is independent of the anchor
  // streams so anchor-count schedules never perturb it.
  Pcg32 validation_rng(cfg.seed, 0);
  const std::vector<Point> validation = sample_validation(cfg, validation_rng);
  std::vector<std::uint8_t> truth_gt(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    truth_gt[i] = ground_truth_contains(gt, validation[i]) ? 1 : 0;
  }

  std::vector<std::vector<Point>> anchor_sets;
  anchor_sets.reserve(cfg.anchor_counts.size());
  std::vector<Point> all_anchors;
  for (std::size_t count : cfg.anchor_counts) {
    Pcg32 anchor_rng(cfg.seed, static_cast<std::uint64_t>(count) + 1);
    anchor_sets.push_back(
        sample_anchors(gt, cfg.box_lower, cfg.box_upper, count, anchor_rng));
    all_anchors.insert(all_anchors.end(), anchor_sets.back().begin(),
                       anchor_sets.back().end());
  }

  // The hull baseline stands in for the unavailable ground truth, so it is
  // built from all anchor points of the experiment; each configuration is
  // then scored against the same proxy.
  const ConvexHull hull = build_convex_hull(all_anchors);
  std::vector<std::uint8_t> truth_hull(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    truth_hull[i] = hull_contains(hull, validation[i]) ? 1 : 0;
  }

  for (std::size_t c = 0; c < cfg.anchor_counts.size(); ++c) {
    const std::size_t count = cfg.anchor_counts[c];
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Point>& anchors = anchor_sets[c];

    Dataset ds;
    ds.dimension = cfg.dimension;
    ds.id_samples = anchors;
    auto [model, report] = derive(ds, cfg.derivation);
    (void)report;

    const std::vector<QueryResult> scored = score_batch(model, validation);
    std::vector<double> affinities(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) affinities[i] = scored[i].affinity;

    McPerCount entry;
    entry.anchor_count = count;
    entry.vs_ground_truth = pr_sweep(affinities, truth_gt, cfg.threshold_grid);
    entry.vs_ground_truth.reference = PrReference::GroundTruth;
    entry.vs_hull = pr_sweep(affinities, truth_hull, cfg.threshold_grid);
    entry.vs_hull.reference = PrReference::Hull;
    entry.r2_precision =
        try_r_squared(entry.vs_ground_truth.precision, entry.vs_hull.precision);
    entry.r2_recall = try_r_squared(to_optional(entry.vs_ground_truth.recall),
                                    to_optional(entry.vs_hull.recall));
    entry.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.per_count.push_back(std::move(entry));
  }

  const std::size_t grid_size = cfg.threshold_grid.size();
  std::vector<const std::vector<std::optional<double>>*> p_odd, p_hull;
  std::vector<std::vector<std::optional<double>>> r_odd_store, r_hull_store;
  for (const auto& entry : result.per_count) {
    p_odd.push_back(&entry.vs_ground_truth.precision);
    p_hull.push_back(&entry.vs_hull.precision);
    r_odd_store.push_back(to_optional(entry.vs_ground_truth.recall));
    r_hull_store.push_back(to_optional(entry.vs_hull.recall));
  }
  std::vector<const std::vector<std::optional<double>>*> r_odd, r_hull;
  for (const auto& v : r_odd_store) r_odd.push_back(&v);
  for (const auto& v : r_hull_store) r_hull.push_back(&v);

  result.precision_odd = average_optional(p_odd, grid_size);
  result.recall_odd = average_optional(r_odd, grid_size);
  result.precision_hull = average_optional(p_hull, grid_size);
  result.recall_hull = average_optional(r_hull, grid_size);
  result.r2_precision = try_r_squared(result.precision_odd.mean, result.precision_hull.mean);
  result.r2_recall = try_r_squared(result.recall_odd.mean, result.recall_hull.mean);
  return result;
}

namespace {

Cell optional_cell(const std::optional<double>& v) {
  if (v) return Cell(*v);
  return Cell(std::string());
}

}  // namespace

void write_mc_results_csv(const McResult& result, const std::string& path) {
  const std::vector<std::string> columns = {
      "anchor_count",     "zeta",           "precision_odd",      "recall_odd",
      "precision_hull",   "recall_hull",    "precision_odd_std",  "recall_odd_std",
      "precision_hull_std", "recall_hull_std"};
  std::vector<std::vector<Cell>> rows;
  for (const auto& entry : result.per_count) {
    for (std::size_t g = 0; g < result.thresholds.size(); ++g) {
      rows.push_back({Cell(static_cast<long long>(entry.anchor_count)),
                      Cell(result.thresholds[g]),
                      optional_cell(entry.vs_ground_truth.precision[g]),
                      Cell(entry.vs_ground_truth.recall[g]),
                      optional_cell(entry.vs_hull.precision[g]),
                      Cell(entry.vs_hull.recall[g]), Cell(std::string()),
                      Cell(std::string()), Cell(std::string()), Cell(std::string())});
    }
  }
  for (std::size_t g = 0; g < result.thresholds.size(); ++g) {
    rows.push_back({Cell(std::string("all")), Cell(result.thresholds[g]),
                    optional_cell(result.precision_odd.mean[g]),
                    optional_cell(result.recall_odd.mean[g]),
                    optional_cell(result.precision_hull.mean[g]),
                    optional_cell(result.recall_hull.mean[g]),
                    optional_cell(result.precision_odd.std_dev[g]),
                    optional_cell(result.recall_odd.std_dev[g]),
                    optional_cell(result.precision_hull.std_dev[g]),
                    optional_cell(result.recall_hull.std_dev[g])});
  }
  write_table(path, columns, rows);
}

void write_mc_summary_csv(const McResult& result, const std::string& path) {
  const std::vector<std::string> columns = {"anchor_count", "r2_precision", "r2_recall"};
  std::vector<std::vector<Cell>> rows;
  for (const auto& entry : result.per_count) {
    rows.push_back({Cell(static_cast<long long>(entry.anchor_count)),
                    optional_cell(entry.r2_precision), optional_cell(entry.r2_recall)});
  }
  rows.push_back({Cell(std::string("all")), optional_cell(result.r2_precision),
                  optional_cell(result.r2_recall)});
  write_table(path, columns, rows);
}

}  // namespace oddforge
