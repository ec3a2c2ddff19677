#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oddforge/derivation.hpp"
#include "oddforge/geometry.hpp"
#include "oddforge/rng.hpp"

namespace oddforge {

inline constexpr std::size_t kMinSamplesBeforeInfeasible = 20000;

// Monte-Carlo experiment configuration. Anchors are rejection-sampled from
// the taxonomy box against the ground truth; validation points are sampled
// uniformly from the box scaled x2 about its center.
struct McConfig {
  std::size_t dimension = 0;
  std::vector<double> box_lower;
  std::vector<double> box_upper;
  std::vector<std::size_t> anchor_counts;
  std::size_t n_validation = 0;
  std::uint64_t seed = 0;
  std::vector<double> threshold_grid;  // defaults to 0.00..1.00 step 0.01
  DerivationConfig derivation;

  void validate() const;
};

std::vector<double> default_threshold_grid();

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

enum class PrReference { GroundTruth, Hull, Labeled };

struct PrCurve {
  std::vector<double> thresholds;
  std::vector<std::optional<double>> precision;  // absent exactly where tp+fp = 0
  std::vector<double> recall;
  PrReference reference = PrReference::Labeled;
  bool degenerate_truth = false;  // truth holds a single class only
};

// Uniform samples over {x in box : ground truth contains x} via rejection.
// Fails with infeasible_region when the acceptance rate over the probe
// batch falls below 1e-4.
std::vector<Point> sample_anchors(const GroundTruthOdd& gt,
                                  const std::vector<double>& box_lower,
                                  const std::vector<double>& box_upper,
                                  std::size_t count, Pcg32& rng);

std::vector<Point> sample_validation(const McConfig& cfg, Pcg32& rng);

ConfusionCounts confusion_at(const std::vector<double>& affinities,
                             const std::vector<std::uint8_t>& truth, double zeta);

PrCurve pr_sweep(const std::vector<double>& affinities,
                 const std::vector<std::uint8_t>& truth,
                 const std::vector<double>& grid);

// 1 - SS_res/SS_tot of `other` against `reference`. Grid points where
// either value is absent are dropped pairwise; a constant reference has no
// defined R^2.
double r_squared(const std::vector<std::optional<double>>& reference,
                 const std::vector<std::optional<double>>& other);
double r_squared(const std::vector<double>& reference,
                 const std::vector<double>& other);

struct McPerCount {
  std::size_t anchor_count = 0;
  PrCurve vs_ground_truth;
  PrCurve vs_hull;
  std::optional<double> r2_precision;
  std::optional<double> r2_recall;
  double runtime_seconds = 0.0;
};

struct CurveBand {
  std::vector<std::optional<double>> mean;
  std::vector<std::optional<double>> std_dev;
};

struct McResult {
  std::vector<double> thresholds;
  std::vector<McPerCount> per_count;
  CurveBand precision_odd;  // averaged across anchor counts
  CurveBand recall_odd;
  CurveBand precision_hull;
  CurveBand recall_hull;
  std::optional<double> r2_precision;  // between the averaged curves
  std::optional<double> r2_recall;
};

// Full protocol: per anchor count, rejection-sample anchors, derive the
// model, build the anchor hull, score the shared validation set, sweep the
// threshold grid against both references and compare the curves.
McResult run_monte_carlo(const GroundTruthOdd& gt, const McConfig& cfg);

void write_mc_results_csv(const McResult& result, const std::string& path);
void write_mc_summary_csv(const McResult& result, const std::string& path);

}  // namespace oddforge
