#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oddforge/geometry.hpp"

namespace oddforge {

enum class DistanceMode { Global, PerDimension };

// Hyperparameters of the sigma estimation rule
//   sigma = (kappa - lambda) * exp(-eta * d*) + lambda
// clamped into [lambda, kappa]. The unbounded rule is recovered by choosing
// a tiny lambda rather than by a separate code path.
struct KernelConfig {
  double kappa = 1.0;
  double eta = 0.0;
  double lambda = 1e-6;
  DistanceMode distance_mode = DistanceMode::Global;
  bool normalize = false;

  void validate() const;
};

// Min/range rescaling fitted on ID samples only. Dimensions with zero range
// keep scale 1 so they pass through unchanged.
struct Normalizer {
  std::vector<double> offsets;
  std::vector<double> scales;

  static Normalizer fit(const std::vector<Point>& id_samples);

  Point apply(const Point& x) const;
  Point invert(const Point& x) const;
  void validate() const;
};

// One anchor point with the diagonal of its Sigma matrix. The center is
// stored in original units; when a model carries a Normalizer, evaluation
// maps both query and center into normalized space.
struct AnchorKernel {
  Point center;
  std::vector<double> sigma_diag;
};

struct Dataset {
  std::size_t dimension = 0;
  std::vector<Point> id_samples;
  std::vector<Point> ood_samples;
  std::vector<std::string> dimension_names;

  void validate() const;
};

// Total order on points: coordinates compared by the IEEE-754 total order
// (so -0.0 sorts before +0.0 and sorting never depends on input order).
bool canonical_point_less(const Point& a, const Point& b);

// Sorts id_samples and ood_samples into canonical order. Duplicates are
// kept: coincident anchors legitimately change the superposition.
Dataset canonicalize(Dataset ds);

struct NeighborGap {
  double global = 0.0;                 // distance to the nearest other point
  std::vector<double> per_dimension;   // |coordinate deltas| to that neighbor
};

// Exact brute-force nearest-neighbor gaps. The nearest neighbor excludes
// the point itself by index (coincident duplicates give distance 0); ties
// break toward the lowest index. A single point gets d* = 0 by convention.
// per_dimension entries are filled only in PerDimension mode.
std::vector<NeighborGap> nn_distances(const std::vector<Point>& points,
                                      DistanceMode mode);

double estimate_sigma(double d_star, const KernelConfig& cfg);

// exp(-1/2 sum_k (x_k - c_k)^2 * (1/sigma_kk)); equals 1 exactly at the
// center. The reciprocal of sigma is taken once per dimension; every
// evaluation path in the library uses this same formula so results agree
// bit for bit.
double local_affinity(const AnchorKernel& k, const Point& x);

// 1 - prod(1 - a_i), accumulated serially in the given order. Empty input
// gives 0.
double superpose(const std::vector<double>& locals);

// Shared evaluation core for the global affinity field and its gradient.
// Centers are pre-normalized once; queries are normalized per call. Terms
// with quadratic form q >= 75 contribute a factor that rounds to exactly
// 1.0 (exp(-37.5) < 2^-54) and are skipped, which leaves results
// bit-identical to the plain serial product.
class AffinityEvaluator {
 public:
  AffinityEvaluator(const std::vector<AnchorKernel>& kernels, const Normalizer* norm);

  std::size_t dimension() const { return dim_; }
  std::size_t kernel_count() const { return count_; }

  double affinity(const Point& x) const;
  Point gradient(const Point& x) const;

  // Local affinity of kernel i at x (same formula as the global terms).
  double local_term(std::size_t i, const Point& x) const;

  // Re-reads kernel i's sigma_diag after an adjustment.
  void update_sigma(std::size_t i, const std::vector<double>& sigma_diag);

 private:
  Point normalized(const Point& x) const;
  double quad_form(std::size_t i, const Point& xn) const;

  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> centers_;    // normalized, count*dim
  std::vector<double> inv_sigma_;  // count*dim
  std::vector<double> offsets_;    // empty when no normalizer
  std::vector<double> scales_;
};

double global_affinity(const std::vector<AnchorKernel>& kernels,
                       const Normalizer* norm, const Point& x);

Point affinity_gradient(const std::vector<AnchorKernel>& kernels,
                        const Normalizer* norm, const Point& x);

}  // namespace oddforge
