#include "oddforge/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "oddforge/errors.hpp"

namespace oddforge {

namespace {

// Quadratic forms at least this large give local terms below 2^-54, whose
// (1 - a) factor rounds to exactly 1.0.
constexpr double kNegligibleQuad = 75.0;

void require_dimension(std::size_t expected, const Point& x, const char* what) {
  if (x.size() != expected) {
    fail(errc::dimension_mismatch,
         std::string(what) + ": expected dimension " + std::to_string(expected) +
             ", got " + std::to_string(x.size()));
  }
}

// Monotone integer key realizing the IEEE-754 total order on doubles.
std::uint64_t total_order_key(double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  return (bits & 0x8000000000000000ULL) ? ~bits : (bits | 0x8000000000000000ULL);
}

}  // namespace

void KernelConfig::validate() const {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    fail(errc::invalid_argument, "kappa must be a positive finite number");
  }
  if (!std::isfinite(eta) || eta < 0.0) {
    fail(errc::invalid_argument, "eta must be a non-negative finite number");
  }
  if (!std::isfinite(lambda) || lambda <= 0.0 || lambda > kappa) {
    fail(errc::invalid_argument, "lambda must satisfy 0 < lambda <= kappa");
  }
}

Normalizer Normalizer::fit(const std::vector<Point>& id_samples) {
  if (id_samples.empty()) {
    fail(errc::invalid_argument, "normalizer needs at least one ID sample");
  }
  const std::size_t n = id_samples.front().size();
  Normalizer norm;
  norm.offsets.assign(n, 0.0);
  norm.scales.assign(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = id_samples.front()[k];
    double hi = lo;
    for (const auto& p : id_samples) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    norm.offsets[k] = lo;
    const double range = hi - lo;
    norm.scales[k] = range > 0.0 ? range : 1.0;
  }
  return norm;
}

Point Normalizer::apply(const Point& x) const {
  require_dimension(offsets.size(), x, "normalizer apply");
  Point out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = (x[k] - offsets[k]) / scales[k];
  }
  return out;
}

Point Normalizer::invert(const Point& x) const {
  require_dimension(offsets.size(), x, "normalizer invert");
  Point out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = x[k] * scales[k] + offsets[k];
  }
  return out;
}

void Normalizer::validate() const {
  if (offsets.empty() || offsets.size() != scales.size()) {
    fail(errc::invalid_argument, "normalizer offsets/scales must be non-empty and equal-length");
  }
  for (double s : scales) {
    if (!std::isfinite(s) || s <= 0.0) {
      fail(errc::invalid_argument, "normalizer scales must be strictly positive");
    }
  }
  for (double o : offsets) {
    if (!std::isfinite(o)) {
      fail(errc::invalid_argument, "normalizer offsets must be finite");
    }
  }
}

void Dataset::validate() const {
  if (dimension == 0) {
    fail(errc::invalid_argument, "dataset dimension must be at least 1");
  }
  auto check = [&](const std::vector<Point>& pts, const char* which) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].size() != dimension) {
        fail(errc::dimension_mismatch,
             std::string(which) + " sample " + std::to_string(i) +
                 " has wrong dimension");
      }
      for (double v : pts[i]) {
        if (!std::isfinite(v)) {
          fail(errc::invalid_argument,
               std::string(which) + " sample " + std::to_string(i) +
                   " contains a non-finite value");
        }
      }
    }
  };
  check(id_samples, "ID");
  check(ood_samples, "OOD");
  if (!dimension_names.empty() && dimension_names.size() != dimension) {
    fail(errc::invalid_argument, "dimension_names length does not match dimension");
  }
}

bool canonical_point_less(const Point& a, const Point& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto ka = total_order_key(a[k]);
    const auto kb = total_order_key(b[k]);
    if (ka != kb) return ka < kb;
  }
  return a.size() < b.size();
}

Dataset canonicalize(Dataset ds) {
  ds.validate();
  std::sort(ds.id_samples.begin(), ds.id_samples.end(), canonical_point_less);
  std::sort(ds.ood_samples.begin(), ds.ood_samples.end(), canonical_point_less);
  return ds;
}

std::vector<NeighborGap> nn_distances(const std::vector<Point>& points,
                                      DistanceMode mode) {
  if (points.empty()) {
    fail(errc::invalid_argument, "nn_distances needs at least one point");
  }
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> nearest(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = points[i].data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* pj = points[j].data();
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = pi[k] - pj[k];
        d2 += d * d;
      }
      if (d2 < best[i]) {
        best[i] = d2;
        nearest[i] = j;
      }
      if (d2 < best[j]) {
        best[j] = d2;
        nearest[j] = i;
      }
    }
  }
  std::vector<NeighborGap> gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (n == 1) {
      gaps[i].global = 0.0;
      if (mode == DistanceMode::PerDimension) {
        gaps[i].per_dimension.assign(dim, 0.0);
      }
      continue;
    }
    gaps[i].global = std::sqrt(best[i]);
    if (mode == DistanceMode::PerDimension) {
      gaps[i].per_dimension.resize(dim);
      const Point& nb = points[nearest[i]];
      for (std::size_t k = 0; k < dim; ++k) {
        gaps[i].per_dimension[k] = std::fabs(points[i][k] - nb[k]);
      }
    }
  }
  return gaps;
}

double estimate_sigma(double d_star, const KernelConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(d_star) || d_star < 0.0) {
    fail(errc::invalid_argument, "nearest-neighbor distance must be non-negative");
  }
  double sigma = (cfg.kappa - cfg.lambda) * std::exp(-cfg.eta * d_star) + cfg.lambda;
  return std::clamp(sigma, cfg.lambda, cfg.kappa);
}

double local_affinity(const AnchorKernel& k, const Point& x) {
  require_dimension(k.center.size(), x, "local_affinity");
  if (k.sigma_diag.size() != k.center.size()) {
    fail(errc::invalid_argument, "sigma_diag length does not match center");
  }
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(k.sigma_diag[i] > 0.0)) {
      fail(errc::invalid_argument, "sigma_diag entries must be positive");
    }
    const double d = x[i] - k.center[i];
    q += d * d * (1.0 / k.sigma_diag[i]);
  }
  return std::exp(-0.5 * q);
}

double superpose(const std::vector<double>& locals) {
  double product = 1.0;
  for (double a : locals) {
    if (!(a >= 0.0) || !(a <= 1.0)) {
      fail(errc::invalid_argument, "local affinities must lie in [0, 1]");
    }
    product *= (1.0 - a);
  }
  return 1.0 - product;
}

AffinityEvaluator::AffinityEvaluator(const std::vector<AnchorKernel>& kernels,
                                     const Normalizer* norm) {
  if (kernels.empty()) {
    fail(errc::invalid_argument, "affinity field needs at least one kernel");
  }
  dim_ = kernels.front().center.size();
  count_ = kernels.size();
  if (norm) {
    norm->validate();
    if (norm->offsets.size() != dim_) {
      fail(errc::dimension_mismatch, "normalizer dimension does not match kernels");
    }
    offsets_ = norm->offsets;
    scales_ = norm->scales;
  }
  centers_.resize(count_ * dim_);
  inv_sigma_.resize(count_ * dim_);
  for (std::size_t i = 0; i < count_; ++i) {
    const AnchorKernel& k = kernels[i];
    if (k.center.size() != dim_ || k.sigma_diag.size() != dim_) {
      fail(errc::dimension_mismatch, "kernels have mixed dimensions");
    }
    for (std::size_t c = 0; c < dim_; ++c) {
      if (!(k.sigma_diag[c] > 0.0) || !std::isfinite(k.sigma_diag[c])) {
        fail(errc::invalid_argument, "sigma_diag entries must be positive");
      }
      double center = k.center[c];
      if (norm) center = (center - offsets_[c]) / scales_[c];
      centers_[i * dim_ + c] = center;
      inv_sigma_[i * dim_ + c] = 1.0 / k.sigma_diag[c];
    }
  }
}

Point AffinityEvaluator::normalized(const Point& x) const {
  require_dimension(dim_, x, "affinity evaluation");
  Point xn(x);
  if (!offsets_.empty()) {
    for (std::size_t c = 0; c < dim_; ++c) {
      xn[c] = (x[c] - offsets_[c]) / scales_[c];
    }
  }
  return xn;
}

double AffinityEvaluator::quad_form(std::size_t i, const Point& xn) const {
  const double* center = centers_.data() + i * dim_;
  const double* inv = inv_sigma_.data() + i * dim_;
  double q = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    const double d = xn[c] - center[c];
    q += d * d * inv[c];
    if (q >= kNegligibleQuad) return q;
  }
  return q;
}

double AffinityEvaluator::affinity(const Point& x) const {
  const Point xn = normalized(x);
  double product = 1.0;
  for (std::size_t i = 0; i < count_; ++i) {
    const double q = quad_form(i, xn);
    if (q >= kNegligibleQuad) continue;  // factor rounds to exactly 1.0
    product *= (1.0 - std::exp(-0.5 * q));
  }
  return 1.0 - product;
}

double AffinityEvaluator::local_term(std::size_t i, const Point& xn_raw) const {
  const Point xn = normalized(xn_raw);
  return std::exp(-0.5 * quad_form(i, xn));
}

Point AffinityEvaluator::gradient(const Point& x) const {
  const Point xn = normalized(x);
  // alpha = 1 - prod(1 - a_i);  d alpha/dx_j = sum_i prod_{l != i}(1 - a_l)
  //   * a_i * (c_ij - x_j) * inv_sigma_ij / scale_j
  std::vector<double> terms(count_);
  for (std::size_t i = 0; i < count_; ++i) {
    const double q = quad_form(i, xn);
    terms[i] = q >= kNegligibleQuad ? 0.0 : std::exp(-0.5 * q);
  }
  std::vector<double> prefix(count_ + 1, 1.0);
  for (std::size_t i = 0; i < count_; ++i) {
    prefix[i + 1] = prefix[i] * (1.0 - terms[i]);
  }
  std::vector<double> suffix(count_ + 1, 1.0);
  for (std::size_t i = count_; i-- > 0;) {
    suffix[i] = suffix[i + 1] * (1.0 - terms[i]);
  }
  Point grad(dim_, 0.0);
  for (std::size_t i = 0; i < count_; ++i) {
    if (terms[i] == 0.0) continue;
    const double weight = prefix[i] * suffix[i + 1] * terms[i];
    const double* center = centers_.data() + i * dim_;
    const double* inv = inv_sigma_.data() + i * dim_;
    for (std::size_t c = 0; c < dim_; ++c) {
      grad[c] += weight * (center[c] - xn[c]) * inv[c];
    }
  }
  if (!scales_.empty()) {
    for (std::size_t c = 0; c < dim_; ++c) grad[c] /= scales_[c];
  }
  return grad;
}

void AffinityEvaluator::update_sigma(std::size_t i, const std::vector<double>& sigma_diag) {
  if (i >= count_ || sigma_diag.size() != dim_) {
    fail(errc::invalid_argument, "bad sigma update");
  }
  for (std::size_t c = 0; c < dim_; ++c) {
    if (!(sigma_diag[c] > 0.0)) {
      fail(errc::invalid_argument, "sigma_diag entries must be positive");
    }
    inv_sigma_[i * dim_ + c] = 1.0 / sigma_diag[c];
  }
}

double global_affinity(const std::vector<AnchorKernel>& kernels,
                       const Normalizer* norm, const Point& x) {
  if (kernels.empty()) return 0.0;
  AffinityEvaluator eval(kernels, norm);
  return eval.affinity(x);
}

Point affinity_gradient(const std::vector<AnchorKernel>& kernels,
                        const Normalizer* norm, const Point& x) {
  AffinityEvaluator eval(kernels, norm);
  return eval.gradient(x);
}

}  // namespace oddforge
