#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "oddforge/errors.hpp"
#include "oddforge/kernel.hpp"
#include "oddforge/model.hpp"

namespace oddforge {

struct DerivationConfig {
  KernelConfig kernel;
  double zeta = 0.5;             // membership threshold stored on the model
  double xi = 0.05;              // max affinity allowed at any OOD sample
  double shrink_factor = 0.5;    // multiplicative sigma contraction per step
  int max_shrink_iters = 200;    // per (OOD point, pass)
  int max_passes = 50;
  double shrink_floor = 1e-9;    // hard sigma floor against FP underflow

  void validate() const;
};

struct SigmaAdjustment {
  std::size_t anchor_index = 0;
  std::vector<double> old_sigma;
  std::vector<double> new_sigma;
  std::size_t ood_index = 0;  // index into the canonical OOD list
};

struct DerivationReport {
  std::size_t n_anchors = 0;
  std::size_t n_ood = 0;
  std::vector<SigmaAdjustment> adjustments;
  int passes_used = 0;
  bool constraint_satisfied = false;
};

// Thrown when the OOD constraint cannot be met within the iteration caps;
// carries the partial report for diagnosis.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string message, DerivationReport report)
      : Error(errc::non_convergence, std::move(message)), report_(std::move(report)) {}

  const DerivationReport& report() const noexcept { return report_; }

 private:
  DerivationReport report_;
};

struct OodEnforcement {
  std::vector<AnchorKernel> kernels;
  std::vector<SigmaAdjustment> adjustments;
  int passes_used = 0;
  bool satisfied = false;
};

// Shrinks the most contributing kernels (argmax local affinity, ties to the
// lowest canonical index) until every OOD sample's global affinity is at
// most xi. Anchor centers never move and sigma entries never grow. OOD
// points are processed in canonical order; outer passes repeat until a full
// pass makes no adjustment. Shrinking may go below lambda: lambda bounds
// only the data-driven estimate, not the safety fix.
OodEnforcement enforce_ood(std::vector<AnchorKernel> kernels,
                           const std::vector<Point>& ood,
                           const Normalizer* norm, const DerivationConfig& cfg);

// Full derivation: canonicalize, fit the optional normalizer on ID samples,
// estimate per-anchor sigmas from nearest-neighbor gaps, then enforce the
// OOD constraint. The result is a pure function of the sample multiset and
// the config.
std::pair<KernelOdd, DerivationReport> derive(const Dataset& ds,
                                              const DerivationConfig& cfg);

}  // namespace oddforge
