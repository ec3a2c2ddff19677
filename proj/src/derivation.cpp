#include "oddforge/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oddforge {

void DerivationConfig::validate() const {
  kernel.validate();
  if (!std::isfinite(zeta) || zeta < 0.0 || zeta > 1.0) {
    fail(errc::invalid_argument, "zeta must lie in [0, 1]");
  }
  if (!std::isfinite(xi) || xi < 0.0 || xi >= 1.0) {
    fail(errc::invalid_argument, "xi must lie in [0, 1)");
  }
  if (xi >= zeta) {
    fail(errc::invalid_argument,
         "xi must be strictly below zeta: an OOD sample must never qualify as inside");
  }
  if (!std::isfinite(shrink_factor) || shrink_factor <= 0.0 || shrink_factor >= 1.0) {
    fail(errc::invalid_argument, "shrink_factor must lie in (0, 1)");
  }
  if (max_shrink_iters < 1 || max_passes < 1) {
    fail(errc::invalid_argument, "iteration caps must be at least 1");
  }
  if (!std::isfinite(shrink_floor) || shrink_floor <= 0.0) {
    fail(errc::invalid_argument, "shrink_floor must be positive");
  }
}

OodEnforcement enforce_ood(std::vector<AnchorKernel> kernels,
                           const std::vector<Point>& ood,
                           const Normalizer* norm, const DerivationConfig& cfg) {
  cfg.validate();
  OodEnforcement out;
  out.kernels = std::move(kernels);
  if (ood.empty()) {
    out.satisfied = true;
    return out;
  }
  if (out.kernels.empty()) {
    fail(errc::invalid_argument, "OOD enforcement needs at least one kernel");
  }

  std::vector<std::size_t> order(ood.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_point_less(ood[a], ood[b]);
  });

  AffinityEvaluator eval(out.kernels, norm);
  const std::size_t dim = eval.dimension();

  for (int pass = 1; pass <= cfg.max_passes; ++pass) {
    out.passes_used = pass;
    bool changed = false;
    for (std::size_t idx : order) {
      const Point& o = ood[idx];
      int iters = 0;
      while (eval.affinity(o) > cfg.xi) {
        if (iters >= cfg.max_shrink_iters) break;
        // most contributing kernel: argmax local affinity, lowest index wins
        std::size_t target = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < out.kernels.size(); ++i) {
          const double a = eval.local_term(i, o);
          if (a > best) {
            best = a;
            target = i;
          }
        }
        SigmaAdjustment adj;
        adj.anchor_index = target;
        adj.ood_index = idx;
        adj.old_sigma = out.kernels[target].sigma_diag;
        adj.new_sigma = adj.old_sigma;
        bool progressed = false;
        for (double& s : adj.new_sigma) {
          const double next = std::max(s * cfg.shrink_factor, cfg.shrink_floor);
          if (next < s) progressed = true;
          s = next;
        }
        if (!progressed) break;  // already at the floor; no further fix exists
        out.kernels[target].sigma_diag = adj.new_sigma;
        eval.update_sigma(target, adj.new_sigma);
        out.adjustments.push_back(std::move(adj));
        changed = true;
        ++iters;
      }
    }
    if (!changed) break;
  }

  out.satisfied = true;
  for (const Point& o : ood) {
    if (o.size() != dim) {
      fail(errc::dimension_mismatch, "OOD sample dimension does not match kernels");
    }
    if (eval.affinity(o) > cfg.xi) {
      out.satisfied = false;
      break;
    }
  }
  return out;
}

std::pair<KernelOdd, DerivationReport> derive(const Dataset& ds,
                                              const DerivationConfig& cfg) {
  cfg.validate();
  Dataset canonical = canonicalize(ds);
  if (canonical.id_samples.empty()) {
    fail(errc::invalid_argument, "derivation needs at least one ID sample");
  }

  std::optional<Normalizer> normalizer;
  if (cfg.kernel.normalize) {
    normalizer = Normalizer::fit(canonical.id_samples);
  }

  // Nearest-neighbor gaps are measured in evaluation space: normalized
  // coordinates when normalization is on, raw coordinates otherwise.
  std::vector<Point> work_id = canonical.id_samples;
  std::vector<Point> work_ood = canonical.ood_samples;
  if (normalizer) {
    for (auto& p : work_id) p = normalizer->apply(p);
    for (auto& p : work_ood) p = normalizer->apply(p);
  }

  // An OOD sample coinciding with an anchor keeps affinity 1 for every
  // sigma; no adjustment can satisfy the constraint.
  for (std::size_t o = 0; o < work_ood.size(); ++o) {
    for (std::size_t i = 0; i < work_id.size(); ++i) {
      if (work_ood[o] == work_id[i]) {
        fail(errc::unsatisfiable_constraint,
             "OOD sample " + std::to_string(o) +
                 " coincides with an anchor point; alpha there is 1 for any sigma");
      }
    }
  }

  const auto gaps = nn_distances(work_id, cfg.kernel.distance_mode);

  std::vector<AnchorKernel> kernels(canonical.id_samples.size());
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    kernels[i].center = canonical.id_samples[i];
    kernels[i].sigma_diag.resize(canonical.dimension);
    if (cfg.kernel.distance_mode == DistanceMode::Global) {
      const double sigma = estimate_sigma(gaps[i].global, cfg.kernel);
      std::fill(kernels[i].sigma_diag.begin(), kernels[i].sigma_diag.end(), sigma);
    } else {
      for (std::size_t k = 0; k < canonical.dimension; ++k) {
        kernels[i].sigma_diag[k] = estimate_sigma(gaps[i].per_dimension[k], cfg.kernel);
      }
    }
  }

  const Normalizer* norm_ptr = normalizer ? &*normalizer : nullptr;
  OodEnforcement enforced =
      enforce_ood(std::move(kernels), canonical.ood_samples, norm_ptr, cfg);

  DerivationReport report;
  report.n_anchors = canonical.id_samples.size();
  report.n_ood = canonical.ood_samples.size();
  report.adjustments = enforced.adjustments;
  report.passes_used = enforced.passes_used;
  report.constraint_satisfied = enforced.satisfied;

  if (!enforced.satisfied) {
    throw NonConvergenceError(
        "OOD constraint not satisfied within max_passes x max_shrink_iters", report);
  }

  KernelOdd model;
  model.kernels = std::move(enforced.kernels);
  model.zeta = cfg.zeta;
  model.xi = cfg.xi;
  model.normalizer = normalizer;
  model.config = cfg.kernel;
  model.dimension_names = canonical.dimension_names;
  model.dataset_digest = dataset_digest(canonical, cfg);
  return {std::move(model), std::move(report)};
}

}  // namespace oddforge
