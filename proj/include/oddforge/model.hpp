#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "oddforge/kernel.hpp"

namespace oddforge {

struct DerivationConfig;

// The persisted, queryable ODD artifact: the affinity field (anchors in
// canonical order plus optional normalizer), the membership threshold zeta
// and the OOD ceiling xi, and provenance metadata.
struct KernelOdd {
  std::vector<AnchorKernel> kernels;
  double zeta = 0.5;
  double xi = 0.05;
  std::optional<Normalizer> normalizer;
  KernelConfig config;
  std::vector<std::string> dimension_names;
  std::string dataset_digest;

  std::size_t dimension() const {
    return kernels.empty() ? 0 : kernels.front().center.size();
  }

  void validate() const;
};

struct QueryResult {
  double affinity = 0.0;
  bool inside = false;
};

QueryResult is_inside(const KernelOdd& m, const Point& x);

// Index of the highest band boundary <= affinity; 0 means below all bands.
// Bands must be strictly increasing within [0, 1].
int affinity_band(const KernelOdd& m, const Point& x, const std::vector<double>& bands);

// Elementwise is_inside; may fan out across worker threads (capped by the
// ODDFORGE_THREADS environment variable) without affecting results.
std::vector<QueryResult> score_batch(const KernelOdd& m, const std::vector<Point>& xs);

// FNV-1a 64 over the canonical sample multiset and the derivation config,
// so permuted re-derivations produce identical digests.
std::string dataset_digest(const Dataset& canonical, const DerivationConfig& cfg);

// JSON model file, format_version "1". Keys are emitted in a fixed order
// and reals in shortest round-trip decimal form, so identical models
// produce identical bytes and loading restores every value exactly.
std::string model_to_json_text(const KernelOdd& m);
KernelOdd model_from_json_text(const std::string& text);

void save_model(const KernelOdd& m, const std::string& path);
KernelOdd load_model(const std::string& path);

}  // namespace oddforge
