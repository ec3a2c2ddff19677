#include "oddforge/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oddforge/derivation.hpp"
#include "oddforge/errors.hpp"
#include "parallel.hpp"

namespace oddforge {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kFormatVersion = "1";

std::string mode_name(DistanceMode mode) {
  return mode == DistanceMode::Global ? "global" : "per_dimension";
}

DistanceMode mode_from_name(const std::string& name) {
  if (name == "global") return DistanceMode::Global;
  if (name == "per_dimension") return DistanceMode::PerDimension;
  fail(errc::parse, "unknown distance_mode: " + name);
}

class Fnv1a64 {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add_u64(std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    add_bytes(bytes, 8);
  }
  void add_real(double v) { add_u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

ordered_json real_array(const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

std::vector<double> finite_reals(const ordered_json& j, const std::string& where,
                                 std::size_t expected) {
  if (!j.is_array() || j.size() != expected) {
    fail(errc::parse, "model field '" + where + "' must be an array of length " +
                          std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& e : j) {
    if (!e.is_number()) fail(errc::parse, "model field '" + where + "' must hold numbers");
    const double v = e.get<double>();
    if (!std::isfinite(v)) fail(errc::parse, "model field '" + where + "' must be finite");
    out.push_back(v);
  }
  return out;
}

double finite_real(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) fail(errc::parse, "model field '" + where + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(errc::parse, "model field '" + where + "' must be finite");
  return v;
}

}  // namespace

void KernelOdd::validate() const {
  if (kernels.empty()) {
    fail(errc::invalid_argument, "model needs at least one anchor kernel");
  }
  config.validate();
  const std::size_t n = kernels.front().center.size();
  if (n == 0) fail(errc::invalid_argument, "model dimension must be at least 1");
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const AnchorKernel& k = kernels[i];
    if (k.center.size() != n || k.sigma_diag.size() != n) {
      fail(errc::invalid_argument, "anchor " + std::to_string(i) + " has wrong dimension");
    }
    for (double v : k.center) {
      if (!std::isfinite(v)) {
        fail(errc::invalid_argument, "anchor centers must be finite");
      }
    }
    for (double s : k.sigma_diag) {
      if (!std::isfinite(s) || s <= 0.0 || s > config.kappa) {
        fail(errc::invalid_argument,
             "anchor " + std::to_string(i) + " sigma entries must lie in (0, kappa]");
      }
    }
    if (i > 0 && canonical_point_less(k.center, kernels[i - 1].center)) {
      fail(errc::invalid_argument, "model anchors are not in canonical order");
    }
  }
  if (!std::isfinite(zeta) || zeta < 0.0 || zeta > 1.0) {
    fail(errc::invalid_argument, "zeta must lie in [0, 1]");
  }
  if (!std::isfinite(xi) || xi < 0.0 || xi >= 1.0 || xi >= zeta) {
    fail(errc::invalid_argument, "xi must lie in [0, 1) and below zeta");
  }
  if (normalizer) {
    normalizer->validate();
    if (normalizer->offsets.size() != n) {
      fail(errc::invalid_argument, "normalizer dimension does not match anchors");
    }
  }
  if (!dimension_names.empty() && dimension_names.size() != n) {
    fail(errc::invalid_argument, "dimension_names length does not match dimension");
  }
}

QueryResult is_inside(const KernelOdd& m, const Point& x) {
  AffinityEvaluator eval(m.kernels, m.normalizer ? &*m.normalizer : nullptr);
  QueryResult res;
  res.affinity = eval.affinity(x);
  res.inside = res.affinity >= m.zeta;
  return res;
}

int affinity_band(const KernelOdd& m, const Point& x, const std::vector<double>& bands) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!std::isfinite(bands[i]) || bands[i] < 0.0 || bands[i] > 1.0) {
      fail(errc::invalid_argument, "band boundaries must lie in [0, 1]");
    }
    if (i > 0 && bands[i] <= bands[i - 1]) {
      fail(errc::invalid_argument, "band boundaries must be strictly increasing");
    }
  }
  const double affinity = is_inside(m, x).affinity;
  auto it = std::upper_bound(bands.begin(), bands.end(), affinity);
  return static_cast<int>(it - bands.begin());
}

std::vector<QueryResult> score_batch(const KernelOdd& m, const std::vector<Point>& xs) {
  const std::size_t n = m.dimension();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != n) {
      fail(errc::dimension_mismatch,
           "batch row " + std::to_string(i) + ": expected dimension " +
               std::to_string(n) + ", got " + std::to_string(xs[i].size()));
    }
  }
  std::vector<QueryResult> out(xs.size());
  if (xs.empty()) return out;
  AffinityEvaluator eval(m.kernels, m.normalizer ? &*m.normalizer : nullptr);
  detail::parallel_for(xs.size(), [&](std::size_t i) {
    out[i].affinity = eval.affinity(xs[i]);
    out[i].inside = out[i].affinity >= m.zeta;
  });
  return out;
}

std::string dataset_digest(const Dataset& canonical, const DerivationConfig& cfg) {
  Fnv1a64 h;
  h.add_bytes("odf1", 4);
  h.add_u64(canonical.dimension);
  h.add_u64(canonical.id_samples.size());
  for (const auto& p : canonical.id_samples) {
    for (double v : p) h.add_real(v);
  }
  h.add_u64(canonical.ood_samples.size());
  for (const auto& p : canonical.ood_samples) {
    for (double v : p) h.add_real(v);
  }
  h.add_real(cfg.kernel.kappa);
  h.add_real(cfg.kernel.eta);
  h.add_real(cfg.kernel.lambda);
  h.add_u64(cfg.kernel.distance_mode == DistanceMode::Global ? 0 : 1);
  h.add_u64(cfg.kernel.normalize ? 1 : 0);
  h.add_real(cfg.zeta);
  h.add_real(cfg.xi);
  h.add_real(cfg.shrink_factor);
  h.add_real(cfg.shrink_floor);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h.value()));
  return std::string("fnv1a64:") + buf;
}

std::string model_to_json_text(const KernelOdd& m) {
  m.validate();
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kernel_type"] = "rbf";
  j["dimension"] = m.dimension();
  if (!m.dimension_names.empty()) j["dimension_names"] = m.dimension_names;
  j["zeta"] = m.zeta;
  j["xi"] = m.xi;
  if (m.normalizer) {
    ordered_json jn;
    jn["offsets"] = real_array(m.normalizer->offsets);
    jn["scales"] = real_array(m.normalizer->scales);
    j["normalizer"] = std::move(jn);
  }
  ordered_json jc;
  jc["kappa"] = m.config.kappa;
  jc["eta"] = m.config.eta;
  jc["lambda"] = m.config.lambda;
  jc["distance_mode"] = mode_name(m.config.distance_mode);
  j["config"] = std::move(jc);
  ordered_json anchors = ordered_json::array();
  for (const auto& k : m.kernels) {
    ordered_json ja;
    ja["center"] = real_array(k.center);
    ja["sigma_diag"] = real_array(k.sigma_diag);
    anchors.push_back(std::move(ja));
  }
  j["anchors"] = std::move(anchors);
  j["dataset_digest"] = m.dataset_digest;
  return j.dump(2) + "\n";
}

KernelOdd model_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    fail(errc::parse, std::string("model file: ") + e.what());
  }
  if (!j.is_object()) fail(errc::parse, "model file must be a JSON object");
  if (!j.contains("format_version") || !j["format_version"].is_string()) {
    fail(errc::parse, "model file lacks a format_version string");
  }
  const std::string version = j["format_version"].get<std::string>();
  if (version != kFormatVersion) {
    fail(errc::version_mismatch,
         "model format_version '" + version + "' is not supported (expected '" +
             kFormatVersion + "')");
  }
  if (!j.contains("kernel_type") || j["kernel_type"].get<std::string>() != "rbf") {
    fail(errc::parse, "model kernel_type must be \"rbf\"");
  }
  if (!j.contains("dimension") || !j["dimension"].is_number_unsigned()) {
    fail(errc::parse, "model needs an unsigned 'dimension'");
  }
  const auto n = j["dimension"].get<std::size_t>();
  if (n == 0) fail(errc::parse, "model dimension must be at least 1");

  KernelOdd m;
  if (j.contains("dimension_names")) {
    if (!j["dimension_names"].is_array() || j["dimension_names"].size() != n) {
      fail(errc::parse, "dimension_names must be an array of length 'dimension'");
    }
    for (const auto& e : j["dimension_names"]) {
      if (!e.is_string()) fail(errc::parse, "dimension_names must hold strings");
      m.dimension_names.push_back(e.get<std::string>());
    }
  }
  m.zeta = finite_real(j.value("zeta", ordered_json()), "zeta");
  m.xi = finite_real(j.value("xi", ordered_json()), "xi");
  if (j.contains("normalizer")) {
    const auto& jn = j["normalizer"];
    if (!jn.is_object() || !jn.contains("offsets") || !jn.contains("scales")) {
      fail(errc::parse, "normalizer needs 'offsets' and 'scales'");
    }
    Normalizer norm;
    norm.offsets = finite_reals(jn["offsets"], "normalizer.offsets", n);
    norm.scales = finite_reals(jn["scales"], "normalizer.scales", n);
    m.normalizer = std::move(norm);
  }
  if (!j.contains("config") || !j["config"].is_object()) {
    fail(errc::parse, "model needs a 'config' object");
  }
  const auto& jc = j["config"];
  m.config.kappa = finite_real(jc.value("kappa", ordered_json()), "config.kappa");
  m.config.eta = finite_real(jc.value("eta", ordered_json()), "config.eta");
  m.config.lambda = finite_real(jc.value("lambda", ordered_json()), "config.lambda");
  if (!jc.contains("distance_mode") || !jc["distance_mode"].is_string()) {
    fail(errc::parse, "config needs a 'distance_mode' string");
  }
  m.config.distance_mode = mode_from_name(jc["distance_mode"].get<std::string>());
  m.config.normalize = m.normalizer.has_value();
  if (!j.contains("anchors") || !j["anchors"].is_array() || j["anchors"].empty()) {
    fail(errc::parse, "model needs a non-empty 'anchors' array");
  }
  for (const auto& ja : j["anchors"]) {
    if (!ja.is_object() || !ja.contains("center") || !ja.contains("sigma_diag")) {
      fail(errc::parse, "each anchor needs 'center' and 'sigma_diag'");
    }
    AnchorKernel k;
    k.center = finite_reals(ja["center"], "anchor center", n);
    k.sigma_diag = finite_reals(ja["sigma_diag"], "anchor sigma_diag", n);
    m.kernels.push_back(std::move(k));
  }
  if (!j.contains("dataset_digest") || !j["dataset_digest"].is_string()) {
    fail(errc::parse, "model needs a 'dataset_digest' string");
  }
  m.dataset_digest = j["dataset_digest"].get<std::string>();
  try {
    m.validate();
  } catch (const Error& e) {
    fail(errc::parse, std::string("model file invalid: ") + e.what());
  }
  return m;
}

void save_model(const KernelOdd& m, const std::string& path) {
  const std::string text = model_to_json_text(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io, "cannot open model file for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(errc::io, "failed writing model file: " + path);
}

KernelOdd load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json_text(buf.str());
}

}  // namespace oddforge
