// oddforge command-line tool.
//
// Subcommands:
//   derive       build a model from labeled CSV / OpenLABEL samples
//   query        affinity / membership / band lookups against a model
//   validate-mc  seeded Monte-Carlo validation against a ground-truth spec
//   pr-curve     precision-recall sweep of a model against labeled data
//   info         print model metadata
//
// Every flag has a config-file equivalent (--config FILE, a flat JSON
// object keyed by the long flag name with dashes turned into underscores);
// command-line flags win. Exit codes: 0 success, 1 usage or input error,
// 2 OOD constraint not satisfiable / not converged.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oddforge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConstraint = 2;

std::string fmt(double v) {
  char buf[40];
  const size_t n = odf_format_real(v, buf, sizeof(buf));
  return std::string(buf, n);
}

int exit_code_for(odf_status status) {
  switch (status) {
    case ODF_OK:
      return kExitOk;
    case ODF_ERR_NON_CONVERGENCE:
    case ODF_ERR_UNSATISFIABLE_CONSTRAINT:
      return kExitConstraint;
    default:
      return kExitUsage;
  }
}

int report_failure(const std::string& what, odf_status status) {
  std::cerr << "error: " << what << ": " << odf_last_error() << "\n";
  return exit_code_for(status);
}

bool parse_double_strict(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_double_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double_strict(item, v)) return false;
    out.push_back(v);
  }
  if (!text.empty() && text.back() == ',') return false;
  return !out.empty();
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// First CSV record, unquoted splitting; enough for auto-mapping plain
// headers. --map covers anything fancier.
std::vector<std::string> read_csv_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> names = split_names(line);
  for (auto& n : names) {
    if (n.size() >= 2 && n.front() == '"' && n.back() == '"') {
      n = n.substr(1, n.size() - 2);
    }
  }
  return names;
}

// Flat JSON config; values fill in flags the user did not pass.
class ConfigFile {
 public:
  bool load(const std::string& path, std::string& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      error = "cannot open config file: " + path;
      return false;
    }
    try {
      in >> json_;
    } catch (const std::exception& e) {
      error = std::string("config file: ") + e.what();
      return false;
    }
    if (!json_.is_object()) {
      error = "config file must hold a JSON object";
      return false;
    }
    return true;
  }

  template <typename T>
  void fill(const CLI::Option* opt, const std::string& key, T& value) const {
    if (opt && opt->count() > 0) return;
    if (!json_.contains(key)) return;
    try {
      value = json_.at(key).get<T>();
    } catch (const std::exception&) {
      // type mismatch surfaces later through validation
    }
  }

 private:
  nlohmann::json json_;
};

struct DeriveParamsCli {
  double kappa = 1.0;
  double eta = 0.5;
  double lambda = 0.05;
  std::string distance_mode = "global";
  bool normalize = false;
  double zeta = 0.5;
  double xi = 0.05;
  double shrink_factor = 0.5;
  int max_shrink_iters = 200;
  int max_passes = 50;
  double shrink_floor = 1e-9;

  CLI::Option* kappa_opt = nullptr;
  CLI::Option* eta_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* normalize_opt = nullptr;
  CLI::Option* zeta_opt = nullptr;
  CLI::Option* xi_opt = nullptr;
  CLI::Option* shrink_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* passes_opt = nullptr;
  CLI::Option* floor_opt = nullptr;

  void add_to(CLI::App* cmd) {
    kappa_opt = cmd->add_option("--kappa", kappa, "Max sigma diagonal entry");
    eta_opt = cmd->add_option("--eta", eta, "Sigma decay factor");
    lambda_opt = cmd->add_option("--lambda", lambda, "Sigma lower bound");
    mode_opt = cmd->add_option("--distance-mode", distance_mode,
                               "Nearest-neighbor distance: global or per_dimension")
                   ->check(CLI::IsMember({"global", "per_dimension"}));
    normalize_opt = cmd->add_flag("--normalize", normalize,
                                  "Min/range normalization fitted on ID samples");
    zeta_opt = cmd->add_option("--zeta", zeta, "Membership threshold in [0,1]");
    xi_opt = cmd->add_option("--xi", xi, "Max OOD affinity, must be below zeta");
    shrink_opt = cmd->add_option("--shrink-factor", shrink_factor,
                                 "Sigma contraction per OOD adjustment");
    iters_opt = cmd->add_option("--max-shrink-iters", max_shrink_iters,
                                "Shrink steps per OOD point and pass");
    passes_opt = cmd->add_option("--max-passes", max_passes, "Max enforcement passes");
    floor_opt = cmd->add_option("--shrink-floor", shrink_floor, "Hard sigma floor");
  }

  void fill_from(const ConfigFile& cfg) {
    cfg.fill(kappa_opt, "kappa", kappa);
    cfg.fill(eta_opt, "eta", eta);
    cfg.fill(lambda_opt, "lambda", lambda);
    cfg.fill(mode_opt, "distance_mode", distance_mode);
    cfg.fill(normalize_opt, "normalize", normalize);
    cfg.fill(zeta_opt, "zeta", zeta);
    cfg.fill(xi_opt, "xi", xi);
    cfg.fill(shrink_opt, "shrink_factor", shrink_factor);
    cfg.fill(iters_opt, "max_shrink_iters", max_shrink_iters);
    cfg.fill(passes_opt, "max_passes", max_passes);
    cfg.fill(floor_opt, "shrink_floor", shrink_floor);
  }

  odf_derive_params to_params() const {
    odf_derive_params p = odf_derive_params_default();
    p.kappa = kappa;
    p.eta = eta;
    p.lambda = lambda;
    p.per_dimension = distance_mode == "per_dimension" ? 1 : 0;
    p.normalize = normalize ? 1 : 0;
    p.zeta = zeta;
    p.xi = xi;
    p.shrink_factor = shrink_factor;
    p.max_shrink_iters = max_shrink_iters;
    p.max_passes = max_passes;
    p.shrink_floor = shrink_floor;
    return p;
  }
};

struct DatasetHandle {
  odf_dataset* ptr = nullptr;
  ~DatasetHandle() { odf_dataset_free(ptr); }
};

struct ModelHandle {
  odf_model* ptr = nullptr;
  ~ModelHandle() { odf_model_free(ptr); }
};

struct ReportHandle {
  odf_report* ptr = nullptr;
  ~ReportHandle() { odf_report_free(ptr); }
};

struct McResultHandle {
  odf_mc_result* ptr = nullptr;
  ~McResultHandle() { odf_mc_result_free(ptr); }
};

odf_status load_dataset(const std::string& path, const std::string& format,
                        const std::vector<std::string>& map,
                        const std::string& label_column, const std::string& id_label,
                        const std::string& ood_label, bool strict, DatasetHandle& out) {
  std::vector<const char*> cols;
  cols.reserve(map.size());
  for (const auto& c : map) cols.push_back(c.c_str());
  if (format == "openlabel") {
    size_t skipped = 0;
    const odf_status st = odf_dataset_from_openlabel(path.c_str(), cols.data(),
                                                     cols.size(), strict ? 1 : 0,
                                                     &skipped, &out.ptr);
    if (st == ODF_OK && skipped > 0) {
      std::cerr << "warning: skipped " << skipped
                << " frame(s) missing mapped attributes\n";
    }
    return st;
  }
  return odf_dataset_from_csv(path.c_str(), cols.data(), cols.size(),
                              label_column.empty() ? nullptr : label_column.c_str(),
                              id_label.c_str(), ood_label.c_str(), &out.ptr);
}

int run_derive(const std::string& input, const std::string& format,
               const std::vector<std::string>& map, const std::string& label_column,
               const std::string& id_label, const std::string& ood_label, bool strict,
               const DeriveParamsCli& params, const std::string& output) {
  DatasetHandle ds;
  odf_status st = load_dataset(input, format, map, label_column, id_label, ood_label,
                               strict, ds);
  if (st != ODF_OK) return report_failure("loading '" + input + "'", st);

  ModelHandle model;
  ReportHandle report;
  const odf_derive_params derive_params = params.to_params();
  st = odf_derive(ds.ptr, &derive_params, &model.ptr, &report.ptr);
  if (st != ODF_OK) {
    if (report.ptr) {
      std::cerr << "derivation report: " << odf_report_adjustment_count(report.ptr)
                << " adjustment(s) over " << odf_report_passes_used(report.ptr)
                << " pass(es), constraint satisfied: "
                << (odf_report_constraint_satisfied(report.ptr) ? "yes" : "no") << "\n";
    }
    return report_failure("derivation", st);
  }
  st = odf_model_save(model.ptr, output.c_str());
  if (st != ODF_OK) return report_failure("writing '" + output + "'", st);

  std::cout << "anchors: " << odf_report_anchor_count(report.ptr) << "\n"
            << "ood samples: " << odf_report_ood_count(report.ptr) << "\n"
            << "adjustments: " << odf_report_adjustment_count(report.ptr) << "\n"
            << "passes: " << odf_report_passes_used(report.ptr) << "\n"
            << "constraint satisfied: "
            << (odf_report_constraint_satisfied(report.ptr) ? "yes" : "no") << "\n"
            << "model written to " << output << "\n";
  return kExitOk;
}

int run_query(const std::string& model_path, const std::vector<std::string>& points_raw,
              const std::string& input, const std::vector<std::string>& map,
              const std::string& bands_raw, const std::string& output) {
  ModelHandle model;
  odf_status st = odf_model_load(model_path.c_str(), &model.ptr);
  if (st != ODF_OK) return report_failure("loading model '" + model_path + "'", st);
  const size_t dim = odf_model_dimension(model.ptr);

  std::vector<double> bands;
  if (!bands_raw.empty() && !parse_double_list(bands_raw, bands)) {
    std::cerr << "error: cannot parse --bands '" << bands_raw << "'\n";
    return kExitUsage;
  }

  std::vector<std::vector<double>> queries;
  for (const auto& raw : points_raw) {
    std::vector<double> p;
    if (!parse_double_list(raw, p)) {
      std::cerr << "error: cannot parse --point '" << raw << "'\n";
      return kExitUsage;
    }
    queries.push_back(std::move(p));
  }
  if (!input.empty()) {
    std::vector<std::string> columns = map;
    if (columns.empty()) {
      char name_buf[256];
      for (size_t k = 0; k < dim; ++k) {
        if (odf_model_dimension_name(model.ptr, k, name_buf, sizeof(name_buf)) == 0) {
          columns.clear();
          break;
        }
        columns.emplace_back(name_buf);
      }
      if (columns.empty()) columns = read_csv_header(input);
      if (columns.size() > dim) columns.resize(dim);
    }
    DatasetHandle ds;
    st = load_dataset(input, "csv", columns, "", "id", "ood", true, ds);
    if (st != ODF_OK) return report_failure("loading '" + input + "'", st);
    if (odf_dataset_dimension(ds.ptr) != dim) {
      std::cerr << "error: input dimension " << odf_dataset_dimension(ds.ptr)
                << " does not match model dimension " << dim << "\n";
      return kExitUsage;
    }
    std::vector<double> row(dim);
    for (size_t i = 0; i < odf_dataset_id_count(ds.ptr); ++i) {
      odf_dataset_point(ds.ptr, 0, i, row.data());
      queries.push_back(row);
    }
  }

  if (queries.empty()) {
    std::cerr << "error: query needs at least one --point\n";
    return kExitUsage;
  }

  std::ostringstream out;
  out << (bands.empty() ? "affinity,inside\n" : "affinity,inside,band\n");
  for (const auto& q : queries) {
    if (q.size() != dim) {
      std::cerr << "error: point dimension " << q.size()
                << " does not match model dimension " << dim << "\n";
      return kExitUsage;
    }
    double affinity = 0.0;
    int inside = 0;
    st = odf_model_affinity(model.ptr, q.data(), q.size(), &affinity, &inside);
    if (st != ODF_OK) return report_failure("query", st);
    out << fmt(affinity) << "," << inside;
    if (!bands.empty()) {
      int band = 0;
      st = odf_model_band(model.ptr, q.data(), q.size(), bands.data(), bands.size(),
                          &band);
      if (st != ODF_OK) return report_failure("band lookup", st);
      out << "," << band;
    }
    out << "\n";
  }
  if (output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(output, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot open '" << output << "' for writing\n";
      return kExitUsage;
    }
    file << out.str();
  }
  return kExitOk;
}

int run_validate_mc(const std::string& spec, const std::string& anchors_raw,
                    std::uint64_t samples, std::uint64_t seed,
                    const DeriveParamsCli& params, const std::string& output_dir) {
  std::vector<size_t> counts;
  {
    std::stringstream ss(anchors_raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      unsigned long long v = 0;
      const char* first = item.data();
      const char* last = item.data() + item.size();
      auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || v == 0) {
        std::cerr << "error: cannot parse --anchors '" << anchors_raw << "'\n";
        return kExitUsage;
      }
      counts.push_back(static_cast<size_t>(v));
    }
  }
  if (counts.empty()) {
    std::cerr << "error: --anchors needs at least one count\n";
    return kExitUsage;
  }

  odf_mc_params mc;
  mc.anchor_counts = counts.data();
  mc.n_anchor_counts = counts.size();
  mc.n_validation = static_cast<size_t>(samples);
  mc.seed = seed;
  mc.derive = params.to_params();

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  const std::string results_csv = output_dir + "/results.csv";
  const std::string summary_csv = output_dir + "/summary.csv";
  McResultHandle result;
  const odf_status st = odf_validate_mc(spec.c_str(), &mc, results_csv.c_str(),
                                        summary_csv.c_str(), &result.ptr);
  if (st != ODF_OK) return report_failure("validate-mc", st);

  std::cout << "anchor_count  r2_precision  r2_recall\n";
  for (size_t i = 0; i < odf_mc_result_count(result.ptr); ++i) {
    size_t count = 0;
    double r2p = 0.0;
    double r2r = 0.0;
    odf_mc_result_entry(result.ptr, i, &count, &r2p, &r2r);
    std::cout << count << "  " << (std::isnan(r2p) ? "n/a" : fmt(r2p)) << "  "
              << (std::isnan(r2r) ? "n/a" : fmt(r2r)) << "\n";
  }
  double r2p = 0.0;
  double r2r = 0.0;
  odf_mc_result_overall(result.ptr, &r2p, &r2r);
  std::cout << "all  " << (std::isnan(r2p) ? "n/a" : fmt(r2p)) << "  "
            << (std::isnan(r2r) ? "n/a" : fmt(r2r)) << "\n"
            << "results written to " << results_csv << " and " << summary_csv << "\n";
  return kExitOk;
}

int run_pr_curve(const std::string& model_path, const std::string& labeled,
                 const std::string& format, const std::vector<std::string>& map,
                 const std::string& label_column, const std::string& id_label,
                 const std::string& ood_label, const std::string& output) {
  ModelHandle model;
  odf_status st = odf_model_load(model_path.c_str(), &model.ptr);
  if (st != ODF_OK) return report_failure("loading model '" + model_path + "'", st);

  DatasetHandle ds;
  st = load_dataset(labeled, format, map, label_column, id_label, ood_label, true, ds);
  if (st != ODF_OK) return report_failure("loading '" + labeled + "'", st);

  int degenerate = 0;
  st = odf_pr_curve(model.ptr, ds.ptr, output.c_str(), &degenerate);
  if (st != ODF_OK) return report_failure("pr-curve", st);
  if (degenerate) {
    std::cerr << "warning: labeled data holds a single class; the curve is degenerate\n";
  }
  std::cout << "curve written to " << output << "\n";
  return kExitOk;
}

int run_info(const std::string& model_path) {
  ModelHandle model;
  const odf_status st = odf_model_load(model_path.c_str(), &model.ptr);
  if (st != ODF_OK) return report_failure("loading model '" + model_path + "'", st);

  const size_t dim = odf_model_dimension(model.ptr);
  std::cout << "dimension: " << dim << "\n";
  char name_buf[256];
  bool any_names = false;
  std::string names;
  for (size_t k = 0; k < dim; ++k) {
    const size_t n = odf_model_dimension_name(model.ptr, k, name_buf, sizeof(name_buf));
    if (n > 0) any_names = true;
    if (k) names += ",";
    names += name_buf;
  }
  if (any_names) std::cout << "dimension names: " << names << "\n";
  std::cout << "anchors: " << odf_model_anchor_count(model.ptr) << "\n"
            << "zeta: " << fmt(odf_model_zeta(model.ptr)) << "\n"
            << "xi: " << fmt(odf_model_xi(model.ptr)) << "\n"
            << "kappa: " << fmt(odf_model_kappa(model.ptr)) << "\n"
            << "eta: " << fmt(odf_model_eta(model.ptr)) << "\n"
            << "lambda: " << fmt(odf_model_lambda(model.ptr)) << "\n"
            << "distance mode: "
            << (odf_model_per_dimension(model.ptr) ? "per_dimension" : "global") << "\n"
            << "normalized: " << (odf_model_normalized(model.ptr) ? "yes" : "no") << "\n";
  char digest[64];
  odf_model_digest(model.ptr, digest, sizeof(digest));
  std::cout << "dataset digest: " << digest << "\n";
  const std::string d(digest);
  const bool well_formed =
      d.rfind("fnv1a64:", 0) == 0 && d.size() == 8 + 16 &&
      d.find_first_not_of("0123456789abcdef", 8) == std::string::npos;
  if (!well_formed) {
    std::cerr << "warning: dataset digest is malformed; the file may have been edited\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven operational design domains: derive, query, validate"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; flags override its values")
      ->expected(1);

  // derive
  auto* derive_cmd = app.add_subcommand("derive", "Derive a model from labeled samples");
  std::string d_input, d_format = "csv", d_map_raw, d_label, d_id = "id", d_ood = "ood";
  std::string d_output = "model.json";
  bool d_strict = false;
  DeriveParamsCli d_params;
  auto* d_input_opt = derive_cmd->add_option("--input", d_input, "Input data file");
  auto* d_format_opt = derive_cmd->add_option("--format", d_format, "csv or openlabel")
                           ->check(CLI::IsMember({"csv", "openlabel"}));
  auto* d_map_opt = derive_cmd->add_option(
      "--map", d_map_raw, "Comma-separated dimension columns / attributes");
  auto* d_label_opt = derive_cmd->add_option(
      "--label-column", d_label, "CSV column holding id/ood labels (default: none)");
  derive_cmd->add_option("--id-label", d_id, "Label value for ID rows");
  derive_cmd->add_option("--ood-label", d_ood, "Label value for OOD rows");
  derive_cmd->add_flag("--strict", d_strict,
                       "OpenLABEL: fail on frames missing mapped attributes");
  d_params.add_to(derive_cmd);
  auto* d_output_opt = derive_cmd->add_option("--output", d_output, "Model file to write");

  // query
  auto* query_cmd = app.add_subcommand("query", "Query a model");
  std::string q_model, q_input, q_map_raw, q_bands, q_output;
  std::vector<std::string> q_points;
  auto* q_model_opt = query_cmd->add_option("--model", q_model, "Model file");
  query_cmd->add_option("--point", q_points,
                        "Query point as comma-separated values (repeatable)");
  query_cmd->add_option("--input", q_input, "CSV of query points");
  query_cmd->add_option("--map", q_map_raw, "Columns to read from --input");
  auto* q_bands_opt =
      query_cmd->add_option("--bands", q_bands, "Comma-separated band boundaries");
  query_cmd->add_option("--output", q_output, "Write results here instead of stdout");

  // validate-mc
  auto* mc_cmd = app.add_subcommand("validate-mc", "Monte-Carlo validation");
  std::string m_spec, m_anchors = "10,100,1000", m_outdir = ".";
  std::uint64_t m_samples = 20000, m_seed = 42;
  DeriveParamsCli m_params;
  auto* m_spec_opt = mc_cmd->add_option("--spec", m_spec, "Ground-truth spec JSON");
  auto* m_anchors_opt =
      mc_cmd->add_option("--anchors", m_anchors, "Comma-separated anchor counts");
  auto* m_samples_opt =
      mc_cmd->add_option("--samples", m_samples, "Validation sample count");
  auto* m_seed_opt = mc_cmd->add_option("--seed", m_seed, "RNG seed");
  m_params.add_to(mc_cmd);
  auto* m_outdir_opt =
      mc_cmd->add_option("--output-dir", m_outdir, "Directory for results/summary CSVs");

  // pr-curve
  auto* pr_cmd = app.add_subcommand("pr-curve", "Precision-recall against labeled data");
  std::string p_model, p_data, p_format = "csv", p_map_raw, p_label = "label";
  std::string p_id = "id", p_ood = "ood", p_output = "pr_curve.csv";
  auto* p_model_opt = pr_cmd->add_option("--model", p_model, "Model file");
  auto* p_data_opt = pr_cmd->add_option("--labeled-data", p_data, "Labeled data file");
  pr_cmd->add_option("--format", p_format, "csv or openlabel")
      ->check(CLI::IsMember({"csv", "openlabel"}));
  auto* p_map_opt =
      pr_cmd->add_option("--map", p_map_raw, "Comma-separated dimension columns");
  pr_cmd->add_option("--label-column", p_label, "CSV label column");
  pr_cmd->add_option("--id-label", p_id, "Label value for ID rows");
  pr_cmd->add_option("--ood-label", p_ood, "Label value for OOD rows");
  auto* p_output_opt = pr_cmd->add_option("--output", p_output, "Curve CSV to write");

  // info
  auto* info_cmd = app.add_subcommand("info", "Print model metadata");
  std::string i_model;
  auto* i_model_opt = info_cmd->add_option("--model", i_model, "Model file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ConfigFile cfg;
  if (!config_path.empty()) {
    std::string error;
    if (!cfg.load(config_path, error)) {
      std::cerr << "error: " << error << "\n";
      return kExitUsage;
    }
  }

  if (derive_cmd->parsed()) {
    cfg.fill(d_input_opt, "input", d_input);
    cfg.fill(d_format_opt, "format", d_format);
    cfg.fill(d_map_opt, "map", d_map_raw);
    cfg.fill(d_label_opt, "label_column", d_label);
    cfg.fill(d_output_opt, "output", d_output);
    d_params.fill_from(cfg);
    if (d_input.empty() || d_map_raw.empty()) {
      std::cerr << "error: derive needs --input and --map\n";
      return kExitUsage;
    }
    return run_derive(d_input, d_format, split_names(d_map_raw), d_label, d_id, d_ood,
                      d_strict, d_params, d_output);
  }
  if (query_cmd->parsed()) {
    cfg.fill(q_model_opt, "model", q_model);
    cfg.fill(q_bands_opt, "bands", q_bands);
    if (q_model.empty()) {
      std::cerr << "error: query needs --model\n";
      return kExitUsage;
    }
    return run_query(q_model, q_points, q_input,
                     q_map_raw.empty() ? std::vector<std::string>{}
                                       : split_names(q_map_raw),
                     q_bands, q_output);
  }
  if (mc_cmd->parsed()) {
    cfg.fill(m_spec_opt, "spec", m_spec);
    cfg.fill(m_anchors_opt, "anchors", m_anchors);
    cfg.fill(m_samples_opt, "samples", m_samples);
    cfg.fill(m_seed_opt, "seed", m_seed);
    cfg.fill(m_outdir_opt, "output_dir", m_outdir);
    m_params.fill_from(cfg);
    if (m_spec.empty()) {
      std::cerr << "error: validate-mc needs --spec\n";
      return kExitUsage;
    }
    return run_validate_mc(m_spec, m_anchors, m_samples, m_seed, m_params, m_outdir);
  }
  if (pr_cmd->parsed()) {
    cfg.fill(p_model_opt, "model", p_model);
    cfg.fill(p_data_opt, "labeled_data", p_data);
    cfg.fill(p_map_opt, "map", p_map_raw);
    cfg.fill(p_output_opt, "output", p_output);
    if (p_model.empty() || p_data.empty() || p_map_raw.empty()) {
      std::cerr << "error: pr-curve needs --model, --labeled-data and --map\n";
      return kExitUsage;
    }
    return run_pr_curve(p_model, p_data, p_format, split_names(p_map_raw), p_label, p_id,
                        p_ood, p_output);
  }
  if (info_cmd->parsed()) {
    cfg.fill(i_model_opt, "model", i_model);
    if (i_model.empty()) {
      std::cerr << "error: info needs --model\n";
      return kExitUsage;
    }
    return run_info(i_model);
  }
  return kExitUsage;
}
