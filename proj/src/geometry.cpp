#include "oddforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "oddforge/errors.hpp"

namespace oddforge {

namespace {

void require_dimension(std::size_t expected, const Point& x, const char* what) {
  if (x.size() != expected) {
    fail(errc::dimension_mismatch,
         std::string(what) + ": expected dimension " + std::to_string(expected) +
             ", got " + std::to_string(x.size()));
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// x^e for small non-negative integer e, as a plain repeated product so the
// result does not depend on the libm pow implementation.
double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

std::size_t ConvexPolytope::dimension() const {
  return normals.empty() ? 0 : normals.front().size();
}

void ConvexPolytope::validate() const {
  if (normals.empty()) {
    fail(errc::invalid_argument, "polytope needs at least one half-space");
  }
  const std::size_t n = normals.front().size();
  if (n == 0) {
    fail(errc::invalid_argument, "polytope dimension must be at least 1");
  }
  if (offsets.size() != normals.size()) {
    fail(errc::invalid_argument, "polytope offsets do not match normal rows");
  }
  for (std::size_t r = 0; r < normals.size(); ++r) {
    if (normals[r].size() != n) {
      fail(errc::invalid_argument,
           "polytope row " + std::to_string(r) + " has inconsistent dimension");
    }
    bool all_zero = true;
    for (double v : normals[r]) {
      if (!std::isfinite(v)) {
        fail(errc::invalid_argument, "polytope normals must be finite");
      }
      if (v != 0.0) all_zero = false;
    }
    if (all_zero) {
      fail(errc::invalid_argument,
           "polytope row " + std::to_string(r) + " is the zero vector");
    }
  }
  for (double v : offsets) {
    if (!std::isfinite(v)) {
      fail(errc::invalid_argument, "polytope offsets must be finite");
    }
  }
}

ConvexPolytope ConvexPolytope::box(const std::vector<double>& lower,
                                   const std::vector<double>& upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    fail(errc::invalid_argument, "box bounds must be non-empty and equal-length");
  }
  const std::size_t n = lower.size();
  ConvexPolytope p;
  p.normals.reserve(2 * n);
  p.offsets.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(lower[k] <= upper[k])) {
      fail(errc::invalid_argument,
           "box lower bound exceeds upper bound in dimension " + std::to_string(k));
    }
    std::vector<double> row(n, 0.0);
    row[k] = 1.0;
    p.normals.push_back(row);
    p.offsets.push_back(upper[k]);
    row[k] = -1.0;
    p.normals.push_back(std::move(row));
    p.offsets.push_back(-lower[k]);
  }
  return p;
}

bool polytope_contains(const ConvexPolytope& p, const Point& x) {
  require_dimension(p.dimension(), x, "polytope_contains");
  for (std::size_t r = 0; r < p.normals.size(); ++r) {
    if (dot(p.normals[r], x) > p.offsets[r]) return false;
  }
  return true;
}

std::size_t OddPolytope::dimension() const {
  return parts.empty() ? 0 : parts.front().dimension();
}

void OddPolytope::validate() const {
  if (parts.empty()) {
    fail(errc::invalid_argument, "polytope union needs at least one part");
  }
  const std::size_t n = parts.front().dimension();
  for (const auto& part : parts) {
    part.validate();
    if (part.dimension() != n) {
      fail(errc::invalid_argument, "polytope union parts have mixed dimensions");
    }
  }
}

bool odd_polytope_contains(const OddPolytope& p, const Point& x) {
  require_dimension(p.dimension(), x, "odd_polytope_contains");
  for (const auto& part : p.parts) {
    if (polytope_contains(part, x)) return true;
  }
  return false;
}

PolynomialInequality PolynomialInequality::make(std::vector<PolynomialTerm> terms,
                                                Sense sense) {
  PolynomialInequality rel;
  rel.terms = std::move(terms);
  rel.sense = sense;
  std::sort(rel.terms.begin(), rel.terms.end(),
            [](const PolynomialTerm& a, const PolynomialTerm& b) {
              return a.exponents < b.exponents;
            });
  rel.validate();
  return rel;
}

std::size_t PolynomialInequality::dimension() const {
  return terms.empty() ? 0 : terms.front().exponents.size();
}

void PolynomialInequality::validate() const {
  if (terms.empty()) {
    fail(errc::invalid_argument, "polynomial inequality needs at least one term");
  }
  const std::size_t n = terms.front().exponents.size();
  if (n == 0) {
    fail(errc::invalid_argument, "polynomial inequality dimension must be at least 1");
  }
  for (const auto& term : terms) {
    if (!std::isfinite(term.coefficient)) {
      fail(errc::invalid_argument, "polynomial coefficients must be finite");
    }
    if (term.exponents.size() != n) {
      fail(errc::invalid_argument, "polynomial terms have mixed dimensions");
    }
    for (int e : term.exponents) {
      if (e < 0) {
        fail(errc::invalid_argument, "polynomial exponents must be non-negative");
      }
    }
  }
}

double PolynomialInequality::evaluate(const Point& x) const {
  require_dimension(dimension(), x, "polynomial evaluate");
  double sum = 0.0;
  for (const auto& term : terms) {
    double monomial = term.coefficient;
    for (std::size_t k = 0; k < x.size(); ++k) {
      monomial *= ipow(x[k], term.exponents[k]);
    }
    sum += monomial;
  }
  return sum;
}

int relationship_holds(const PolynomialInequality& rel, const Point& x) {
  const double value = rel.evaluate(x);
  if (rel.sense == Sense::GreaterEqual) return value >= 0.0 ? 1 : 0;
  return value <= 0.0 ? 1 : 0;
}

std::size_t GroundTruthOdd::dimension() const { return taxonomy.dimension(); }

void GroundTruthOdd::validate() const {
  taxonomy.validate();
  for (const auto& rel : ontology) {
    rel.validate();
    if (rel.dimension() != taxonomy.dimension()) {
      fail(errc::invalid_argument,
           "relationship dimension does not match taxonomy dimension");
    }
  }
}

bool ground_truth_contains(const GroundTruthOdd& gt, const Point& x) {
  require_dimension(gt.dimension(), x, "ground_truth_contains");
  if (!odd_polytope_contains(gt.taxonomy, x)) return false;
  for (const auto& rel : gt.ontology) {
    if (relationship_holds(rel, x) == 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Ground-truth spec file
// ---------------------------------------------------------------------------

namespace {

using json = nlohmann::json;

std::vector<double> json_real_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(errc::parse, where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) fail(errc::parse, where + " must contain only numbers");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(errc::parse, where + " must be finite");
    out.push_back(d);
  }
  return out;
}

GroundTruthOdd parse_ground_truth(const json& root,
                                  std::vector<double>* box_lower,
                                  std::vector<double>* box_upper) {
  if (!root.is_object()) fail(errc::parse, "ground-truth spec must be a JSON object");
  if (!root.contains("dimension") || !root["dimension"].is_number_unsigned()) {
    fail(errc::parse, "ground-truth spec needs an unsigned 'dimension'");
  }
  const auto n = root["dimension"].get<std::size_t>();
  if (n == 0) fail(errc::parse, "'dimension' must be at least 1");

  GroundTruthOdd gt;
  if (root.contains("box")) {
    const auto& box = root["box"];
    if (!box.is_object() || !box.contains("lower") || !box.contains("upper")) {
      fail(errc::parse, "'box' needs 'lower' and 'upper' arrays");
    }
    auto lower = json_real_vector(box["lower"], "box.lower");
    auto upper = json_real_vector(box["upper"], "box.upper");
    if (lower.size() != n || upper.size() != n) {
      fail(errc::parse, "'box' bounds must have length 'dimension'");
    }
    gt.taxonomy.parts.push_back(ConvexPolytope::box(lower, upper));
    if (box_lower) *box_lower = lower;
    if (box_upper) *box_upper = upper;
  }
  if (root.contains("polytopes")) {
    if (!root["polytopes"].is_array()) fail(errc::parse, "'polytopes' must be an array");
    for (const auto& jp : root["polytopes"]) {
      if (!jp.is_object() || !jp.contains("A") || !jp.contains("b")) {
        fail(errc::parse, "each polytope needs 'A' and 'b'");
      }
      ConvexPolytope part;
      if (!jp["A"].is_array()) fail(errc::parse, "polytope 'A' must be an array of rows");
      for (const auto& row : jp["A"]) {
        part.normals.push_back(json_real_vector(row, "polytope row"));
        if (part.normals.back().size() != n) {
          fail(errc::parse, "polytope rows must have length 'dimension'");
        }
      }
      part.offsets = json_real_vector(jp["b"], "polytope 'b'");
      part.validate();
      gt.taxonomy.parts.push_back(std::move(part));
    }
  }
  if (gt.taxonomy.parts.empty()) {
    fail(errc::parse, "ground-truth spec needs a 'box' or at least one polytope");
  }
  if (root.contains("relationships")) {
    if (!root["relationships"].is_array()) {
      fail(errc::parse, "'relationships' must be an array");
    }
    for (const auto& jr : root["relationships"]) {
      if (!jr.is_object() || !jr.contains("terms") || !jr.contains("sense")) {
        fail(errc::parse, "each relationship needs 'terms' and 'sense'");
      }
      std::vector<PolynomialTerm> terms;
      if (!jr["terms"].is_array()) fail(errc::parse, "'terms' must be an array");
      for (const auto& jt : jr["terms"]) {
        if (!jt.is_object() || !jt.contains("coeff") || !jt.contains("exponents")) {
          fail(errc::parse, "each term needs 'coeff' and 'exponents'");
        }
        if (!jt["coeff"].is_number()) fail(errc::parse, "'coeff' must be a number");
        PolynomialTerm term;
        term.coefficient = jt["coeff"].get<double>();
        if (!std::isfinite(term.coefficient)) fail(errc::parse, "'coeff' must be finite");
        if (!jt["exponents"].is_array()) fail(errc::parse, "'exponents' must be an array");
        for (const auto& je : jt["exponents"]) {
          if (!je.is_number_integer() || je.get<long long>() < 0) {
            fail(errc::parse, "'exponents' must be non-negative integers");
          }
          term.exponents.push_back(je.get<int>());
        }
        if (term.exponents.size() != n) {
          fail(errc::parse, "'exponents' must have length 'dimension'");
        }
        terms.push_back(std::move(term));
      }
      const std::string sense = jr["sense"].get<std::string>();
      if (sense != "ge" && sense != "le") {
        fail(errc::parse, "'sense' must be \"ge\" or \"le\"");
      }
      gt.ontology.push_back(PolynomialInequality::make(
          std::move(terms), sense == "ge" ? Sense::GreaterEqual : Sense::LessEqual));
    }
  }
  gt.validate();
  return gt;
}

}  // namespace

GroundTruthOdd ground_truth_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::parse, std::string("ground-truth spec: ") + e.what());
  }
  return parse_ground_truth(root, nullptr, nullptr);
}

GroundTruthOdd load_ground_truth(const std::string& path,
                                 std::vector<double>* box_lower,
                                 std::vector<double>* box_upper) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open ground-truth spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json root;
  try {
    root = json::parse(buf.str());
  } catch (const json::exception& e) {
    fail(errc::parse, std::string("ground-truth spec: ") + e.what());
  }
  return parse_ground_truth(root, box_lower, box_upper);
}

GroundTruthOdd load_ground_truth(const std::string& path) {
  return load_ground_truth(path, nullptr, nullptr);
}

// ---------------------------------------------------------------------------
// Convex hull (incremental quickhull, any dimension)
// ---------------------------------------------------------------------------

namespace {

// Determinant by Gaussian elimination with partial pivoting. `m` is
// destroyed. The 0x0 determinant is 1 so the 1-D hull falls out of the
// generic code path.
double determinant(std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pivot = i;
    double best = std::fabs(m[i][i]);
    for (std::size_t r = i + 1; r < n; ++r) {
      const double mag = std::fabs(m[r][i]);
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != i) {
      std::swap(m[pivot], m[i]);
      det = -det;
    }
    det *= m[i][i];
    for (std::size_t r = i + 1; r < n; ++r) {
      const double f = m[r][i] / m[i][i];
      for (std::size_t c = i; c < n; ++c) m[r][c] -= f * m[i][c];
    }
  }
  return det;
}

struct Facet {
  std::vector<std::uint32_t> vertices;   // d point indices
  std::vector<std::uint32_t> neighbors;  // neighbors[i] shares all vertices but vertices[i]
  std::vector<double> normal;            // unit outward
  double offset = 0.0;                   // normal . v = offset on the plane
  std::vector<std::uint32_t> outside;    // candidate points strictly above
  std::uint32_t visit_epoch = 0;
  bool alive = true;
};

class HullBuilder {
 public:
  HullBuilder(const std::vector<Point>& points, double tol)
      : points_(points), dim_(points.front().size()), tol_(tol) {}

  void run() {
    build_initial_simplex();
    assign_initial_outside();
    process();
  }

  ConvexHull result() const {
    ConvexHull hull;
    std::vector<std::size_t> order;
    for (std::size_t f = 0; f < facets_.size(); ++f) {
      if (facets_[f].alive) order.push_back(f);
    }
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      if (facets_[a].normal != facets_[b].normal) {
        return facets_[a].normal < facets_[b].normal;
      }
      return facets_[a].offset < facets_[b].offset;
    });
    std::vector<char> on_hull(points_.size(), 0);
    for (std::size_t f : order) {
      hull.facets.normals.push_back(facets_[f].normal);
      hull.facets.offsets.push_back(facets_[f].offset);
      for (std::uint32_t v : facets_[f].vertices) on_hull[v] = 1;
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (on_hull[i]) hull.vertices.push_back(points_[i]);
    }
    std::sort(hull.vertices.begin(), hull.vertices.end());
    hull.vertices.erase(std::unique(hull.vertices.begin(), hull.vertices.end()),
                        hull.vertices.end());
    hull.tolerance = tol_;
    return hull;
  }

 private:
  const std::vector<Point>& points_;
  std::size_t dim_;
  double tol_;
  std::vector<Facet> facets_;
  Point interior_;                     // stays interior as the hull only grows
  std::vector<std::size_t> work_;      // facet ids that may have outside points
  std::uint32_t epoch_ = 0;

  double signed_distance(const Facet& f, const Point& x) const {
    return dot(f.normal, x) - f.offset;
  }

  // Outward unit normal of the hyperplane spanned by the facet vertices,
  // via the generalized cross product (cofactor expansion).
  void compute_plane(Facet& f) {
    const Point& base = points_[f.vertices[0]];
    std::vector<std::vector<double>> edges(dim_ - 1, std::vector<double>(dim_));
    for (std::size_t r = 0; r + 1 < dim_; ++r) {
      const Point& p = points_[f.vertices[r + 1]];
      for (std::size_t c = 0; c < dim_; ++c) edges[r][c] = p[c] - base[c];
    }
    f.normal.assign(dim_, 0.0);
    std::vector<std::vector<double>> minor(dim_ - 1, std::vector<double>(dim_ - 1));
    double sign = 1.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      for (std::size_t r = 0; r + 1 < dim_; ++r) {
        std::size_t cc = 0;
        for (std::size_t c = 0; c < dim_; ++c) {
          if (c == k) continue;
          minor[r][cc++] = edges[r][c];
        }
      }
      f.normal[k] = sign * determinant(minor);
      sign = -sign;
    }
    double norm = std::sqrt(dot(f.normal, f.normal));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      fail(errc::degenerate_geometry, "convex hull facet is degenerate");
    }
    for (double& v : f.normal) v /= norm;
    f.offset = dot(f.normal, base);
    const double side = dot(f.normal, interior_) - f.offset;
    if (side > 0.0) {
      for (double& v : f.normal) v = -v;
      f.offset = -f.offset;
    } else if (side == 0.0) {
      fail(errc::degenerate_geometry, "convex hull interior reference on facet");
    }
  }

  // Greedy affinely-independent seed: start from the lexicographic minimum
  // and repeatedly take the point with the largest residual against the
  // orthonormal basis built so far. Ties break toward the lower index.
  void build_initial_simplex() {
    std::size_t first = 0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i] < points_[first]) first = i;
    }
    std::vector<std::uint32_t> simplex{static_cast<std::uint32_t>(first)};
    std::vector<std::vector<double>> basis;
    const Point& origin = points_[first];
    while (simplex.size() < dim_ + 1) {
      std::size_t best = points_.size();
      double best_norm2 = 0.0;
      std::vector<double> best_residual;
      std::vector<double> residual(dim_);
      for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t c = 0; c < dim_; ++c) residual[c] = points_[i][c] - origin[c];
        for (const auto& b : basis) {
          const double proj = dot(residual, b);
          for (std::size_t c = 0; c < dim_; ++c) residual[c] -= proj * b[c];
        }
        const double norm2 = dot(residual, residual);
        if (norm2 > best_norm2) {
          best_norm2 = norm2;
          best = i;
          best_residual = residual;
        }
      }
      if (best == points_.size() || std::sqrt(best_norm2) <= tol_) {
        fail(errc::degenerate_geometry,
             "points are affinely dependent; no full-dimensional hull exists");
      }
      const double norm = std::sqrt(best_norm2);
      for (double& v : best_residual) v /= norm;
      basis.push_back(std::move(best_residual));
      simplex.push_back(static_cast<std::uint32_t>(best));
    }

    interior_.assign(dim_, 0.0);
    for (std::uint32_t v : simplex) {
      for (std::size_t c = 0; c < dim_; ++c) interior_[c] += points_[v][c];
    }
    for (double& v : interior_) v /= static_cast<double>(dim_ + 1);

    // One facet per dropped simplex vertex; facet f_v neighbors f_u across
    // the ridge missing both u and v.
    for (std::size_t drop = 0; drop <= dim_; ++drop) {
      Facet f;
      for (std::size_t v = 0; v <= dim_; ++v) {
        if (v != drop) f.vertices.push_back(simplex[v]);
      }
      f.neighbors.assign(dim_, 0);
      facets_.push_back(std::move(f));
    }
    for (std::size_t drop = 0; drop <= dim_; ++drop) {
      Facet& f = facets_[drop];
      for (std::size_t i = 0; i < dim_; ++i) {
        // ridge of f missing f.vertices[i]: the facet that dropped that vertex
        const std::uint32_t missing = f.vertices[i];
        for (std::size_t v = 0; v <= dim_; ++v) {
          if (simplex[v] == missing) {
            f.neighbors[i] = static_cast<std::uint32_t>(v);
            break;
          }
        }
      }
      compute_plane(f);
    }
  }

  void assign_initial_outside() {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      std::size_t best_facet = facets_.size();
      double best_dist = tol_;
      for (std::size_t f = 0; f < facets_.size(); ++f) {
        const double d = signed_distance(facets_[f], points_[i]);
        if (d > best_dist) {
          best_dist = d;
          best_facet = f;
        }
      }
      if (best_facet < facets_.size()) {
        facets_[best_facet].outside.push_back(static_cast<std::uint32_t>(i));
      }
    }
    for (std::size_t f = 0; f < facets_.size(); ++f) {
      if (!facets_[f].outside.empty()) work_.push_back(f);
    }
  }

  void process() {
    while (!work_.empty()) {
      const std::size_t fid = work_.back();
      work_.pop_back();
      Facet& f = facets_[fid];
      if (!f.alive || f.outside.empty()) continue;

      std::uint32_t apex = f.outside.front();
      double apex_dist = signed_distance(f, points_[apex]);
      for (std::size_t i = 1; i < f.outside.size(); ++i) {
        const double d = signed_distance(f, points_[f.outside[i]]);
        if (d > apex_dist) {
          apex_dist = d;
          apex = f.outside[i];
        }
      }
      insert_point(fid, apex);
    }
  }

  void insert_point(std::size_t start, std::uint32_t apex) {
    const Point& p = points_[apex];
    ++epoch_;
    std::vector<std::size_t> visible{start};
    facets_[start].visit_epoch = epoch_;
    // (facet id, ridge slot) pairs on the horizon, in DFS discovery order
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      const std::size_t fid = stack.back();
      stack.pop_back();
      for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t nid = facets_[fid].neighbors[i];
        Facet& nb = facets_[nid];
        if (nb.visit_epoch == epoch_) continue;
        if (signed_distance(nb, p) > tol_) {
          nb.visit_epoch = epoch_;
          visible.push_back(nid);
          stack.push_back(nid);
        } else {
          horizon.emplace_back(fid, i);
        }
      }
    }

    // New cone facets: one per horizon ridge, re-linked to the surviving
    // neighbor; mutual adjacency resolved through a sorted-ridge map.
    std::map<std::vector<std::uint32_t>, std::pair<std::size_t, std::size_t>> open_ridges;
    std::vector<std::size_t> created;
    for (const auto& [fid, slot] : horizon) {
      const Facet& old = facets_[fid];
      const std::size_t survivor = old.neighbors[slot];
      Facet fresh;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (i != slot) fresh.vertices.push_back(old.vertices[i]);
      }
      fresh.vertices.push_back(apex);
      fresh.neighbors.assign(dim_, 0);
      const std::size_t fresh_id = facets_.size();
      fresh.neighbors[dim_ - 1] = static_cast<std::uint32_t>(survivor);
      compute_plane(fresh);
      facets_.push_back(std::move(fresh));
      created.push_back(fresh_id);

      Facet& surv = facets_[survivor];
      for (std::size_t i = 0; i < dim_; ++i) {
        if (surv.neighbors[i] == fid) {
          surv.neighbors[i] = static_cast<std::uint32_t>(fresh_id);
          break;
        }
      }

      Facet& added = facets_[fresh_id];
      for (std::size_t i = 0; i + 1 < dim_; ++i) {
        std::vector<std::uint32_t> key;
        key.reserve(dim_ - 2);
        for (std::size_t j = 0; j + 1 < dim_; ++j) {
          if (j != i) key.push_back(added.vertices[j]);
        }
        std::sort(key.begin(), key.end());
        auto it = open_ridges.find(key);
        if (it == open_ridges.end()) {
          open_ridges.emplace(std::move(key), std::make_pair(fresh_id, i));
        } else {
          const auto [other_id, other_slot] = it->second;
          facets_[fresh_id].neighbors[i] = static_cast<std::uint32_t>(other_id);
          facets_[other_id].neighbors[other_slot] = static_cast<std::uint32_t>(fresh_id);
          open_ridges.erase(it);
        }
      }
    }
    if (!open_ridges.empty()) {
      fail(errc::degenerate_geometry,
           "convex hull horizon did not close; input is numerically degenerate");
    }

    for (std::size_t fid : visible) {
      Facet& dead = facets_[fid];
      dead.alive = false;
      for (std::uint32_t cand : dead.outside) {
        if (cand == apex) continue;
        std::size_t best_facet = facets_.size();
        double best_dist = tol_;
        for (std::size_t nf : created) {
          const double d = signed_distance(facets_[nf], points_[cand]);
          if (d > best_dist) {
            best_dist = d;
            best_facet = nf;
          }
        }
        if (best_facet < facets_.size()) {
          facets_[best_facet].outside.push_back(cand);
        }
      }
      dead.outside.clear();
    }
    for (std::size_t nf : created) {
      if (!facets_[nf].outside.empty()) work_.push_back(nf);
    }
  }
};

}  // namespace

ConvexHull build_convex_hull(const std::vector<Point>& points) {
  if (points.empty()) {
    fail(errc::invalid_argument, "convex hull needs at least one point");
  }
  const std::size_t n = points.front().size();
  if (n == 0) fail(errc::invalid_argument, "convex hull dimension must be at least 1");
  double scale = 1.0;
  for (const auto& p : points) {
    if (p.size() != n) {
      fail(errc::dimension_mismatch, "convex hull input has mixed dimensions");
    }
    for (double v : p) {
      if (!std::isfinite(v)) {
        fail(errc::invalid_argument, "convex hull input must be finite");
      }
      scale = std::max(scale, std::fabs(v));
    }
  }
  if (points.size() < n + 1) {
    fail(errc::degenerate_geometry,
         "convex hull in dimension " + std::to_string(n) + " needs at least " +
             std::to_string(n + 1) + " points");
  }
  const double tol = 1e-9 * scale;

  HullBuilder builder(points, tol);
  builder.run();
  ConvexHull hull = builder.result();

  // Every generator must sit inside the produced half-space form.
  for (const auto& p : points) {
    for (std::size_t r = 0; r < hull.facets.normals.size(); ++r) {
      if (dot(hull.facets.normals[r], p) > hull.facets.offsets[r] + tol) {
        fail(errc::degenerate_geometry,
             "convex hull construction lost a generating point");
      }
    }
  }
  return hull;
}

bool hull_contains(const ConvexHull& h, const Point& x) {
  require_dimension(h.facets.dimension(), x, "hull_contains");
  for (std::size_t r = 0; r < h.facets.normals.size(); ++r) {
    if (dot(h.facets.normals[r], x) > h.facets.offsets[r] + h.tolerance) return false;
  }
  return true;
}

}  // namespace oddforge
