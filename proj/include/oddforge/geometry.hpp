#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace oddforge {

using Point = std::vector<double>;

// Intersection of half-spaces {x : A x <= b}. Rows of `normals` are the
// hyperplane normal vectors, `offsets` the right-hand sides. Membership is
// closed: points on a bounding hyperplane are inside.
struct ConvexPolytope {
  std::vector<std::vector<double>> normals;
  std::vector<double> offsets;

  std::size_t dimension() const;
  void validate() const;

  static ConvexPolytope box(const std::vector<double>& lower,
                            const std::vector<double>& upper);
};

bool polytope_contains(const ConvexPolytope& p, const Point& x);

// Union of convex polytopes of equal dimension. Parts are expected to be
// pairwise non-intersecting but this is not verified; membership does not
// depend on overlap.
struct OddPolytope {
  std::vector<ConvexPolytope> parts;

  std::size_t dimension() const;
  void validate() const;
};

bool odd_polytope_contains(const OddPolytope& p, const Point& x);

enum class Sense { GreaterEqual, LessEqual };

struct PolynomialTerm {
  double coefficient = 0.0;
  std::vector<int> exponents;
};

// Polynomial inequality sum_t c_t * prod_k x_k^e_tk  (>= 0 or <= 0).
// Terms are kept sorted by exponent vector and summed in that order, so
// evaluation is independent of how the terms were supplied.
struct PolynomialInequality {
  std::vector<PolynomialTerm> terms;
  Sense sense = Sense::GreaterEqual;

  static PolynomialInequality make(std::vector<PolynomialTerm> terms, Sense sense);

  std::size_t dimension() const;
  void validate() const;
  double evaluate(const Point& x) const;
};

int relationship_holds(const PolynomialInequality& rel, const Point& x);

// Ground-truth ODD structure: a taxonomy polytope plus a conjunction of
// polynomial relationships. Used as the exact membership oracle in the
// Monte-Carlo validation.
struct GroundTruthOdd {
  OddPolytope taxonomy;
  std::vector<PolynomialInequality> ontology;

  std::size_t dimension() const;
  void validate() const;
};

bool ground_truth_contains(const GroundTruthOdd& gt, const Point& x);

GroundTruthOdd ground_truth_from_json_text(const std::string& text);
GroundTruthOdd load_ground_truth(const std::string& path);

// Also extracts the spec's `box` bounds (for samplers); the out-vectors are
// left empty when the file defines no box.
GroundTruthOdd load_ground_truth(const std::string& path,
                                 std::vector<double>* box_lower,
                                 std::vector<double>* box_upper);

// Convex hull in half-space form. Facet normals are unit length, so
// `facets.normals[i] . x - offsets[i]` is a signed distance. `tolerance`
// is 1e-9 times the largest coordinate magnitude of the generators
// (floored at 1) and is the slack used by hull_contains.
struct ConvexHull {
  std::vector<Point> vertices;
  ConvexPolytope facets;
  double tolerance = 0.0;
};

ConvexHull build_convex_hull(const std::vector<Point>& points);
bool hull_contains(const ConvexHull& h, const Point& x);

}  // namespace oddforge
