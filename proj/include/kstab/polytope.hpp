#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/linalg.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// k+1 affinely independent points in Q^dim.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw Error(ErrorCode::DegenerateSimplex, "simplex without vertices");
    for (const auto& v : vertices_) require_same_dim(vertices_.front().size(), v.size(), "simplex vertex");
    if (affine_dimension(vertices_) != static_cast<long>(vertices_.size()) - 1) {
      throw Error(ErrorCode::DegenerateSimplex, "simplex vertices are affinely dependent");
    }
  }

  std::size_t ambient_dim() const { return vertices_.front().size(); }
  std::size_t simplex_dim() const { return vertices_.size() - 1; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }

  /// Columns v_i - v_0, i = 1..k.
  Matrix edge_matrix() const {
    std::vector<Point> cols;
    for (std::size_t i = 1; i < vertices_.size(); ++i) cols.push_back(vertices_[i] - vertices_[0]);
    return Matrix::from_columns(cols, ambient_dim());
  }

  Point centroid() const {
    Point c(ambient_dim());
    for (const auto& v : vertices_) c = c + v;
    return Rational(1, static_cast<long>(vertices_.size())) * c;
  }

 private:
  std::vector<Point> vertices_;
};

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// A compact polytope P = {L_j >= 0} together with its chosen labels. The
/// labels are authoritative: the vertex list and facet incidence are derived.
class LabelledPolytope {
 public:
  /// Builds the polytope, enumerating vertices exactly. With
  /// `drop_redundant`, labels that do not support a facet are removed instead
  /// of triggering RedundantLabel.
  static LabelledPolytope from_halfspaces(std::vector<AffineFunc> labels, bool drop_redundant = false) {
    if (labels.empty()) throw Error(ErrorCode::InvalidInput, "a polytope needs at least one label");
    const std::size_t dim = labels.front().dim();
    for (const auto& l : labels) require_same_dim(dim, l.dim(), "label");

    std::vector<Point> grads;
    for (const auto& l : labels) grads.push_back(l.gradient());
    const Matrix g = Matrix::from_rows(grads);
    if (rank(g) < dim) throw Error(ErrorCode::UnboundedPolytope, "label gradients do not span the space");
    if (auto ray = recession_direction(g)) {
      throw Error(ErrorCode::UnboundedPolytope, "recession direction " + to_string(*ray));
    }

    std::vector<Point> vertices = enumerate_vertices(labels, dim);
    if (vertices.empty() || affine_dimension(vertices) < static_cast<long>(dim)) {
      throw Error(ErrorCode::EmptyInterior, "the labels cut out a set with empty interior");
    }

    LabelledPolytope p;
    p.dim_ = dim;
    p.vertices_ = std::move(vertices);

    std::vector<AffineFunc> kept;
    std::vector<std::vector<std::size_t>> incidence;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      std::vector<std::size_t> on;
      std::vector<Point> pts;
      for (std::size_t v = 0; v < p.vertices_.size(); ++v) {
        if (labels[j](p.vertices_[v]) == 0) {
          on.push_back(v);
          pts.push_back(p.vertices_[v]);
        }
      }
      bool redundant = affine_dimension(pts) != static_cast<long>(dim) - 1;
      std::string why = "zero set meets P in dimension " + std::to_string(affine_dimension(pts));
      if (!redundant) {
        for (std::size_t i = 0; i < incidence.size(); ++i) {
          if (incidence[i] == on) {
            redundant = true;
            why = "supports the same facet as an earlier label";
          }
        }
      }
      if (redundant) {
        if (drop_redundant) continue;
        throw Error(ErrorCode::RedundantLabel, "label " + std::to_string(j) + ": " + why);
      }
      kept.push_back(labels[j]);
      incidence.push_back(std::move(on));
    }
    p.labels_ = std::move(kept);
    p.facets_ = std::move(incidence);
    return p;
  }

  std::size_t dim() const { return dim_; }
  std::size_t num_facets() const { return labels_.size(); }
  const std::vector<AffineFunc>& labels() const { return labels_; }
  const AffineFunc& label(std::size_t j) const { return labels_.at(j); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::size_t>& facet(std::size_t j) const {
    if (j >= facets_.size()) throw Error(ErrorCode::InvalidFacet, "facet index " + std::to_string(j));
    return facets_[j];
  }
  const std::vector<std::vector<std::size_t>>& facet_incidence() const { return facets_; }

  bool contains(const Point& x) const {
    for (const auto& l : labels_)
      if (l(x) < 0) return false;
    return true;
  }

  bool is_interior(const Point& x) const {
    require_same_dim(dim_, x.size(), "point");
    for (const auto& l : labels_)
      if (l(x) <= 0) return false;
    return true;
  }

  Point vertex_centroid() const {
    Point c(dim_);
    for (const auto& v : vertices_) c = c + v;
    return Rational(1, static_cast<long>(vertices_.size())) * c;
  }

  /// Facets (label indices) through vertex v.
  std::vector<std::size_t> facets_at(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < facets_.size(); ++j)
      if (std::binary_search(facets_[j].begin(), facets_[j].end(), v)) out.push_back(j);
    return out;
  }

  /// Every vertex lies on exactly dim facets.
  bool is_simple() const {
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (facets_at(v).size() != dim_) return false;
    return true;
  }

  /// Simple, integral labels, and at each vertex the incident gradients form
  /// a basis of Z^dim. Diagnostic only.
  bool is_delzant() const {
    if (!is_simple()) return false;
    for (const auto& l : labels_)
      for (const auto& g : l.gradient())
        if (denominator_of(g) != 1) return false;
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      std::vector<Point> rows;
      for (auto j : facets_at(v)) rows.push_back(labels_[j].gradient());
      if (abs(determinant(Matrix::from_rows(rows))) != 1) return false;
    }
    return true;
  }

 private:
  static std::optional<Point> recession_direction(const Matrix& g) {
    const std::size_t dim = g.cols();
    std::optional<Point> found;
    detail::for_each_subset(g.rows(), dim - 1, [&](const std::vector<std::size_t>& rows) {
      if (found) return;
      Matrix sub(dim - 1, dim);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < dim; ++c) sub(r, c) = g(rows[r], c);
      const auto ker = null_space(sub);
      if (ker.size() != 1) return;
      for (const Rational& s : {Rational(1), Rational(-1)}) {
        const Point d = s * ker.front();
        const Point gd = g * d;
        if (std::all_of(gd.begin(), gd.end(), [](const Rational& x) { return x >= 0; })) found = d;
      }
    });
    return found;
  }

  static std::vector<Point> enumerate_vertices(const std::vector<AffineFunc>& labels, std::size_t dim) {
    std::set<Point> out;
    detail::for_each_subset(labels.size(), dim, [&](const std::vector<std::size_t>& rows) {
      Matrix a(dim, dim);
      Point b(dim);
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) a(r, c) = labels[rows[r]].gradient()[c];
        b[r] = -labels[rows[r]].constant();
      }
      auto x = solve(a, b);
      if (!x) return;
      for (const auto& l : labels)
        if (l(*x) < 0) return;
      out.insert(std::move(*x));
    });
    return {out.begin(), out.end()};
  }

  std::size_t dim_ = 0;
  std::vector<AffineFunc> labels_;
  std::vector<Point> vertices_;
  std::vector<std::vector<std::size_t>> facets_;
};

/// Triangulates the face spanned by `face` (sorted vertex indices of P, of
/// affine dimension k) by pulling from its lowest-indexed vertex and recursing
/// on the subfaces that avoid it. Returns simplices as vertex-index lists.
inline std::vector<std::vector<std::size_t>> triangulate_face_indices(const LabelledPolytope& p,
                                                                       const std::vector<std::size_t>& face,
                                                                       std::size_t k) {
  if (k == 0) return {{face.front()}};
  if (face.size() == k + 1) return {face};
  const std::size_t apex = face.front();
  std::vector<std::vector<std::size_t>> subfaces;
  for (const auto& inc : p.facet_incidence()) {
    std::vector<std::size_t> sub;
    std::set_intersection(face.begin(), face.end(), inc.begin(), inc.end(), std::back_inserter(sub));
    if (sub.size() == face.size() || std::binary_search(sub.begin(), sub.end(), apex)) continue;
    std::vector<Point> pts;
    for (auto v : sub) pts.push_back(p.vertices()[v]);
    if (affine_dimension(pts) != static_cast<long>(k) - 1) continue;
    subfaces.push_back(std::move(sub));
  }
  std::sort(subfaces.begin(), subfaces.end());
  subfaces.erase(std::unique(subfaces.begin(), subfaces.end()), subfaces.end());
  std::vector<std::vector<std::size_t>> out;
  for (const auto& sub : subfaces) {
    for (auto s : triangulate_face_indices(p, sub, k - 1)) {
      s.insert(s.begin(), apex);
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline std::vector<Simplex> to_simplices(const LabelledPolytope& p, const std::vector<std::vector<std::size_t>>& cells) {
  std::vector<Simplex> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    std::vector<Point> pts;
    for (auto v : c) pts.push_back(p.vertices()[v]);
    out.emplace_back(std::move(pts));
  }
  return out;
}

/// (dim-1)-simplices triangulating facet j.
inline std::vector<Simplex> triangulate_facet(const LabelledPolytope& p, std::size_t j) {
  return to_simplices(p, triangulate_face_indices(p, p.facet(j), p.dim() - 1));
}

/// A triangulation of P using only its vertices.
inline std::vector<Simplex> triangulate(const LabelledPolytope& p) {
  std::vector<std::size_t> all(p.vertices().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return to_simplices(p, triangulate_face_indices(p, all, p.dim()));
}

struct ConeDecomposition {
  Point apex;
  /// cells[j]: dim-simplices whose first vertex is the apex and whose
  /// remaining vertices triangulate facet j.
  std::vector<std::vector<Simplex>> cells;
};

inline ConeDecomposition cone_decomposition(const LabelledPolytope& p, const Point& x0) {
  if (!p.is_interior(x0)) throw Error(ErrorCode::NotInterior, "apex " + to_string(x0) + " is not interior");
  ConeDecomposition cd;
  cd.apex = x0;
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    std::vector<Simplex> cone;
    for (const auto& base : triangulate_facet(p, j)) {
      std::vector<Point> pts{x0};
      pts.insert(pts.end(), base.vertices().begin(), base.vertices().end());
      cone.emplace_back(std::move(pts));
    }
    cd.cells.push_back(std::move(cone));
  }
  return cd;
}

struct MonotonePoint {
  Point x0;
  Rational t;
};

/// The point where all labels agree, when it exists and is unique.
inline std::optional<MonotonePoint> monotone_point(const LabelledPolytope& p) {
  const std::size_t dim = p.dim();
  Matrix a(p.num_facets(), dim + 1);
  Point b(p.num_facets());
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    for (std::size_t i = 0; i < dim; ++i) a(j, i) = p.label(j).gradient()[i];
    a(j, dim) = -1;
    b[j] = -p.label(j).constant();
  }
  auto sol = solve_unique(a, b);
  if (!sol) return std::nullopt;
  MonotonePoint mp{Point(sol->begin(), sol->begin() + static_cast<long>(dim)), (*sol)[dim]};
  if (mp.t <= 0 || !p.is_interior(mp.x0)) return std::nullopt;
  return mp;
}

/// P intersected with {h >= 0}; original labels are kept verbatim where they
/// still support a facet.
inline LabelledPolytope clip(const LabelledPolytope& p, const AffineFunc& h) {
  require_same_dim(p.dim(), h.dim(), "clip hyperplane");
  auto labels = p.labels();
  labels.push_back(h);
  return LabelledPolytope::from_halfspaces(std::move(labels), true);
}

/// The dim-simplex {x_i + t >= 0, t - sum x_i >= 0}.
inline LabelledPolytope standard_fiber_polytope(std::size_t dim, const Rational& t) {
  if (dim == 0) throw Error(ErrorCode::InvalidInput, "fiber dimension must be positive");
  if (t <= 0) throw Error(ErrorCode::InvalidInput, "fiber scale t must be positive, got " + to_string(t));
  std::vector<AffineFunc> labels;
  for (std::size_t i = 0; i < dim; ++i) {
    Point g(dim);
    g[i] = 1;
    labels.emplace_back(g, t);
  }
  labels.emplace_back(Point(dim, Rational(-1)), t);
  return LabelledPolytope::from_halfspaces(std::move(labels));
}

/// Axis-aligned box prod [lo_i, hi_i].
inline LabelledPolytope box_polytope(const Point& lo, const Point& hi) {
  require_same_dim(lo.size(), hi.size(), "box bounds");
  std::vector<AffineFunc> labels;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    Point g(lo.size());
    g[i] = 1;
    labels.emplace_back(g, -lo[i]);
    g[i] = -1;
    labels.emplace_back(g, hi[i]);
  }
  return LabelledPolytope::from_halfspaces(std::move(labels));
}

}  // namespace kstab
