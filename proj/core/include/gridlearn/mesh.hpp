#pragma once

// Triangle meshes of the unit square: Bowyer-Watson Delaunay triangulation,
// boundary augmentation and point location.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "gridlearn/core.hpp"

namespace gridlearn {

using Triangle = std::array<std::size_t, 3>;

struct Mesh {
  std::vector<PlanarPoint> nodes;
  std::vector<Triangle> triangles;  // counter-clockwise
  std::vector<bool> boundary;       // per node, true on the square's edges

  double area(std::size_t t) const;
  double total_area() const;
};

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
double orient2d(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c);

/// Positive when d lies strictly inside the circumcircle of the
/// counter-clockwise triangle (a, b, c).
double incircle(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c,
                const PlanarPoint& d);

/// Delaunay triangulation of a point set (at least three non-collinear
/// points). Throws std::runtime_error on degenerate input.
std::vector<Triangle> delaunay_triangulate(const std::vector<PlanarPoint>& points);

/// Evenly spaced nodes on the boundary of the unit square: `per_side` segments
/// on each edge, corners included once, 4 * per_side nodes in total.
std::vector<PlanarPoint> square_boundary_nodes(std::size_t per_side);

/// Generators plus 4 * boundary_per_side boundary nodes, triangulated. A
/// degenerate configuration is jittered by 1e-12 and retried once.
Mesh build_mesh(const std::vector<PlanarPoint>& generators, std::size_t boundary_per_side);

/// Boundary resolution used with k generators: ceil(sqrt(k)) segments per side.
std::size_t default_boundary_per_side(std::size_t k);

struct PointLocation {
  std::size_t triangle = 0;
  std::array<double, 3> barycentric{};  // nonnegative, summing to one
};

/// Containing triangle by linear scan. A point coinciding with a node gets the
/// exact unit barycentric vector for that node.
std::optional<PointLocation> locate(const Mesh& mesh, const PlanarPoint& p);

}  // namespace gridlearn
