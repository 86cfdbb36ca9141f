#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "gridlearn/mesh.hpp"

namespace gridlearn {

double Mesh::area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * orient2d(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

double Mesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += area(t);
  return s;
}

double orient2d(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c,
                const PlanarPoint& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
         clift * (adx * bdy - bdx * ady);
}

namespace {

bool is_corner(const PlanarPoint& p, double x, double y) { return p.x == x && p.y == y; }

}  // namespace

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

struct EdgeHash {
  std::size_t operator()(const Edge& e) const {
    return std::hash<std::size_t>{}(e.first * 0x9e3779b97f4a7c15ULL ^ e.second);
  }
};

// p lies on the closed segment ab, given orient2d(a, b, p) == 0.
bool on_segment(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

class Triangulation {
 public:
  explicit Triangulation(const std::vector<PlanarPoint>& points) : points_(points) {}

  void add(const Triangle& t) {
    const std::size_t id = tris_.size();
    tris_.push_back(t);
    alive_.push_back(true);
    for (int e = 0; e < 3; ++e) owner_[{t[e], t[(e + 1) % 3]}] = id;
  }

  void insert(std::size_t i) {
    const auto& p = points_[i];
    const std::size_t seed = containing(p);

    // Conflict region grown through shared edges from the containing triangle.
    std::set<std::size_t> cavity{seed};
    std::vector<std::size_t> stack{seed};
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; ++e) {
        const auto n = neighbour(t, e);
        if (!n || cavity.count(*n)) continue;
        const auto& tr = tris_[*n];
        if (incircle(points_[tr[0]], points_[tr[1]], points_[tr[2]], p) > 0.0) {
          cavity.insert(*n);
          stack.push_back(*n);
        }
      }
    }

    // Rounding can make the region non-star-shaped from p. Drop triangles
    // owning an edge p cannot see, and pull in the neighbour across an edge
    // p lies on, until every boundary edge is valid.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t t : std::vector<std::size_t>(cavity.begin(), cavity.end())) {
        if (!cavity.count(t)) continue;
        const auto& tr = tris_[t];
        for (int e = 0; e < 3; ++e) {
          const auto n = neighbour(t, e);
          if (n && cavity.count(*n)) continue;
          const auto& a = points_[tr[e]];
          const auto& b = points_[tr[(e + 1) % 3]];
          const double o = orient2d(a, b, p);
          if (o > 0.0) continue;
          if (o == 0.0 && on_segment(a, b, p)) {
            if (!n) continue;  // p splits a hull edge
            cavity.insert(*n);
          } else {
            if (t == seed) throw std::runtime_error("triangulation cavity is not star-shaped");
            cavity.erase(t);
          }
          changed = true;
          break;
        }
      }
      if (changed) keep_connected(cavity, seed);
    }

    std::vector<Edge> boundary;
    for (std::size_t t : cavity) {
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e) {
        const auto n = neighbour(t, e);
        if (!n || !cavity.count(*n)) boundary.emplace_back(tr[e], tr[(e + 1) % 3]);
      }
    }
    for (std::size_t t : cavity) retire(t);
    for (const auto& [a, b] : boundary) {
      if (orient2d(points_[a], points_[b], p) > 0.0) add({a, b, i});
    }
  }

  std::vector<Triangle> triangles() const {
    std::vector<Triangle> out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (alive_[t]) out.push_back(tris_[t]);
    }
    return out;
  }

 private:
  std::size_t containing(const PlanarPoint& p) const {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      const auto& a = points_[tr[0]];
      const auto& b = points_[tr[1]];
      const auto& c = points_[tr[2]];
      if (orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0) {
        if ((a.x == p.x && a.y == p.y) || (b.x == p.x && b.y == p.y) || (c.x == p.x && c.y == p.y)) {
          throw std::runtime_error("duplicate or degenerate triangulation point");
        }
        return t;
      }
    }
    throw std::runtime_error("triangulation point not inside the current hull");
  }

  std::optional<std::size_t> neighbour(std::size_t t, int e) const {
    const auto& tr = tris_[t];
    const auto it = owner_.find({tr[(e + 1) % 3], tr[e]});
    if (it == owner_.end()) return std::nullopt;
    return it->second;
  }

  void retire(std::size_t t) {
    alive_[t] = false;
    const auto& tr = tris_[t];
    for (int e = 0; e < 3; ++e) {
      const auto it = owner_.find({tr[e], tr[(e + 1) % 3]});
      if (it != owner_.end() && it->second == t) owner_.erase(it);
    }
  }

  void keep_connected(std::set<std::size_t>& cavity, std::size_t seed) const {
    std::set<std::size_t> reached{seed};
    std::vector<std::size_t> stack{seed};
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; ++e) {
        const auto n = neighbour(t, e);
        if (n && cavity.count(*n) && reached.insert(*n).second) stack.push_back(*n);
      }
    }
    cavity = std::move(reached);
  }

  const std::vector<PlanarPoint>& points_;
  std::vector<Triangle> tris_;
  std::vector<bool> alive_;
  std::unordered_map<Edge, std::size_t, EdgeHash> owner_;
};

}  // namespace

// Bowyer-Watson seeded with the two triangles of the unit square, so every
// later insertion lies inside the current hull. Points on the square's edges
// split a hull edge; the degenerate triangle that would join them to that
// edge is skipped.
std::vector<Triangle> delaunay_triangulate(const std::vector<PlanarPoint>& points) {
  std::array<std::size_t, 4> corner{};
  std::array<bool, 4> found{};
  const double cx[4] = {0.0, 1.0, 1.0, 0.0};
  const double cy[4] = {0.0, 0.0, 1.0, 1.0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::runtime_error("triangulation point outside the unit square");
    }
    for (int c = 0; c < 4; ++c) {
      if (is_corner(p, cx[c], cy[c])) {
        if (found[c]) throw std::runtime_error("duplicate corner node");
        corner[c] = i;
        found[c] = true;
      }
    }
  }
  if (!std::all_of(found.begin(), found.end(), [](bool f) { return f; })) {
    throw std::runtime_error("triangulation needs the four corners of the unit square");
  }

  Triangulation tri(points);
  tri.add({corner[0], corner[1], corner[2]});
  tri.add({corner[0], corner[2], corner[3]});
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::find(corner.begin(), corner.end(), i) == corner.end()) tri.insert(i);
  }
  return tri.triangles();
}

std::vector<PlanarPoint> square_boundary_nodes(std::size_t per_side) {
  if (per_side == 0) throw ContractError("boundary needs at least one segment per side");
  const double n = static_cast<double>(per_side);
  std::vector<PlanarPoint> out;
  out.reserve(4 * per_side);
  for (std::size_t i = 0; i < per_side; ++i) out.push_back({static_cast<double>(i) / n, 0.0});
  for (std::size_t i = 0; i < per_side; ++i) out.push_back({1.0, static_cast<double>(i) / n});
  for (std::size_t i = 0; i < per_side; ++i) out.push_back({1.0 - static_cast<double>(i) / n, 1.0});
  for (std::size_t i = 0; i < per_side; ++i) out.push_back({0.0, 1.0 - static_cast<double>(i) / n});
  return out;
}

std::size_t default_boundary_per_side(std::size_t k) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
}

namespace {

Mesh try_build(const std::vector<PlanarPoint>& generators, std::size_t per_side) {
  Mesh mesh;
  mesh.nodes = square_boundary_nodes(per_side);
  mesh.boundary.assign(mesh.nodes.size(), true);
  mesh.nodes.insert(mesh.nodes.end(), generators.begin(), generators.end());
  mesh.boundary.resize(mesh.nodes.size(), false);
  mesh.triangles = delaunay_triangulate(mesh.nodes);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!(mesh.area(t) > 0.0)) throw std::runtime_error("mesh contains a degenerate triangle");
  }
  if (std::abs(mesh.total_area() - 1.0) > 1e-9) {
    throw std::runtime_error("mesh does not tile the unit square");
  }
  return mesh;
}

}  // namespace

Mesh build_mesh(const std::vector<PlanarPoint>& generators, std::size_t boundary_per_side) {
  for (const auto& g : generators) {
    if (!(g.x > 0.0 && g.x < 1.0 && g.y > 0.0 && g.y < 1.0)) {
      throw ContractError("mesh generators must lie inside the unit square");
    }
  }
  try {
    return try_build(generators, boundary_per_side);
  } catch (const std::runtime_error&) {
    std::mt19937_64 rng(generators.size());
    std::uniform_real_distribution<double> jitter(-1e-12, 1e-12);
    auto moved = generators;
    for (auto& g : moved) {
      g.x = std::clamp(g.x + jitter(rng), 1e-12, 1.0 - 1e-12);
      g.y = std::clamp(g.y + jitter(rng), 1e-12, 1.0 - 1e-12);
    }
    return try_build(moved, boundary_per_side);
  }
}

std::optional<PointLocation> locate(const Mesh& mesh, const PlanarPoint& p) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int v = 0; v < 3; ++v) {
      const auto& n = mesh.nodes[tr[v]];
      if (n.x == p.x && n.y == p.y) {
        PointLocation loc{t, {0.0, 0.0, 0.0}};
        loc.barycentric[v] = 1.0;
        return loc;
      }
    }
  }
  constexpr double kTol = 1e-12;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const auto& a = mesh.nodes[tr[0]];
    const auto& b = mesh.nodes[tr[1]];
    const auto& c = mesh.nodes[tr[2]];
    const double total = orient2d(a, b, c);
    std::array<double, 3> l{orient2d(b, c, p) / total, orient2d(c, a, p) / total,
                            orient2d(a, b, p) / total};
    if (l[0] < -kTol || l[1] < -kTol || l[2] < -kTol) continue;
    double s = 0.0;
    for (auto& v : l) {
      v = std::max(v, 0.0);
      s += v;
    }
    for (auto& v : l) v /= s;
    return PointLocation{t, l};
  }
  return std::nullopt;
}

}  // namespace gridlearn
