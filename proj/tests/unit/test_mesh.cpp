#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>

#include "gridlearn/mesh.hpp"

using namespace gridlearn;

namespace {

std::vector<PlanarPoint> random_points(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.01, 0.99);
  std::vector<PlanarPoint> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({pos(rng), pos(rng)});
  return p;
}

std::size_t edge_count(const Mesh& m) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return edges.size();
}

void expect_valid(const Mesh& m) {
  // Counter-clockwise, area covers the square, Euler characteristic of a disk.
  for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.area(t), 0.0);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
  const auto v = static_cast<long>(m.nodes.size());
  const auto e = static_cast<long>(edge_count(m));
  const auto f = static_cast<long>(m.triangles.size());
  EXPECT_EQ(v - e + f, 1);
  // Every edge is shared by at most two triangles with opposite directions.
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::pair<std::size_t, std::size_t> edge{t[k], t[(k + 1) % 3]};
      EXPECT_EQ(++directed[edge], 1);
    }
  }
}

}  // namespace

TEST(Mesh, Orient2dAndIncircleSigns) {
  const PlanarPoint a{0, 0}, b{1, 0}, c{0, 1};
  EXPECT_DOUBLE_EQ(orient2d(a, b, c), 1.0);
  EXPECT_DOUBLE_EQ(orient2d(a, c, b), -1.0);
  EXPECT_GT(incircle(a, b, c, {0.5, 0.5}), 0.0);
  EXPECT_LT(incircle(a, b, c, {2.0, 2.0}), 0.0);
  EXPECT_NEAR(incircle(a, b, c, {1.0, 1.0}), 0.0, 1e-15);
}

TEST(Mesh, MinimalMeshOfOneGenerator) {
  const Mesh m = build_mesh({{0.5, 0.5}}, 1);
  EXPECT_EQ(m.nodes.size(), 5u);
  EXPECT_EQ(m.triangles.size(), 4u);
  expect_valid(m);
  std::size_t boundary = 0;
  for (bool b : m.boundary) boundary += b ? 1 : 0;
  EXPECT_EQ(boundary, 4u);
}

TEST(Mesh, BoundaryNodesCoverEdges) {
  const auto nodes = square_boundary_nodes(3);
  EXPECT_EQ(nodes.size(), 12u);
  for (const auto& p : nodes) {
    const bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    EXPECT_TRUE(on_edge);
  }
  EXPECT_EQ(default_boundary_per_side(50), 8u);
  EXPECT_EQ(default_boundary_per_side(49), 7u);
}

TEST(Mesh, RandomMeshesAreDelaunay) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto gens = random_points(200, seed);
    const Mesh m = build_mesh(gens, default_boundary_per_side(gens.size()));
    EXPECT_EQ(m.nodes.size(), gens.size() + 4 * default_boundary_per_side(gens.size()));
    expect_valid(m);
    // Empty circumcircle, with a tolerance relative to the incircle scale.
    for (const auto& t : m.triangles) {
      for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (i == t[0] || i == t[1] || i == t[2]) continue;
        EXPECT_LE(incircle(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]], m.nodes[i]), 1e-12);
      }
    }
  }
}

TEST(Mesh, CocircularLatticeTriangulates) {
  std::vector<PlanarPoint> gens;
  for (int i = 1; i < 10; ++i) {
    for (int j = 1; j < 10; ++j) gens.push_back({0.1 * i, 0.1 * j});
  }
  const Mesh m = build_mesh(gens, 10);
  expect_valid(m);
}

TEST(Mesh, DuplicateGeneratorRecoversByJitter) {
  auto gens = random_points(30, 4);
  gens.push_back(gens[3]);
  const Mesh m = build_mesh(gens, 6);
  expect_valid(m);
}

TEST(Mesh, DelaunayRejectsCollinearInput) {
  EXPECT_THROW(delaunay_triangulate({{0, 0}, {0.5, 0.5}, {1, 1}}), std::runtime_error);
}

TEST(Mesh, LocateReturnsConsistentBarycentrics) {
  const Mesh m = build_mesh(random_points(100, 8), 10);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const PlanarPoint p{pos(rng), pos(rng)};
    const auto loc = locate(m, p);
    ASSERT_TRUE(loc.has_value());
    double sum = 0.0, x = 0.0, y = 0.0;
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(loc->barycentric[k], 0.0);
      sum += loc->barycentric[k];
      x += loc->barycentric[k] * m.nodes[m.triangles[loc->triangle][k]].x;
      y += loc->barycentric[k] * m.nodes[m.triangles[loc->triangle][k]].y;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(x, p.x, 1e-12);
    EXPECT_NEAR(y, p.y, 1e-12);
  }
  EXPECT_FALSE(locate(m, {1.5, 0.5}).has_value());
}

TEST(Mesh, LocateAtNodeIsExactUnitVector) {
  const Mesh m = build_mesh(random_points(40, 9), 6);
  for (std::size_t n = 0; n < m.nodes.size(); ++n) {
    const auto loc = locate(m, m.nodes[n]);
    ASSERT_TRUE(loc.has_value());
    int ones = 0;
    for (int k = 0; k < 3; ++k) {
      if (m.triangles[loc->triangle][k] == n) {
        EXPECT_EQ(loc->barycentric[k], 1.0);
        ++ones;
      } else {
        EXPECT_EQ(loc->barycentric[k], 0.0);
      }
    }
    EXPECT_EQ(ones, 1);
  }
}
