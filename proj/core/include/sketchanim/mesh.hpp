#pragma once

#include "sketchanim/body_group.hpp"
#include "sketchanim/geometry.hpp"
#include "sketchanim/segment.hpp"

#include <array>
#include <vector>

namespace sketchanim {

/// Textured 2D triangle mesh in pixel units. Triangles have positive signed
/// area in the pixel frame; `groups` holds one body-part label per triangle.
struct CharacterMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Point2> uvs;
  std::vector<BodyGroup> groups;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  Point2 centroid(std::size_t tri) const {
    const auto& t = triangles[tri];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }
};

struct TriangulateOptions {
  /// Upper bound on triangle area in px^2. Zero selects polygon area / 500;
  /// infinity disables refinement.
  double max_area = 0.0;
  /// Drop triangles whose centroid falls outside the mask.
  bool cull_outside_mask = true;
  /// Safety cap on Steiner insertions.
  std::size_t max_vertices = 200000;
};

/// Constrained Delaunay triangulation of the polygon, refined with interior
/// Steiner points until no triangle exceeds max_area. Throws
/// degenerate_polygon when the polygon has (near) zero area.
CharacterMesh triangulate(const Polygon& poly, const BinaryMask& mask,
                          const TriangulateOptions& options = {});

double triangle_area(const CharacterMesh& mesh, std::size_t tri);
/// Sum of unsigned triangle areas.
double mesh_area(const CharacterMesh& mesh);

/// Number of components when triangles sharing a vertex are joined; vertices
/// unused by any triangle count as their own component.
int connected_components(const CharacterMesh& mesh);

}  // namespace sketchanim
