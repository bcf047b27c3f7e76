#ifndef STRIPES_MESH_HPP
#define STRIPES_MESH_HPP

// Conforming triangulations of planar domains (primarily ellipses), with the
// geometric queries needed by the P1 assembler: boundary distances and
// per-face hat-function gradients.

#include "stripes/types.hpp"

#include <string>
#include <vector>

namespace stripes {

struct Triangulation {
  Eigen::MatrixX2d vertices;
  Eigen::MatrixX3i faces;  // counterclockwise vertex triples

  Eigen::VectorXi boundary_vertices;  // ascending
  Eigen::VectorXi interior_vertices;  // ascending, size n = |V0|
  Eigen::VectorXi interior_index;     // per vertex: 0..n-1, or -1 on the boundary
  Eigen::VectorXd face_areas;
  Eigen::MatrixX3i face_adjacency;  // neighbor across the edge opposite corner k, -1 if none
  Eigen::MatrixX2i boundary_edges;
  Eigen::VectorXi boundary_loop;  // one closed walk over the boundary vertices
  std::vector<std::vector<int>> vertex_adjacency;
  std::vector<std::vector<int>> vertex_faces;

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }
  int interior_count() const { return static_cast<int>(interior_vertices.size()); }
  bool is_boundary_vertex(int v) const { return interior_index(v) < 0; }

  // Builds connectivity, areas and boundary data from raw vertices/faces and
  // runs the validity audit; throws std::runtime_error on an invalid mesh.
  static Triangulation from_data(Eigen::MatrixX2d vertices, Eigen::MatrixX3i faces);
};

// Structured right-triangle grid clipped to the ellipse, boundary vertices
// snapped onto it, then faces failing the quality bounds (min angle 20 deg,
// max edge 1.5 * target_edge) are dropped.
Triangulation build_ellipse_mesh(double semi_major, double semi_minor, double target_edge);

// Exact Euclidean distance from a vertex to the polygonal boundary.
double boundary_distance(const Triangulation& tri, int vertex_index);
Vector boundary_distance_field(const Triangulation& tri);  // all vertices

// Row f holds the three constant hat gradients (gx0, gy0, gx1, gy1, gx2, gy2).
Eigen::Matrix<double, Eigen::Dynamic, 6> face_gradient_geometry(const Triangulation& tri);

struct MeshQuality {
  double min_angle;  // radians
  double max_edge;
  int edge_count;
};
MeshQuality mesh_quality(const Triangulation& tri);

// Validity audit; returns one message per violated invariant (empty = valid).
std::vector<std::string> audit_mesh(const Triangulation& tri);

// Area of the polygonal domain by the shoelace formula on the boundary loop.
double polygon_area(const Triangulation& tri);

// Plain-text node/element format: counts header, vertex coordinates,
// face triples, boundary vertex indices.
void save_mesh(const Triangulation& tri, const std::string& path);
Triangulation load_mesh(const std::string& path);

// Closest point on the ellipse (x/a)^2 + (y/b)^2 = 1.
Vector2 closest_ellipse_point(double a, double b, const Vector2& p);

double point_segment_distance(const Vector2& p, const Vector2& a, const Vector2& b);

}  // namespace stripes

#endif
