#ifndef STRIPES_GAUGE_HPP
#define STRIPES_GAUGE_HPP

// Topological post-processing of phase fields: the discrete singular band,
// strip decomposition with induced orientations, gauge representatives, and
// disclination detection. All fields here are full per-vertex vectors.

#include "stripes/bregman.hpp"
#include "stripes/mesh.hpp"

#include <vector>

namespace stripes {

struct Strip {
  std::vector<int> faces;
  double theta_lo = 0.0;     // snapped lower phase value (multiple of pi)
  double theta_hi = 0.0;     // snapped upper phase value = theta_lo + pi
  double theta_plus = 0.0;   // side where cos theta = +1
  double theta_minus = 0.0;  // side where cos theta = -1
  bool degenerate = false;   // snapping failed; no phase interval assigned
  int orientation = 0;       // -1, 0 (undetermined), +1
  std::vector<Vector2> contour;  // traced mid-level polyline (counterclockwise when closed)
  bool contour_closed = false;
};

struct StripDecomposition {
  Eigen::VectorXi face_labels;  // per face: strip id, or -1 inside the singular band
  std::vector<Strip> strips;
  double tol = 0.3;
};

// Faces on which min_vertex |sin theta| < tol: the thickened zero set of sin.
std::vector<int> singular_band(const Triangulation& tri, const Vector& theta_full, double tol);

StripDecomposition decompose_strips(const Triangulation& tri, const Vector& theta_full, double tol);

// Traces each strip's mid-level contour and votes sgn(n . grad theta) along
// it; fills Strip::orientation/contour and returns the per-strip values.
std::vector<int> strip_orientation(const Triangulation& tri, const Vector& theta_full,
                                   StripDecomposition& strips);

// Perimeter of the interface between strips of opposite nonzero orientation
// (strip labels extended across the band by nearest-strip traversal).
double orientation_defect(const StripDecomposition& strips, const Triangulation& tri);

// Componentwise arccos(cos theta), values in [0, pi].
Vector canonical_representative(const Vector& theta);

// Gauge-equivalent phase realizing the requested per-strip orientations:
// sum_i eps(i) gamma(i) psi_i - c0, built vertex-wise. Preserves cos theta
// and vanishes on the boundary.
Vector reorient(const Triangulation& tri, const Vector& theta_full, const StripDecomposition& strips,
                const std::vector<int>& eps_map);

// Net rotation of the gradient director (angle mod pi) along a circle.
// Approximately +-pi around a half-degree disclination, +-2pi around a
// vortex or saddle, 0 where the pattern is orientable.
double gradient_winding(const Triangulation& tri, const Vector& theta_full, const Vector2& center,
                        double radius);

enum class DefectKind { convex, concave };

struct Disclination {
  Vector2 position = Vector2::Zero();
  DefectKind kind = DefectKind::convex;
  int cluster_size = 0;
  double winding = 0.0;
};

std::vector<Disclination> detect_disclinations(const PhaseState& state, const StripDecomposition& strips,
                                               const Triangulation& tri, double mu_threshold);

// Level-set polylines of a vertex field by marching triangles, restricted to
// faces where mask is nonzero (empty mask = all faces).
struct Polyline {
  std::vector<Vector2> points;
  std::vector<int> faces;  // face of each segment; closed loops wrap around
  bool closed = false;
  int segment_count() const { return static_cast<int>(faces.size()); }
};

std::vector<Polyline> trace_level_contours(const Triangulation& tri, const Vector& values_full, double level,
                                           const std::vector<char>& face_mask);

// Per-face gradients of a full vertex field.
Eigen::MatrixX2d face_gradients_full(const Triangulation& tri, const Vector& field_full);

// Extends strip labels across the singular band to the nearest strip.
Eigen::VectorXi extended_labels(const StripDecomposition& strips, const Triangulation& tri);

}  // namespace stripes

#endif
