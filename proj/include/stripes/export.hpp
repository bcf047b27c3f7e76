#ifndef STRIPES_EXPORT_HPP
#define STRIPES_EXPORT_HPP

// Artifact writers: delimited text logs and fields, plain portable pixmap
// heatmaps with a fixed blue-white-red colormap.

#include "stripes/bregman.hpp"
#include "stripes/gauge.hpp"

#include <string>
#include <vector>

namespace stripes {

void write_energy_log(const std::string& path, const std::vector<LogRow>& log);
std::vector<LogRow> read_energy_log(const std::string& path);

// x, y, theta, h = cos(theta) per vertex.
void write_theta_csv(const std::string& path, const Triangulation& tri, const Vector& theta_full);
// centroid x, y, |grad theta|, strip label per face.
void write_fields_csv(const std::string& path, const Triangulation& tri, const Vector& gradnorm_per_face,
                      const Eigen::VectorXi& strip_labels);
void write_mu_csv(const std::string& path, const Triangulation& tri, const Vector& mu_full);
void write_disclinations_csv(const std::string& path, const std::vector<Disclination>& defects);

// Rasterizes a per-vertex (interpolated) or per-face (flat) scalar field by
// point-in-triangle lookup; out-of-domain pixels are white, values clamped
// to [range_lo, range_hi].
void render_heatmap(const Vector& values, const Triangulation& tri, bool per_face, double range_lo,
                    double range_hi, const std::string& path, int long_axis_px = 800);

}  // namespace stripes

#endif
