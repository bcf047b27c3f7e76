#include "stripes/export.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stripes {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  return out;
}

std::array<int, 3> blue_white_red(double t) {
  t = std::clamp(t, 0.0, 1.0);
  if (t <= 0.5) {
    const double s = t / 0.5;
    return {static_cast<int>(std::lround(255.0 * s)), static_cast<int>(std::lround(255.0 * s)), 255};
  }
  const double s = (t - 0.5) / 0.5;
  return {255, static_cast<int>(std::lround(255.0 * (1.0 - s))),
          static_cast<int>(std::lround(255.0 * (1.0 - s)))};
}

}  // namespace

void write_energy_log(const std::string& path, const std::vector<LogRow>& log) {
  auto out = open_out(path);
  out << "# iteration bending well jump total constraint_residual\n";
  for (const auto& row : log) {
    out << row.iteration << ' ' << row.energy.bending << ' ' << row.energy.well << ' ' << row.energy.jump
        << ' ' << row.energy.total << ' ' << row.energy.constraint_residual << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<LogRow> read_energy_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<LogRow> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    LogRow row;
    if (!(ss >> row.iteration >> row.energy.bending >> row.energy.well >> row.energy.jump >>
          row.energy.total >> row.energy.constraint_residual))
      throw std::runtime_error("malformed energy log row in " + path);
    log.push_back(row);
  }
  return log;
}

void write_theta_csv(const std::string& path, const Triangulation& tri, const Vector& theta_full) {
  if (theta_full.size() != tri.vertex_count())
    throw std::invalid_argument("write_theta_csv: field length mismatch");
  auto out = open_out(path);
  out << "x,y,theta,h\n";
  for (int v = 0; v < tri.vertex_count(); ++v) {
    out << tri.vertices(v, 0) << ',' << tri.vertices(v, 1) << ',' << theta_full(v) << ','
        << std::cos(theta_full(v)) << '\n';
  }
}

void write_fields_csv(const std::string& path, const Triangulation& tri, const Vector& gradnorm_per_face,
                      const Eigen::VectorXi& strip_labels) {
  if (gradnorm_per_face.size() != tri.face_count() || strip_labels.size() != tri.face_count())
    throw std::invalid_argument("write_fields_csv: field length mismatch");
  auto out = open_out(path);
  out << "x,y,gradnorm,strip\n";
  for (int f = 0; f < tri.face_count(); ++f) {
    const Vector2 c = (tri.vertices.row(tri.faces(f, 0)) + tri.vertices.row(tri.faces(f, 1)) +
                       tri.vertices.row(tri.faces(f, 2))) /
                      3.0;
    out << c.x() << ',' << c.y() << ',' << gradnorm_per_face(f) << ',' << strip_labels(f) << '\n';
  }
}

void write_mu_csv(const std::string& path, const Triangulation& tri, const Vector& mu_full) {
  if (mu_full.size() != tri.vertex_count())
    throw std::invalid_argument("write_mu_csv: field length mismatch");
  auto out = open_out(path);
  out << "x,y,mu\n";
  for (int v = 0; v < tri.vertex_count(); ++v)
    out << tri.vertices(v, 0) << ',' << tri.vertices(v, 1) << ',' << mu_full(v) << '\n';
}

void write_disclinations_csv(const std::string& path, const std::vector<Disclination>& defects) {
  auto out = open_out(path);
  out << "x,y,classification,cluster_size\n";
  for (const auto& d : defects) {
    out << d.position.x() << ',' << d.position.y() << ','
        << (d.kind == DefectKind::convex ? "convex" : "concave") << ',' << d.cluster_size << '\n';
  }
}

void render_heatmap(const Vector& values, const Triangulation& tri, bool per_face, double range_lo,
                    double range_hi, const std::string& path, int long_axis_px) {
  if (!(range_lo < range_hi)) throw std::invalid_argument("render_heatmap: inverted or empty range");
  if (!values.allFinite()) throw std::invalid_argument("render_heatmap: non-finite values");
  const int expected = per_face ? tri.face_count() : tri.vertex_count();
  if (values.size() != expected) throw std::invalid_argument("render_heatmap: field length mismatch");
  if (long_axis_px < 2) throw std::invalid_argument("render_heatmap: resolution too small");

  const Vector2 lo = tri.vertices.colwise().minCoeff();
  const Vector2 hi = tri.vertices.colwise().maxCoeff();
  const Vector2 span = hi - lo;
  int width, height;
  if (span.x() >= span.y()) {
    width = long_axis_px;
    height = std::max(2, static_cast<int>(std::lround(long_axis_px * span.y() / span.x())));
  } else {
    height = long_axis_px;
    width = std::max(2, static_cast<int>(std::lround(long_axis_px * span.x() / span.y())));
  }

  // per-pixel containing-face lookup via a face bin grid
  const int bx = std::max(1, width / 8), by = std::max(1, height / 8);
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(bx) * by);
  auto bin_range = [&](const Vector2& bmin, const Vector2& bmax, int& i0, int& j0, int& i1, int& j1) {
    i0 = std::clamp(static_cast<int>((bmin.x() - lo.x()) / span.x() * bx), 0, bx - 1);
    i1 = std::clamp(static_cast<int>((bmax.x() - lo.x()) / span.x() * bx), 0, bx - 1);
    j0 = std::clamp(static_cast<int>((bmin.y() - lo.y()) / span.y() * by), 0, by - 1);
    j1 = std::clamp(static_cast<int>((bmax.y() - lo.y()) / span.y() * by), 0, by - 1);
  };
  for (int f = 0; f < tri.face_count(); ++f) {
    Vector2 bmin = tri.vertices.row(tri.faces(f, 0));
    Vector2 bmax = bmin;
    for (int k = 1; k < 3; ++k) {
      const Vector2 p = tri.vertices.row(tri.faces(f, k));
      bmin = bmin.cwiseMin(p);
      bmax = bmax.cwiseMax(p);
    }
    int i0, j0, i1, j1;
    bin_range(bmin, bmax, i0, j0, i1, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins[static_cast<std::size_t>(j) * bx + i].push_back(f);
  }

  auto out = open_out(path);
  out << "P3\n" << width << ' ' << height << "\n255\n";
  const double scale = range_hi - range_lo;
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      // image rows run top to bottom
      const Vector2 p(lo.x() + (px + 0.5) / width * span.x(),
                      lo.y() + (height - py - 0.5) / height * span.y());
      int face = -1;
      double w0 = 0.0, w1 = 0.0, w2 = 0.0;
      const int bi = std::clamp(static_cast<int>((p.x() - lo.x()) / span.x() * bx), 0, bx - 1);
      const int bj = std::clamp(static_cast<int>((p.y() - lo.y()) / span.y() * by), 0, by - 1);
      for (int f : bins[static_cast<std::size_t>(bj) * bx + bi]) {
        const Vector2 a = tri.vertices.row(tri.faces(f, 0));
        const Vector2 b = tri.vertices.row(tri.faces(f, 1));
        const Vector2 c = tri.vertices.row(tri.faces(f, 2));
        const double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
        const double s0 = (b.x() - p.x()) * (c.y() - p.y()) - (b.y() - p.y()) * (c.x() - p.x());
        const double s1 = (c.x() - p.x()) * (a.y() - p.y()) - (c.y() - p.y()) * (a.x() - p.x());
        const double s2 = (a.x() - p.x()) * (b.y() - p.y()) - (a.y() - p.y()) * (b.x() - p.x());
        const double eps = -1e-12 * area2;
        if (s0 >= eps && s1 >= eps && s2 >= eps) {
          face = f;
          w0 = s0 / area2;
          w1 = s1 / area2;
          w2 = s2 / area2;
          break;
        }
      }
      if (face < 0) {
        out << "255 255 255";
      } else {
        const double value = per_face ? values(face)
                                      : (w0 * values(tri.faces(face, 0)) + w1 * values(tri.faces(face, 1)) +
                                         w2 * values(tri.faces(face, 2))) /
                                            (w0 + w1 + w2);
        const auto rgb = blue_white_red((value - range_lo) / scale);
        out << rgb[0] << ' ' << rgb[1] << ' ' << rgb[2];
      }
      out << (px + 1 == width ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace stripes
