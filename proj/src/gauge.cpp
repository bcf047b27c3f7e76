#include "stripes/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>
#include <stdexcept>
#include <unordered_map>

namespace stripes {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
}

double edge_length(const Triangulation& tri, int a, int b) {
  return (tri.vertices.row(a) - tri.vertices.row(b)).norm();
}

// Uniform-grid point location over face bounding boxes.
class FaceLocator {
 public:
  explicit FaceLocator(const Triangulation& tri) : tri_(tri) {
    lo_ = tri.vertices.colwise().minCoeff();
    hi_ = tri.vertices.colwise().maxCoeff();
    const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(tri.face_count()))));
    nx_ = target;
    ny_ = target;
    bins_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int f = 0; f < tri.face_count(); ++f) {
      Vector2 bmin = tri.vertices.row(tri.faces(f, 0));
      Vector2 bmax = bmin;
      for (int k = 1; k < 3; ++k) {
        const Vector2 p = tri.vertices.row(tri.faces(f, k));
        bmin = bmin.cwiseMin(p);
        bmax = bmax.cwiseMax(p);
      }
      int i0, j0, i1, j1;
      bin_of(bmin, i0, j0);
      bin_of(bmax, i1, j1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bins_[static_cast<std::size_t>(j) * nx_ + i].push_back(f);
    }
  }

  int find(const Vector2& p) const {
    if ((p.array() < lo_.array()).any() || (p.array() > hi_.array()).any()) return -1;
    int i, j;
    bin_of(p, i, j);
    for (int f : bins_[static_cast<std::size_t>(j) * nx_ + i]) {
      if (contains(f, p)) return f;
    }
    return -1;
  }

 private:
  void bin_of(const Vector2& p, int& i, int& j) const {
    const Vector2 span = hi_ - lo_;
    i = std::clamp(static_cast<int>((p.x() - lo_.x()) / std::max(span.x(), 1e-300) * nx_), 0, nx_ - 1);
    j = std::clamp(static_cast<int>((p.y() - lo_.y()) / std::max(span.y(), 1e-300) * ny_), 0, ny_ - 1);
  }

  bool contains(int f, const Vector2& p) const {
    const Vector2 a = tri_.vertices.row(tri_.faces(f, 0));
    const Vector2 b = tri_.vertices.row(tri_.faces(f, 1));
    const Vector2 c = tri_.vertices.row(tri_.faces(f, 2));
    auto cross = [](const Vector2& u, const Vector2& v) { return u.x() * v.y() - u.y() * v.x(); };
    const double area2 = cross(b - a, c - a);
    const double eps = -1e-10 * area2;
    return cross(b - a, p - a) >= eps && cross(c - b, p - b) >= eps && cross(a - c, p - c) >= eps;
  }

  const Triangulation& tri_;
  Vector2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> bins_;
};

}  // namespace

Eigen::MatrixX2d face_gradients_full(const Triangulation& tri, const Vector& field_full) {
  if (field_full.size() != tri.vertex_count())
    throw std::invalid_argument("face_gradients_full: field length mismatch");
  const auto geo = face_gradient_geometry(tri);
  Eigen::MatrixX2d g = Eigen::MatrixX2d::Zero(tri.face_count(), 2);
  for (int f = 0; f < tri.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const double v = field_full(tri.faces(f, k));
      g(f, 0) += v * geo(f, 2 * k);
      g(f, 1) += v * geo(f, 2 * k + 1);
    }
  }
  return g;
}

std::vector<int> singular_band(const Triangulation& tri, const Vector& theta_full, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("singular_band: tol must be positive");
  if (theta_full.size() != tri.vertex_count())
    throw std::invalid_argument("singular_band: field length mismatch");
  std::vector<int> band;
  for (int f = 0; f < tri.face_count(); ++f) {
    double min_sin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) min_sin = std::min(min_sin, std::abs(std::sin(theta_full(tri.faces(f, k)))));
    if (min_sin < tol) band.push_back(f);
  }
  return band;
}

StripDecomposition decompose_strips(const Triangulation& tri, const Vector& theta_full, double tol) {
  StripDecomposition dec;
  dec.tol = tol;
  dec.face_labels = Eigen::VectorXi::Constant(tri.face_count(), -1);

  std::vector<char> in_band(tri.face_count(), 0);
  for (int f : singular_band(tri, theta_full, tol)) in_band[f] = 1;

  int next_label = 0;
  for (int seed = 0; seed < tri.face_count(); ++seed) {
    if (in_band[seed] || dec.face_labels(seed) >= 0) continue;
    Strip strip;
    std::queue<int> q;
    q.push(seed);
    dec.face_labels(seed) = next_label;
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      strip.faces.push_back(f);
      for (int k = 0; k < 3; ++k) {
        const int g = tri.face_adjacency(f, k);
        if (g >= 0 && !in_band[g] && dec.face_labels(g) < 0) {
          dec.face_labels(g) = next_label;
          q.push(g);
        }
      }
    }

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -vmin;
    for (int f : strip.faces) {
      for (int k = 0; k < 3; ++k) {
        const double t = theta_full(tri.faces(f, k));
        vmin = std::min(vmin, t);
        vmax = std::max(vmax, t);
      }
    }
    // Band faces keep every strip vertex at least asin(tol) away from a
    // multiple of pi, so the extremes identify the enclosing interval; a
    // strip straddling a wall has no consistent interval and is degenerate.
    const long m_lo = static_cast<long>(std::floor(vmin / kPi));
    const long m_hi = static_cast<long>(std::floor(vmax / kPi));
    if (m_lo == m_hi) {
      strip.theta_lo = kPi * static_cast<double>(m_lo);
      strip.theta_hi = kPi * static_cast<double>(m_lo + 1);
      const bool lo_even = (((m_lo % 2) + 2) % 2) == 0;
      strip.theta_plus = lo_even ? strip.theta_lo : strip.theta_hi;
      strip.theta_minus = lo_even ? strip.theta_hi : strip.theta_lo;
    } else {
      strip.degenerate = true;
    }
    dec.strips.push_back(std::move(strip));
    ++next_label;
  }
  return dec;
}

std::vector<Polyline> trace_level_contours(const Triangulation& tri, const Vector& values_full, double level,
                                           const std::vector<char>& face_mask) {
  if (values_full.size() != tri.vertex_count())
    throw std::invalid_argument("trace_level_contours: field length mismatch");
  const int nf = tri.face_count();
  auto allowed = [&](int f) { return face_mask.empty() || face_mask[f]; };
  auto above = [&](int v) { return values_full(v) >= level; };

  // For each allowed mixed face, its two crossing edges.
  std::vector<std::array<std::int64_t, 2>> cross_edges(nf, {-1, -1});
  std::vector<char> mixed(nf, 0);
  std::unordered_map<std::int64_t, Vector2> cross_point;
  for (int f = 0; f < nf; ++f) {
    if (!allowed(f)) continue;
    int count = 0;
    for (int k = 0; k < 3; ++k) {
      const int u = tri.faces(f, k);
      const int v = tri.faces(f, (k + 1) % 3);
      if (above(u) == above(v)) continue;
      const auto key = edge_key(u, v);
      if (count < 2) cross_edges[f][count] = key;
      ++count;
      if (!cross_point.count(key)) {
        const double du = values_full(u) - level;
        const double dv = values_full(v) - level;
        const double t = du / (du - dv);
        const Vector2 pu = tri.vertices.row(u);
        const Vector2 pv = tri.vertices.row(v);
        cross_point.emplace(key, pu + t * (pv - pu));
      }
    }
    mixed[f] = (count == 2);
  }

  auto neighbor_across = [&](int f, std::int64_t key) {
    for (int k = 0; k < 3; ++k) {
      if (edge_key(tri.faces(f, (k + 1) % 3), tri.faces(f, (k + 2) % 3)) == key)
        return tri.face_adjacency(f, k);
    }
    return -1;
  };
  auto other_edge = [&](int f, std::int64_t key) {
    return cross_edges[f][0] == key ? cross_edges[f][1] : cross_edges[f][0];
  };

  std::vector<Polyline> result;
  std::vector<char> visited(nf, 0);
  for (int f0 = 0; f0 < nf; ++f0) {
    if (!mixed[f0] || visited[f0]) continue;
    visited[f0] = 1;
    auto [eA, eB] = cross_edges[f0];
    if (eA > eB) std::swap(eA, eB);

    // chain of (face, entry edge, exit edge)
    std::vector<std::array<std::int64_t, 2>> io{{eA, eB}};
    std::vector<int> chain{f0};
    bool closed = false;

    int cur = f0;
    std::int64_t exit = eB;
    while (true) {
      const int nxt = neighbor_across(cur, exit);
      if (nxt < 0 || !mixed[nxt]) break;
      if (nxt == f0) {
        closed = true;
        break;
      }
      if (visited[nxt]) break;
      visited[nxt] = 1;
      const std::int64_t nxt_exit = other_edge(nxt, exit);
      chain.push_back(nxt);
      io.push_back({exit, nxt_exit});
      cur = nxt;
      exit = nxt_exit;
    }
    if (!closed) {
      // extend backward through eA, prepending
      cur = f0;
      std::int64_t entry = eA;
      while (true) {
        const int nxt = neighbor_across(cur, entry);
        if (nxt < 0 || !mixed[nxt] || visited[nxt]) break;
        visited[nxt] = 1;
        const std::int64_t nxt_entry = other_edge(nxt, entry);
        chain.insert(chain.begin(), nxt);
        io.insert(io.begin(), {nxt_entry, entry});
        cur = nxt;
        entry = nxt_entry;
      }
    }

    Polyline line;
    line.closed = closed;
    line.faces = chain;
    if (closed) {
      for (std::size_t i = 0; i < chain.size(); ++i) line.points.push_back(cross_point.at(io[i][0]));
    } else {
      line.points.push_back(cross_point.at(io.front()[0]));
      for (std::size_t i = 0; i < chain.size(); ++i) line.points.push_back(cross_point.at(io[i][1]));
    }
    result.push_back(std::move(line));
  }
  return result;
}

namespace {

double polyline_signed_area(const Polyline& line) {
  double twice = 0.0;
  const int m = static_cast<int>(line.points.size());
  for (int i = 0; i < m; ++i) {
    const Vector2& p = line.points[i];
    const Vector2& q = line.points[(i + 1) % m];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

}  // namespace

std::vector<int> strip_orientation(const Triangulation& tri, const Vector& theta_full,
                                   StripDecomposition& dec) {
  const auto grads = face_gradients_full(tri, theta_full);
  std::vector<int> result(dec.strips.size(), 0);

  for (std::size_t s = 0; s < dec.strips.size(); ++s) {
    Strip& strip = dec.strips[s];
    strip.orientation = 0;
    strip.contour.clear();
    strip.contour_closed = false;
    if (strip.degenerate) continue;

    const double level = 0.5 * (strip.theta_lo + strip.theta_hi);
    std::vector<char> mask(tri.face_count(), 0);
    for (int f : strip.faces) mask[f] = 1;
    auto contours = trace_level_contours(tri, theta_full, level, mask);
    if (contours.empty()) continue;

    const Polyline* best = nullptr;
    for (const auto& line : contours) {
      if (!line.closed) continue;
      if (!best || line.segment_count() > best->segment_count()) best = &line;
    }
    if (!best) {
      // open or degenerate contour: orientation stays undetermined
      const auto longest = std::max_element(contours.begin(), contours.end(),
                                            [](const Polyline& a, const Polyline& b) {
                                              return a.segment_count() < b.segment_count();
                                            });
      strip.contour = longest->points;
      continue;
    }

    const double area = polyline_signed_area(*best);
    if (area == 0.0) continue;
    const double loop_sign = area > 0.0 ? 1.0 : -1.0;  // make the tangent counterclockwise

    int pos = 0, neg = 0;
    const int m = best->segment_count();
    for (int i = 0; i < m; ++i) {
      const Vector2& p = best->points[i];
      const Vector2& q = best->points[(i + 1) % static_cast<int>(best->points.size())];
      const Vector2 t = loop_sign * (q - p);
      if (t.norm() < 1e-14) continue;
      const int f = best->faces[i];
      // inner normal dot gradient = cross(tangent, gradient) for a ccw loop
      const double c = t.x() * grads(f, 1) - t.y() * grads(f, 0);
      if (c > 0.0)
        ++pos;
      else if (c < 0.0)
        ++neg;
    }
    strip.contour = best->points;
    if (loop_sign < 0.0) std::reverse(strip.contour.begin(), strip.contour.end());
    strip.contour_closed = true;

    const int total = pos + neg;
    if (total == 0) continue;
    if (pos >= 9 * neg)
      strip.orientation = 1;
    else if (neg >= 9 * pos)
      strip.orientation = -1;
    result[s] = strip.orientation;
  }
  return result;
}

Eigen::VectorXi extended_labels(const StripDecomposition& dec, const Triangulation& tri) {
  // geodesic front from the strips so band faces join the nearest strip and
  // competing fronts meet along the equidistant mid-curve
  Eigen::VectorXi ext = dec.face_labels;
  const int nf = tri.face_count();
  Eigen::MatrixX2d centroid(nf, 2);
  for (int f = 0; f < nf; ++f)
    centroid.row(f) = (tri.vertices.row(tri.faces(f, 0)) + tri.vertices.row(tri.faces(f, 1)) +
                       tri.vertices.row(tri.faces(f, 2))) /
                      3.0;

  using Entry = std::tuple<double, int, int>;  // distance, face, label
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<double> dist(nf, std::numeric_limits<double>::infinity());
  for (int f = 0; f < nf; ++f) {
    if (ext(f) >= 0) {
      dist[f] = 0.0;
      queue.emplace(0.0, f, ext(f));
    }
  }
  while (!queue.empty()) {
    const auto [d, f, label] = queue.top();
    queue.pop();
    if (d > dist[f]) continue;
    ext(f) = label;
    for (int k = 0; k < 3; ++k) {
      const int g = tri.face_adjacency(f, k);
      if (g < 0 || dec.face_labels(g) >= 0) continue;
      const double nd = d + (centroid.row(g) - centroid.row(f)).norm();
      if (nd < dist[g]) {
        dist[g] = nd;
        queue.emplace(nd, g, label);
      }
    }
  }
  return ext;
}

double orientation_defect(const StripDecomposition& dec, const Triangulation& tri) {
  if (dec.strips.empty()) return 0.0;
  const auto ext = extended_labels(dec, tri);

  // edges separating faces of opposite nonzero orientation
  std::unordered_map<std::int64_t, char> cut;
  for (int f = 0; f < tri.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int g = tri.face_adjacency(f, k);
      if (g <= f) continue;
      const int lf = ext(f), lg = ext(g);
      if (lf < 0 || lg < 0 || lf == lg) continue;
      if (dec.strips[lf].orientation * dec.strips[lg].orientation == -1)
        cut.emplace(edge_key(tri.faces(f, (k + 1) % 3), tri.faces(f, (k + 2) % 3)), 1);
    }
  }

  // interface length via the midpoint polyline of the cut chain: a vertex
  // bridging two cut edges contributes half the chord between their far
  // endpoints, which removes the zigzag inflation of raw edge sums
  std::unordered_map<int, std::vector<int>> at_vertex;
  for (const auto& [key, flag] : cut) {
    const int u = static_cast<int>(key >> 32);
    const int v = static_cast<int>(key & 0xffffffff);
    at_vertex[u].push_back(v);
    at_vertex[v].push_back(u);
  }
  double length = 0.0;
  for (const auto& [v, others] : at_vertex) {
    if (others.size() == 2)
      length += 0.5 * (tri.vertices.row(others[0]) - tri.vertices.row(others[1])).norm();
    else if (others.size() == 1)  // chain end: half of the dangling edge
      length += 0.5 * edge_length(tri, v, others[0]);
  }
  return length;
}

Vector canonical_representative(const Vector& theta) {
  Vector out(theta.size());
  for (int i = 0; i < theta.size(); ++i) out(i) = std::acos(std::cos(theta(i)));
  return out;
}

Vector reorient(const Triangulation& tri, const Vector& theta_full, const StripDecomposition& dec,
                const std::vector<int>& eps_map) {
  const int nv = tri.vertex_count();
  const int nf = tri.face_count();
  const int k = static_cast<int>(dec.strips.size());
  if (theta_full.size() != nv) throw std::invalid_argument("reorient: field length mismatch");
  if (static_cast<int>(eps_map.size()) != k) throw std::invalid_argument("reorient: eps map length mismatch");
  for (int i = 0; i < k; ++i) {
    if (dec.strips[i].degenerate || dec.strips[i].orientation == 0)
      throw std::runtime_error("reorient: strip " + std::to_string(i) + " has undetermined orientation");
    if (eps_map[i] != 1 && eps_map[i] != -1)
      throw std::invalid_argument("reorient: eps map entries must be +1 or -1");
  }

  // phase interval (zone) of each vertex and of each strip
  std::vector<long> zone(nv);
  for (int v = 0; v < nv; ++v) zone[v] = static_cast<long>(std::floor(theta_full(v) / kPi));
  std::vector<long> strip_zone(k);
  for (int i = 0; i < k; ++i) strip_zone[i] = std::lround(dec.strips[i].theta_lo / kPi);

  // Assign each vertex the strip whose phase interval it continues: seeds are
  // strip-face vertices, grown across the band through same-zone neighbors.
  // The owner decides which psi contributes theta(v) rather than a constant.
  std::vector<int> primary(nv, -1);
  std::queue<int> q;
  for (int i = 0; i < k; ++i) {
    for (int f : dec.strips[i].faces) {
      for (int c = 0; c < 3; ++c) {
        const int v = tri.faces(f, c);
        if (primary[v] < 0 && zone[v] == strip_zone[i]) {
          primary[v] = i;
          q.push(v);
        }
      }
    }
  }
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int u : tri.vertex_adjacency[v]) {
      if (primary[u] < 0 && zone[u] == zone[v]) {
        primary[u] = primary[v];
        q.push(u);
      }
    }
  }

  Vector raw = Vector::Zero(nv);
  std::vector<double> face_const(nf);
  std::vector<int> comp(nf);
  for (int i = 0; i < k; ++i) {
    const Strip& strip = dec.strips[i];
    const double sign = static_cast<double>(eps_map[i] * strip.orientation);
    const double mid = 0.5 * (strip.theta_lo + strip.theta_hi);

    // connected components of the face complement of this strip; each takes
    // the phase value of the strip side it touches
    std::fill(comp.begin(), comp.end(), -1);
    for (int f : strip.faces) comp[f] = -2;
    std::vector<double> comp_contact_sum;
    std::vector<int> comp_contact_count;
    int ncomp = 0;
    for (int seed = 0; seed < nf; ++seed) {
      if (comp[seed] != -1) continue;
      comp_contact_sum.push_back(0.0);
      comp_contact_count.push_back(0);
      std::queue<int> fq;
      fq.push(seed);
      comp[seed] = ncomp;
      while (!fq.empty()) {
        const int f = fq.front();
        fq.pop();
        double face_theta = 0.0;
        for (int c = 0; c < 3; ++c) face_theta += theta_full(tri.faces(f, c));
        face_theta /= 3.0;
        bool contact = false;
        for (int kk = 0; kk < 3; ++kk) {
          const int g = tri.face_adjacency(f, kk);
          if (g < 0) continue;
          if (comp[g] == -2) {
            contact = true;
          } else if (comp[g] == -1) {
            comp[g] = ncomp;
            fq.push(g);
          }
        }
        if (contact) {
          comp_contact_sum[ncomp] += face_theta;
          comp_contact_count[ncomp] += 1;
        }
      }
      ++ncomp;
    }
    std::vector<double> comp_value(ncomp, strip.theta_lo);
    for (int c = 0; c < ncomp; ++c) {
      if (comp_contact_count[c] > 0 && comp_contact_sum[c] / comp_contact_count[c] > mid)
        comp_value[c] = strip.theta_hi;
    }
    for (int f = 0; f < nf; ++f)
      face_const[f] = (comp[f] >= 0) ? comp_value[comp[f]] : std::numeric_limits<double>::quiet_NaN();

    for (int v = 0; v < nv; ++v) {
      if (primary[v] == i) {
        raw(v) += sign * theta_full(v);
        continue;
      }
      double psi = std::numeric_limits<double>::quiet_NaN();
      for (int f : tri.vertex_faces[v]) {
        if (comp[f] >= 0) {
          psi = face_const[f];
          break;
        }
      }
      if (std::isnan(psi)) psi = theta_full(v) > mid ? strip.theta_hi : strip.theta_lo;
      raw(v) += sign * psi;
    }
  }

  // Dirichlet constant: the raw field is constant on the boundary up to the
  // small boundary phase values; snap its mean to the nearest multiple of pi.
  double boundary_mean = 0.0;
  for (int i = 0; i < tri.boundary_vertices.size(); ++i) boundary_mean += raw(tri.boundary_vertices(i));
  boundary_mean /= std::max<int>(1, static_cast<int>(tri.boundary_vertices.size()));
  const double c0 = kPi * std::round(boundary_mean / kPi);
  return raw.array() - c0;
}

double gradient_winding(const Triangulation& tri, const Vector& theta_full, const Vector2& center,
                        double radius) {
  const auto grads = face_gradients_full(tri, theta_full);
  const FaceLocator locator(tri);
  constexpr int samples = 96;
  std::vector<double> angle;
  angle.reserve(samples);
  int missing = 0;
  for (int j = 0; j < samples; ++j) {
    const double phi = 2.0 * kPi * j / samples;
    const Vector2 p = center + radius * Vector2(std::cos(phi), std::sin(phi));
    const int f = locator.find(p);
    if (f < 0 || grads.row(f).norm() < 1e-14) {
      ++missing;
      continue;
    }
    angle.push_back(std::atan2(grads(f, 1), grads(f, 0)));
  }
  if (missing > samples / 4 || angle.size() < 8) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t j = 0; j < angle.size(); ++j) {
    const double delta = angle[(j + 1) % angle.size()] - angle[j];
    total += delta - kPi * std::floor(delta / kPi + 0.5);  // director: wrap mod pi
  }
  return total;
}

std::vector<Disclination> detect_disclinations(const PhaseState& state, const StripDecomposition& dec,
                                               const Triangulation& tri, double mu_threshold) {
  const Vector theta_full = lift_full(tri, state.theta);
  const Vector mu_full = lift_full(tri, state.mu);

  std::vector<char> flagged(tri.vertex_count(), 0);
  for (int v = 0; v < tri.vertex_count(); ++v)
    if (std::abs(mu_full(v)) > mu_threshold) flagged[v] = 1;

  const double h_est = std::sqrt(2.0 * tri.face_areas.mean());

  std::vector<Disclination> found;
  std::vector<char> seen(tri.vertex_count(), 0);
  for (int seed = 0; seed < tri.vertex_count(); ++seed) {
    if (!flagged[seed] || seen[seed]) continue;
    std::vector<int> cluster;
    std::queue<int> q;
    q.push(seed);
    seen[seed] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      cluster.push_back(v);
      for (int u : tri.vertex_adjacency[v]) {
        if (flagged[u] && !seen[u]) {
          seen[u] = 1;
          q.push(u);
        }
      }
    }

    // defects live on the singular set: the cluster must touch the band
    bool touches_band = false;
    for (int v : cluster) {
      for (int f : tri.vertex_faces[v]) {
        if (dec.face_labels(f) < 0) {
          touches_band = true;
          break;
        }
      }
      if (touches_band) break;
    }
    if (!touches_band) continue;

    Vector2 centroid = Vector2::Zero();
    for (int v : cluster) centroid += tri.vertices.row(v).transpose();
    centroid /= static_cast<double>(cluster.size());
    double spread = 0.0;
    for (int v : cluster)
      spread = std::max(spread, (tri.vertices.row(v).transpose() - centroid).norm());

    const double radius = spread + 2.5 * h_est;
    const double w = gradient_winding(tri, theta_full, centroid, radius);
    if (!std::isfinite(w)) continue;
    Disclination d;
    d.position = centroid;
    d.cluster_size = static_cast<int>(cluster.size());
    d.winding = w;
    if (w > 0.5 * kPi && w < 1.5 * kPi)
      d.kind = DefectKind::convex;
    else if (w < -0.5 * kPi && w > -1.5 * kPi)
      d.kind = DefectKind::concave;
    else
      continue;  // orientation-consistent neighborhood or a full-degree defect
    found.push_back(d);
  }
  return found;
}

}  // namespace stripes
