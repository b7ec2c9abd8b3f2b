#include "cablefem/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "cablefem/errors.hpp"

namespace cablefem {

namespace {
constexpr double kPi = 3.14159265358979323846;

double tri_area2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                 const std::array<double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}
}  // namespace

int CrossSection::add_node(double x, double y, RotBlock b) {
  nodes.push_back({x, y});
  node_block.push_back(b);
  return static_cast<int>(nodes.size()) - 1;
}

void CrossSection::add_tri(int a, int b, int c, RegionTag tag) {
  tris.push_back({a, b, c});
  tri_region.push_back(tag);
}

MeshLevel mesh_level_from_string(const std::string& s) {
  if (s == "coarse") return MeshLevel::Coarse;
  if (s == "default") return MeshLevel::Default;
  if (s == "fine") return MeshLevel::Fine;
  throw ParseError("unknown mesh level '" + s + "' (coarse|default|fine)");
}

double polygon_area_factor(int n) {
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
  return n / (2.0 * kPi) * std::sin(2.0 * kPi / n);
}

double polygon_radius_correction(int n, double cap_scale) {
  return std::min(std::sqrt(1.0 / polygon_area_factor(n)), cap_scale);
}

std::vector<int> add_polar_disk(CrossSection& cs, double cx, double cy,
                                const std::vector<double>& ring_radii, int n_az,
                                double angle0, RegionTag tag, RotBlock block) {
  if (ring_radii.empty() || n_az < 3) throw ValidationError("polar disk needs rings and n_az >= 3");
  for (size_t k = 1; k < ring_radii.size(); ++k)
    if (ring_radii[k] <= ring_radii[k - 1]) throw BadRadius("polar disk radii must ascend");
  int center = cs.add_node(cx, cy, block);
  std::vector<int> prev;
  for (size_t k = 0; k < ring_radii.size(); ++k) {
    std::vector<int> ring(n_az);
    for (int t = 0; t < n_az; ++t) {
      double a = angle0 + 2.0 * kPi * t / n_az;
      ring[t] = cs.add_node(cx + ring_radii[k] * std::cos(a), cy + ring_radii[k] * std::sin(a), block);
    }
    if (k == 0) {
      for (int t = 0; t < n_az; ++t) cs.add_tri(center, ring[t], ring[(t + 1) % n_az], tag);
    } else {
      add_ring_strip(cs, prev, ring, tag);
    }
    prev = std::move(ring);
  }
  return prev;
}

void add_ring_strip(CrossSection& cs, const std::vector<int>& inner,
                    const std::vector<int>& outer, RegionTag tag) {
  if (inner.size() != outer.size() || inner.size() < 3)
    throw ValidationError("ring strip needs equal node counts");
  int n = static_cast<int>(inner.size());
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    // counterclockwise quad: up the radial edge, along the outer arc, back
    // down; fixed diagonal so rotated copies of a strip triangulate alike
    int a = inner[i], b = outer[i], c = outer[j], d = inner[j];
    cs.add_tri(a, b, c, tag);
    cs.add_tri(a, c, d, tag);
  }
}

std::vector<int> add_coarsen_ring(CrossSection& cs, const std::vector<int>& inner,
                                  double r_out, RegionTag tag, RotBlock block) {
  int n2 = static_cast<int>(inner.size());
  if (n2 % 2 != 0 || n2 < 6) throw ValidationError("coarsen ring needs an even inner count");
  int n = n2 / 2;
  std::vector<int> outer(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = cs.nodes[inner[2 * i]];
    double a = std::atan2(p[1], p[0]);
    outer[i] = cs.add_node(r_out * std::cos(a), r_out * std::sin(a), block);
  }
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    cs.add_tri(inner[2 * i], outer[i], inner[2 * i + 1], tag);
    cs.add_tri(inner[2 * i + 1], outer[i], outer[j], tag);
    cs.add_tri(inner[2 * i + 1], outer[j], inner[(2 * i + 2) % n2], tag);
  }
  return outer;
}

// ---- Bowyer-Watson Delaunay fill ------------------------------------------

namespace {

struct DTri {
  int a, b, c;
  double cx, cy, rr;
  bool alive = true;
};

void set_circumcircle(const std::vector<std::array<double, 2>>& pts, DTri& t) {
  const auto& A = pts[t.a];
  const auto& B = pts[t.b];
  const auto& C = pts[t.c];
  double bx = B[0] - A[0], by = B[1] - A[1];
  double cx = C[0] - A[0], cy = C[1] - A[1];
  double d = 2.0 * (bx * cy - by * cx);
  if (d == 0.0) throw TangledMesh("degenerate triangle while filling");
  double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  double ux = (cy * b2 - by * c2) / d;
  double uy = (bx * c2 - cx * b2) / d;
  t.cx = A[0] + ux;
  t.cy = A[1] + uy;
  t.rr = ux * ux + uy * uy;
}

bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  bool in = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i][1] > y) != (poly[j][1] > y)) {
      double xi = poly[j][0] + (y - poly[j][1]) / (poly[i][1] - poly[j][1]) * (poly[i][0] - poly[j][0]);
      if (x < xi) in = !in;
    }
  }
  return in;
}

double dist_to_loop(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  double best = 1e300;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double ax = poly[j][0], ay = poly[j][1];
    double bx = poly[i][0] - ax, by = poly[i][1] - ay;
    double t = ((x - ax) * bx + (y - ay) * by) / (bx * bx + by * by);
    t = std::clamp(t, 0.0, 1.0);
    double dx = x - (ax + t * bx), dy = y - (ay + t * by);
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

double loop_area(const std::vector<std::array<double, 2>>& poly) {
  double s = 0;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    s += poly[j][0] * poly[i][1] - poly[i][0] * poly[j][1];
  return 0.5 * s;
}

uint64_t mix_hash(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}

}  // namespace

void delaunay_fill(CrossSection& cs, const std::vector<int>& outer,
                   const std::vector<std::vector<int>>& holes, double h, RegionTag tag) {
  if (outer.size() < 3 || h <= 0) throw ValidationError("delaunay fill needs a loop and h > 0");

  auto loop_pts = [&](const std::vector<int>& ids) {
    std::vector<std::array<double, 2>> p(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) p[i] = cs.nodes[ids[i]];
    return p;
  };
  std::vector<std::array<double, 2>> outer_pts = loop_pts(outer);
  std::vector<std::vector<std::array<double, 2>>> hole_pts;
  for (const auto& hl : holes) hole_pts.push_back(loop_pts(hl));

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : outer_pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }

  // local point list: 3 super vertices, boundary nodes, then lattice points
  std::vector<std::array<double, 2>> pts;
  std::vector<int> global_of;  // -1 for super/lattice until appended
  double mx = 0.5 * (xmin + xmax), my = 0.5 * (ymin + ymax);
  double R = 60.0 * std::max(xmax - xmin, ymax - ymin) + 1.0;
  pts.push_back({mx - 2.0 * R, my - R});
  pts.push_back({mx + 2.0 * R, my - R});
  pts.push_back({mx, my + 2.0 * R});
  global_of.assign(3, -1);

  for (int id : outer) {
    pts.push_back(cs.nodes[id]);
    global_of.push_back(id);
  }
  for (const auto& hl : holes)
    for (int id : hl) {
      pts.push_back(cs.nodes[id]);
      global_of.push_back(id);
    }
  size_t first_lattice = pts.size();

  double dy = h * 0.8660254037844386;
  int rows = static_cast<int>((ymax - ymin) / dy) + 1;
  for (int i = 0; i <= rows; ++i) {
    double y0 = ymin + i * dy;
    int cols = static_cast<int>((xmax - xmin) / h) + 1;
    for (int j = 0; j <= cols; ++j) {
      double x0 = xmin + j * h + (i % 2 ? 0.5 * h : 0.0);
      uint64_t hh = mix_hash((uint64_t)(i + 7) * 0x9E3779B97F4A7C15ull ^ (uint64_t)(j + 13));
      double x = x0 + ((hh & 0xffff) / 65535.0 - 0.5) * 0.06 * h;
      double y = y0 + (((hh >> 16) & 0xffff) / 65535.0 - 0.5) * 0.06 * h;
      if (!point_in_polygon(outer_pts, x, y)) continue;
      if (dist_to_loop(outer_pts, x, y) < 0.55 * h) continue;
      bool ok = true;
      for (const auto& hp : hole_pts) {
        if (point_in_polygon(hp, x, y) || dist_to_loop(hp, x, y) < 0.55 * h) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      pts.push_back({x, y});
      global_of.push_back(-1);
    }
  }

  std::vector<DTri> tris;
  tris.push_back({0, 1, 2});
  set_circumcircle(pts, tris[0]);

  std::vector<int> bad;
  std::vector<std::array<int, 2>> cavity;
  for (size_t p = 3; p < pts.size(); ++p) {
    bad.clear();
    cavity.clear();
    double px = pts[p][0], py = pts[p][1];
    for (size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      double dx = px - tris[t].cx, dy2 = py - tris[t].cy;
      if (dx * dx + dy2 * dy2 < tris[t].rr * (1.0 - 1e-12)) bad.push_back(static_cast<int>(t));
    }
    if (bad.empty())
      throw TangledMesh("fill point " + std::to_string(p) + (p < first_lattice ? " (boundary)" : " (lattice)") +
                        " at (" + fmt_double(px) + ", " + fmt_double(py) + ") fell outside the triangulation");
    for (int t : bad) {
      int v[3] = {tris[t].a, tris[t].b, tris[t].c};
      for (int e = 0; e < 3; ++e) {
        std::array<int, 2> ed{v[e], v[(e + 1) % 3]};
        bool internal = false;
        for (size_t q = 0; q < cavity.size(); ++q) {
          if (cavity[q][0] == ed[1] && cavity[q][1] == ed[0]) {
            cavity.erase(cavity.begin() + q);
            internal = true;
            break;
          }
        }
        if (!internal) cavity.push_back(ed);
      }
      tris[t].alive = false;
    }
    for (const auto& ed : cavity) {
      DTri nt{ed[0], ed[1], static_cast<int>(p)};
      set_circumcircle(pts, nt);
      tris.push_back(nt);
    }
  }

  // keep real triangles whose centroid lies in the region
  std::vector<std::array<int, 3>> keep;
  for (const auto& t : tris) {
    if (!t.alive || t.a < 3 || t.b < 3 || t.c < 3) continue;
    double gx = (pts[t.a][0] + pts[t.b][0] + pts[t.c][0]) / 3.0;
    double gy = (pts[t.a][1] + pts[t.b][1] + pts[t.c][1]) / 3.0;
    if (!point_in_polygon(outer_pts, gx, gy)) continue;
    bool in_hole = false;
    for (const auto& hp : hole_pts)
      if (point_in_polygon(hp, gx, gy)) {
        in_hole = true;
        break;
      }
    if (in_hole) continue;
    keep.push_back({t.a, t.b, t.c});
  }

  // every boundary segment must be present
  std::set<std::pair<int, int>> edges;
  for (const auto& t : keep)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      edges.insert({std::min(u, v), std::max(u, v)});
    }
  auto check_loop = [&](const std::vector<int>& ids, size_t base) {
    for (size_t i = 0; i < ids.size(); ++i) {
      int u = static_cast<int>(base + i);
      int v = static_cast<int>(base + (i + 1) % ids.size());
      if (!edges.count({std::min(u, v), std::max(u, v)}))
        throw TangledMesh("boundary segment lost in fill near node " + std::to_string(ids[i]));
    }
  };
  size_t base = 3;
  check_loop(outer, base);
  base += outer.size();
  for (const auto& hl : holes) {
    check_loop(hl, base);
    base += hl.size();
  }

  // Laplacian smoothing of lattice points
  std::vector<std::vector<int>> nbr(pts.size());
  for (const auto& t : keep)
    for (int e = 0; e < 3; ++e) {
      nbr[t[e]].push_back(t[(e + 1) % 3]);
      nbr[t[e]].push_back(t[(e + 2) % 3]);
    }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::array<double, 2>> saved = pts;
    for (size_t p = first_lattice; p < pts.size(); ++p) {
      if (nbr[p].empty()) continue;
      double sx = 0, sy = 0;
      for (int q : nbr[p]) {
        sx += pts[q][0];
        sy += pts[q][1];
      }
      pts[p] = {sx / nbr[p].size(), sy / nbr[p].size()};
    }
    bool flipped = false;
    for (const auto& t : keep)
      if (tri_area2(pts[t[0]], pts[t[1]], pts[t[2]]) <= 0) {
        flipped = true;
        break;
      }
    if (flipped) {
      pts = saved;
      break;
    }
  }

  // area audit: the fill must tile the region exactly
  double region = loop_area(outer_pts);
  for (const auto& hp : hole_pts) region -= loop_area(hp);
  double covered = 0;
  for (const auto& t : keep) covered += 0.5 * tri_area2(pts[t[0]], pts[t[1]], pts[t[2]]);
  if (std::abs(covered - region) > 1e-9 * std::abs(region) + 1e-16)
    throw TangledMesh("fill area mismatch: got " + fmt_double(covered) + " want " + fmt_double(region));

  // transfer lattice nodes and triangles
  for (size_t p = first_lattice; p < pts.size(); ++p)
    global_of[p] = cs.add_node(pts[p][0], pts[p][1], RotBlock::Static);
  for (const auto& t : keep) cs.add_tri(global_of[t[0]], global_of[t[1]], global_of[t[2]], tag);
}

// ---- parameter selection ---------------------------------------------------

MeshParams make_mesh_params(MeshLevel level, const CableSpec& spec, double max_probe_radius) {
  MeshParams p;
  switch (level) {
    case MeshLevel::Coarse:
      p.m_div = 2;
      p.n_wire_target = 10;
      p.wire_ring_fracs = {1.0};
      p.n_az_core = 24;
      p.conductor_rings = 3;
      p.insulation_rings = 2;
      p.sheath_rings = 2;
      p.serving_rings = 1;
      p.fill_h_rel = 0.085;
      p.jacket_rings = 1;
      p.exterior_growth = 1.5;
      p.stretch_rings = 4;
      p.h_z_rel = 1.55;
      p.tet_budget = 230000;
      break;
    case MeshLevel::Default:
      p.m_div = 2;
      p.n_wire_target = 14;
      p.wire_ring_fracs = {0.55, 1.0};
      p.n_az_core = 36;
      p.conductor_rings = 4;
      p.insulation_rings = 2;
      p.sheath_rings = 2;
      p.serving_rings = 1;
      p.fill_h_rel = 0.07;
      p.jacket_rings = 2;
      p.exterior_growth = 1.45;
      p.stretch_rings = 5;
      p.h_z_rel = 1.25;
      break;
    case MeshLevel::Fine:
      p.m_div = 2;
      p.n_wire_target = 18;
      p.wire_ring_fracs = {0.45, 0.75, 1.0};
      p.n_az_core = 48;
      p.conductor_rings = 6;
      p.insulation_rings = 3;
      p.sheath_rings = 3;
      p.serving_rings = 2;
      p.fill_h_rel = 0.05;
      p.jacket_rings = 2;
      p.exterior_growth = 1.38;
      p.stretch_rings = 6;
      p.h_z_rel = 0.95;
      p.tet_budget = 540000;
      break;
  }
  double base = std::max(0.26, 2.4 * spec.Da_mm * 0.5e-3);
  p.exterior_radius = max_probe_radius > 0 ? std::max(1.06 * max_probe_radius, base) : base;
  return p;
}

// ---- full cable cross-section ----------------------------------------------

namespace {

// Radii of the layout shells between the core bundle and the jacket.
struct RadialLayout {
  double shrink, gap, r_pc_mesh, R1, R2, pad_top, R3, R4, R_jack;
};

RadialLayout radial_layout(const CableSpec& spec, double r_w_eff) {
  RadialLayout L;
  double d = spec.core_center_m();
  double r_pc = spec.r_core_m();
  double r_p = spec.r_pitch_m();
  double e_serv = r_pc - spec.rs_out_m();
  double avail = (r_p - r_w_eff) - (d + r_pc);
  double want = 1.6e-3;
  L.shrink = std::clamp(want - avail, 0.0, 0.35 * e_serv);
  // the lay-up puts the cores in exact trefoil contact; keep the meshed
  // serving circles apart
  L.shrink = std::max(L.shrink, 0.3e-3);
  if (L.shrink > 0.5 * e_serv)
    throw TangledMesh(spec.id + ": serving too thin to absorb the meshing shrink");
  L.gap = avail + L.shrink;
  if (L.gap < 0.45e-3)
    throw TangledMesh(spec.id + ": bundle-to-armor gap " + fmt_double(L.gap * 1e3) +
                      " mm is too tight to mesh");
  L.r_pc_mesh = r_pc - L.shrink;
  L.R1 = d + L.r_pc_mesh + 0.35 * L.gap;
  L.R2 = L.R1 + 0.40 * L.gap;
  L.pad_top = std::max(0.25 * L.gap, 0.3e-3);
  L.R3 = r_p + r_w_eff + L.pad_top;
  L.R4 = L.R3 + std::max(0.40 * L.gap, 0.4e-3);
  L.R_jack = std::max(spec.Da_mm * 0.5e-3 + 2e-3, L.R4 + 1.5e-3);
  return L;
}

// Slot-local vertex angles of the O-grid boundary, in build order.
std::vector<double> slot_boundary_angles(double R2, double R3, double r_p, int n_az,
                                         int m_div, int n_r) {
  double dphi = 2.0 * kPi / n_az;
  double phiL = -0.5 * m_div * dphi;
  auto ang = [&](double r, double phi) {
    return std::atan2(r * std::sin(phi), r * std::cos(phi) - r_p);
  };
  std::vector<double> a;
  a.push_back(ang(R2, phiL));
  for (int s = 1; s < n_r; ++s) a.push_back(ang(R2 + (R3 - R2) * s / n_r, phiL));
  for (int t = 0; t <= m_div; ++t) a.push_back(ang(R3, phiL + t * dphi));
  double phiR = phiL + m_div * dphi;
  for (int s = n_r - 1; s >= 1; --s) a.push_back(ang(R2 + (R3 - R2) * s / n_r, phiR));
  for (int t = m_div - 1; t >= 1; --t) a.push_back(ang(R2, phiL + t * dphi));
  return a;
}

// Area of the unit-radius polygon with the given vertex angles, over pi.
double polygon_factor_of(const std::vector<double>& angs) {
  int n = static_cast<int>(angs.size());
  double s = 0;
  for (int i = 0; i < n; ++i) {
    double d = std::remainder(angs[(i + 1) % n] - angs[i], 2.0 * kPi);
    if (d <= 0) throw TangledMesh("slot boundary is not star-shaped around the wire");
    s += std::sin(d);
  }
  return s / (2.0 * kPi);
}

// Wire polygon plan: enough vertices that the ring radius reaching the target
// area still clears the slot cut lines. q is the achieved area fraction.
struct WirePlan {
  int n;
  double r_eff;
  double q;
};

WirePlan plan_armor(const CableSpec& spec, const MeshParams& p) {
  double r_w = spec.r_wire_m();
  double half_gap = spec.r_pitch_m() * std::sin(kPi / spec.N);
  double clearance = std::max(0.012 * r_w, 3e-5);
  double r_max = (half_gap - clearance) * 0.999;
  if (r_max <= 0) throw TangledMesh(spec.id + ": armor wires leave no azimuthal room");
  int target = std::max(8, p.n_wire_target - p.n_wire_target % 2);
  for (int n = target; n <= 40; n += 2) {
    int n_r = (n - 2 * p.m_div) / 2;
    if (n_r < 1) continue;
    double r_est = std::min(r_w * polygon_radius_correction(n), r_max);
    for (int pass = 0; pass < 2; ++pass) {
      RadialLayout lay = radial_layout(spec, r_est);
      auto angs = slot_boundary_angles(lay.R2, lay.R3, spec.r_pitch_m(), spec.N * p.m_div,
                                       p.m_div, n_r);
      double Feff = polygon_factor_of(angs);
      r_est = std::min(r_w * std::sqrt(1.0 / Feff), r_max);
      if (pass == 1) {
        double q = Feff * (r_est / r_w) * (r_est / r_w);
        if (q >= 0.988) return {n, r_est, std::min(q, 1.0)};
      }
    }
  }
  throw TangledMesh(spec.id + ": armor wires leave no room for a polygonal mesh");
}

std::vector<double> graded_radii(double r0, double r1, int steps, double power) {
  std::vector<double> r(steps);
  for (int k = 1; k <= steps; ++k) r[k - 1] = r0 + (r1 - r0) * std::pow(double(k) / steps, power);
  r[steps - 1] = r1;
  return r;
}

}  // namespace

CrossSection build_cross_section(const CableSpec& spec, const MeshParams& p) {
  validate_cable(spec);
  if (p.m_div < 2 || p.m_div % 2) throw ValidationError("m_div must be even and >= 2");

  CrossSection cs;
  cs.n_az = spec.N * p.m_div;
  cs.station0 = 0;
  int n_az = cs.n_az;
  double dphi = 2.0 * kPi / n_az;

  WirePlan wp = plan_armor(spec, p);
  RadialLayout lay = radial_layout(spec, wp.r_eff);
  double corr_c = polygon_radius_correction(p.n_az_core);

  double d = spec.core_center_m();
  double r_p = spec.r_pitch_m();
  double r_w = spec.r_wire_m();
  double r_pc_mesh = lay.r_pc_mesh;
  double R1 = lay.R1, R2 = lay.R2, R3 = lay.R3, R4 = lay.R4, R_jack = lay.R_jack;

  // --- three power cores ---
  double a_c = spec.rc_m() * corr_c;
  double b_in = spec.rs_in_m() * corr_c;
  double b_out = spec.rs_out_m() * corr_c;
  std::vector<std::vector<int>> serving_rings(3);
  for (int phase = 0; phase < 3; ++phase) {
    double gamma = 2.0 * kPi * phase / 3.0;
    double cx = d * std::cos(gamma), cy = d * std::sin(gamma);
    std::vector<double> cond = graded_radii(0.35 * a_c, a_c, p.conductor_rings, 0.75);
    cond.insert(cond.begin(), 0.35 * a_c);
    std::vector<int> ring = add_polar_disk(cs, cx, cy, cond, p.n_az_core, gamma,
                                           {RegionClass::Conductor, phase}, RotBlock::Static);
    double r_from = a_c;
    auto extend = [&](double r_to, int steps, RegionTag tag) {
      for (int k = 1; k <= steps; ++k) {
        double r = r_from + (r_to - r_from) * k / steps;
        std::vector<int> next(p.n_az_core);
        for (int t = 0; t < p.n_az_core; ++t) {
          double ang = gamma + 2.0 * kPi * t / p.n_az_core;
          next[t] = cs.add_node(cx + r * std::cos(ang), cy + r * std::sin(ang), RotBlock::Static);
        }
        add_ring_strip(cs, ring, next, tag);
        ring = std::move(next);
      }
      r_from = r_to;
    };
    extend(b_in, p.insulation_rings, {RegionClass::Insulation, phase});
    extend(b_out, p.sheath_rings, {RegionClass::Sheath, phase});
    extend(r_pc_mesh, p.serving_rings, {RegionClass::Serving, phase});
    serving_rings[phase] = ring;
  }

  // --- bundle circle R1 and filler ---
  std::vector<int> ring_R1(n_az);
  for (int j = 0; j < n_az; ++j)
    ring_R1[j] = cs.add_node(R1 * std::cos(j * dphi), R1 * std::sin(j * dphi), RotBlock::Static);
  delaunay_fill(cs, ring_R1, serving_rings, p.fill_h_rel * spec.Dcore_mm * 1e-3,
                {RegionClass::FillerBundle, 0});

  // --- armor annulus: R2/R3 circles and per-slot O-grids ---
  std::vector<int> ring_R2(n_az), ring_R3(n_az);
  for (int j = 0; j < n_az; ++j) {
    ring_R2[j] = cs.add_node(R2 * std::cos(j * dphi), R2 * std::sin(j * dphi), RotBlock::Armor);
    ring_R3[j] = cs.add_node(R3 * std::cos(j * dphi), R3 * std::sin(j * dphi), RotBlock::Armor);
  }

  int n_r = (wp.n - 2 * p.m_div) / 2;
  if (n_r < 1) throw ValidationError("wire polygon too small for the O-grid");
  int n_w = 2 * p.m_div + 2 * n_r;

  // left cut-line interior nodes per slot (angle = slot center - pi/N)
  std::vector<std::vector<int>> left_cut(spec.N);
  for (int k = 0; k < spec.N; ++k) {
    double ang = 2.0 * kPi * k / spec.N - kPi / spec.N;
    left_cut[k].resize(n_r - 1);
    for (int s = 1; s < n_r; ++s) {
      double r = R2 + (R3 - R2) * s / double(n_r);
      left_cut[k][s - 1] = cs.add_node(r * std::cos(ang), r * std::sin(ang), RotBlock::Armor);
    }
  }

  for (int k = 0; k < spec.N; ++k) {
    int st0 = k * p.m_div - p.m_div / 2;  // station of the slot's left corner
    auto st = [&](int off) { return ((st0 + off) % n_az + n_az) % n_az; };

    // rect boundary, counterclockwise as seen from the slot center: out along
    // the left cut, along the outer arc, in along the right cut, back along
    // the inner arc; arcs carry the corners
    std::vector<int> bnd;
    const auto& rc_right = left_cut[(k + 1) % spec.N];
    bnd.push_back(ring_R2[st(0)]);
    for (int s = 0; s < n_r - 1; ++s) bnd.push_back(left_cut[k][s]);          // left cut out
    for (int t = 0; t <= p.m_div; ++t) bnd.push_back(ring_R3[st(t)]);         // outer arc ->
    for (int s = n_r - 2; s >= 0; --s) bnd.push_back(rc_right[s]);            // right cut in
    for (int t = p.m_div; t >= 1; --t) bnd.push_back(ring_R2[st(t)]);         // inner arc <-
    int nb = static_cast<int>(bnd.size());
    if (nb != n_w) throw TangledMesh("O-grid boundary count mismatch");

    double ck_ang = 2.0 * kPi * k / spec.N;
    double ckx = r_p * std::cos(ck_ang), cky = r_p * std::sin(ck_ang);

    // wire rings at the boundary-node angles; the outermost radius is set so
    // the wire polygon carries exactly q of the true wire area
    std::vector<double> angs(nb);
    for (int t = 0; t < nb; ++t)
      angs[t] = std::atan2(cs.nodes[bnd[t]][1] - cky, cs.nodes[bnd[t]][0] - ckx);
    double r_ring = r_w * std::sqrt(wp.q / polygon_factor_of(angs));

    RegionTag wire_tag{RegionClass::ArmorGap, k};
    if (spec.occupancy[k] == SlotFill::Steel) wire_tag = {RegionClass::ArmorSteel, k};
    if (spec.occupancy[k] == SlotFill::Polymer) wire_tag = {RegionClass::ArmorPolymer, k};

    std::vector<int> prev;
    for (size_t fr = 0; fr < p.wire_ring_fracs.size(); ++fr) {
      double r = r_ring * p.wire_ring_fracs[fr];
      std::vector<int> ring(nb);
      for (int t = 0; t < nb; ++t)
        ring[t] = cs.add_node(ckx + r * std::cos(angs[t]), cky + r * std::sin(angs[t]), RotBlock::Armor);
      if (fr == 0) {
        int cn = cs.add_node(ckx, cky, RotBlock::Armor);
        for (int t = 0; t < nb; ++t) cs.add_tri(cn, ring[t], ring[(t + 1) % nb], wire_tag);
      } else {
        add_ring_strip(cs, prev, ring, wire_tag);
      }
      prev = std::move(ring);
    }
    add_ring_strip(cs, prev, bnd, {RegionClass::ArmorGap, k});
  }

  // --- outer band is structural: record circles only ---
  std::vector<int> ring_R4(n_az);
  for (int j = 0; j < n_az; ++j)
    ring_R4[j] = cs.add_node(R4 * std::cos(j * dphi), R4 * std::sin(j * dphi), RotBlock::Static);

  cs.bands.push_back({ring_R1, ring_R2, true});
  cs.bands.push_back({ring_R4, ring_R3, false});

  // --- jacket ---
  std::vector<int> ring = ring_R4;
  double r_cur = R4;
  for (int k = 1; k <= p.jacket_rings; ++k) {
    double r = R4 + (R_jack - R4) * k / p.jacket_rings;
    std::vector<int> next(n_az);
    for (int j = 0; j < n_az; ++j)
      next[j] = cs.add_node(r * std::cos(j * dphi), r * std::sin(j * dphi), RotBlock::Static);
    add_ring_strip(cs, ring, next, {RegionClass::Jacket, 0});
    ring = std::move(next);
    r_cur = r;
  }

  // --- exterior with 2:1 coarsening ---
  int n_cur = n_az;
  while (r_cur < p.exterior_radius * 0.999) {
    double r_next = std::min(r_cur * p.exterior_growth, p.exterior_radius);
    if (p.exterior_radius / r_next < 1.12) r_next = p.exterior_radius;
    double az_spacing = 2.0 * kPi * r_cur / n_cur;
    if (r_next - r_cur > 1.6 * az_spacing && n_cur % 2 == 0 && n_cur / 2 >= 24) {
      ring = add_coarsen_ring(cs, ring, r_next, {RegionClass::Exterior, 0}, RotBlock::Static);
      n_cur /= 2;
    } else {
      std::vector<int> next(n_cur);
      for (int j = 0; j < n_cur; ++j) {
        const auto& q = cs.nodes[ring[j]];
        double ang = std::atan2(q[1], q[0]);
        next[j] = cs.add_node(r_next * std::cos(ang), r_next * std::sin(ang), RotBlock::Static);
      }
      add_ring_strip(cs, ring, next, {RegionClass::Exterior, 0});
      ring = std::move(next);
    }
    r_cur = r_next;
  }

  // --- stretched closure annulus ---
  cs.r_stretch_inner = r_cur;
  double R6 = r_cur * 1.55;
  for (int k = 1; k <= p.stretch_rings; ++k) {
    double r = r_cur + (R6 - r_cur) * k / p.stretch_rings;
    std::vector<int> next(n_cur);
    for (int j = 0; j < n_cur; ++j) {
      const auto& q = cs.nodes[ring[j]];
      double ang = std::atan2(q[1], q[0]);
      next[j] = cs.add_node(r * std::cos(ang), r * std::sin(ang), RotBlock::Static);
    }
    add_ring_strip(cs, ring, next, {RegionClass::Exterior, 0});
    ring = std::move(next);
  }
  cs.r_outer = R6;
  cs.outer_circle = ring;

  check_cross_section(cs, 1e-9);
  return cs;
}

void check_cross_section(const CrossSection& cs, double tol) {
  for (size_t t = 0; t < cs.tris.size(); ++t) {
    const auto& tr = cs.tris[t];
    if (tri_area2(cs.nodes[tr[0]], cs.nodes[tr[1]], cs.nodes[tr[2]]) <= 0)
      throw TangledMesh("non-positive triangle " + std::to_string(t) + " near (" +
                        fmt_double(cs.nodes[tr[0]][0]) + ", " + fmt_double(cs.nodes[tr[0]][1]) + ")");
  }
  // duplicate nodes: grid hash at tol resolution
  std::unordered_map<uint64_t, std::vector<int>> grid;
  for (int i = 0; i < static_cast<int>(cs.nodes.size()); ++i) {
    int64_t gx = static_cast<int64_t>(std::floor(cs.nodes[i][0] / (4 * tol)));
    int64_t gy = static_cast<int64_t>(std::floor(cs.nodes[i][1] / (4 * tol)));
    for (int64_t ax = gx - 1; ax <= gx + 1; ++ax)
      for (int64_t ay = gy - 1; ay <= gy + 1; ++ay) {
        auto it = grid.find(mix_hash(static_cast<uint64_t>(ax) * 0x51ull) ^ static_cast<uint64_t>(ay));
        if (it == grid.end()) continue;
        for (int j : it->second) {
          double dx = cs.nodes[i][0] - cs.nodes[j][0];
          double dy = cs.nodes[i][1] - cs.nodes[j][1];
          if (dx * dx + dy * dy < tol * tol)
            throw TangledMesh("duplicate nodes " + std::to_string(j) + "," + std::to_string(i));
        }
      }
    grid[mix_hash(static_cast<uint64_t>(gx) * 0x51ull) ^ static_cast<uint64_t>(gy)].push_back(i);
  }
}

}  // namespace cablefem
