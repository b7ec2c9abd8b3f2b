#include "cablefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "cablefem/errors.hpp"

namespace cablefem {

namespace {
constexpr double kPi = 3.14159265358979323846;

double omega_for_region(RegionClass c, const PeriodicModel& pm) {
  switch (c) {
    case RegionClass::ArmorSteel:
    case RegionClass::ArmorPolymer:
    case RegionClass::ArmorGap:
      return pm.omega_armor;
    case RegionClass::Exterior:
      return 0.0;  // sea return runs straight
    default:
      return pm.omega_core;
  }
}

double tet_volume(const std::array<double, 3>& a, const std::array<double, 3>& b,
                  const std::array<double, 3>& c, const std::array<double, 3>& d) {
  double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  double w[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  return (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
          u[2] * (v[0] * w[1] - v[1] * w[0])) /
         6.0;
}

// Dompierre split: rotate the prism so its smallest node id sits at corner 0,
// then cut the one quad face not touching it along the diagonal through that
// face's smallest id. Every quad face ends up split through its min id, so
// neighboring cells agree without communication.
std::array<std::array<int, 4>, 3> split_prism(std::array<int, 6> v) {
  int mi = 0;
  for (int k = 1; k < 6; ++k)
    if (v[k] < v[mi]) mi = k;
  if (mi >= 3) v = {v[3], v[5], v[4], v[0], v[2], v[1]};
  mi = 0;
  for (int k = 1; k < 3; ++k)
    if (v[k] < v[mi]) mi = k;
  for (int r = 0; r < mi; ++r) v = {v[1], v[2], v[0], v[4], v[5], v[3]};
  if (std::min(v[1], v[5]) < std::min(v[2], v[4]))
    return {{{v[0], v[1], v[2], v[5]}, {v[0], v[1], v[5], v[4]}, {v[0], v[4], v[5], v[3]}}};
  return {{{v[0], v[1], v[2], v[4]}, {v[0], v[2], v[5], v[4]}, {v[0], v[4], v[5], v[3]}}};
}

// Two triangles covering the cyclic quad (a,b,c,d), diagonal through the
// quad's smallest node id.
std::array<std::array<int, 3>, 2> split_quad(int a, int b, int c, int d) {
  if (std::min(a, c) < std::min(b, d)) return {{{a, b, c}, {a, c, d}}};
  return {{{b, c, d}, {b, d, a}}};
}

void audit_conformity(const PeriodicMesh& m) {
  if (m.X.size() >= (1ull << 21)) throw TangledMesh("mesh exceeds the face-audit node limit");
  std::vector<uint8_t> flag(m.X.size(), 0);
  for (int i : m.src_nodes) flag[i] |= 1;
  for (int i : m.dst_nodes) flag[i] |= 2;
  for (int i : m.outer_nodes) flag[i] |= 4;
  std::vector<uint64_t> faces;
  faces.reserve(m.tets.size() * 4);
  for (const auto& t : m.tets) {
    for (int skip = 0; skip < 4; ++skip) {
      int f[3], n = 0;
      for (int k = 0; k < 4; ++k)
        if (k != skip) f[n++] = t[k];
      std::sort(f, f + 3);
      faces.push_back((uint64_t(f[0]) << 42) | (uint64_t(f[1]) << 21) | uint64_t(f[2]));
    }
  }
  std::sort(faces.begin(), faces.end());
  for (size_t i = 0; i < faces.size();) {
    size_t j = i;
    while (j < faces.size() && faces[j] == faces[i]) ++j;
    size_t count = j - i;
    if (count > 2) throw TangledMesh("face shared by more than two tets");
    if (count == 1) {
      int a = int(faces[i] >> 42), b = int((faces[i] >> 21) & 0x1fffff), c = int(faces[i] & 0x1fffff);
      if ((flag[a] & flag[b] & flag[c]) == 0)
        throw TangledMesh("interior face with a single tet near node " + std::to_string(a));
    }
    i = j;
  }
}

}  // namespace

PeriodicMesh extrude_slab(const CrossSection& cs, const PeriodicModel& pm, int n_z, double L) {
  if (n_z < 1 || L <= 0) throw ValidationError("extrusion needs n_z >= 1 and L > 0");
  int n2 = static_cast<int>(cs.nodes.size());
  int m_slip = 0;
  if (!cs.bands.empty()) {
    if (cs.n_az <= 0 || cs.n_az % pm.g != 0)
      throw ValidationError("band stations must be divisible by the symmetry order");
    m_slip = cs.n_az / pm.g;
    if (n_z < 2 * m_slip)
      throw ValidationError("n_z = " + std::to_string(n_z) + " cannot carry a slip of " +
                            std::to_string(m_slip) + " stations; need at least " +
                            std::to_string(2 * m_slip));
    for (const auto& b : cs.bands)
      if (static_cast<int>(b.static_circle.size()) != cs.n_az ||
          static_cast<int>(b.armor_circle.size()) != cs.n_az)
        throw ValidationError("band circles must carry n_az nodes");
  }

  PeriodicMesh m;
  m.model = pm;
  m.n_z = n_z;
  m.n_az = cs.n_az;
  // the armor block outruns the static block by rel_sign*m_slip stations over
  // one period, so the band attachment index walks the opposite way
  int slip_end = -pm.rel_sign * m_slip;
  m.slip_total = m_slip ? slip_end : 0;

  auto n3 = [n2](int l, int i) { return l * n2 + i; };
  m.X.resize(static_cast<size_t>(n_z + 1) * n2);
  double extra_full = cs.bands.empty() ? 0.0 : pm.rel_sign * 2.0 * kPi / pm.g;
  for (int l = 0; l <= n_z; ++l) {
    double f = static_cast<double>(l) / n_z;
    double z = L * f;
    double cs_s = std::cos(pm.theta * f), sn_s = std::sin(pm.theta * f);
    double cs_a = std::cos(pm.theta * f + extra_full * f), sn_a = std::sin(pm.theta * f + extra_full * f);
    for (int i = 0; i < n2; ++i) {
      double px = cs.nodes[i][0], py = cs.nodes[i][1];
      bool armor = cs.node_block[i] == RotBlock::Armor;
      double c = armor ? cs_a : cs_s, s = armor ? sn_a : sn_s;
      m.X[n3(l, i)] = {px * c - py * s, px * s + py * c, z};
    }
  }

  size_t expect = cs.tris.size() * 3 * n_z + cs.bands.size() * size_t(cs.n_az) * n_z * 12;
  m.tets.reserve(expect);
  m.tet_region.reserve(expect);
  m.tet_omega.reserve(expect);
  auto add_tet = [&](int a, int b, int c, int d, RegionTag tag, double om, bool fix_orient) {
    double vol = tet_volume(m.X[a], m.X[b], m.X[c], m.X[d]);
    if (vol <= 0) {
      if (!fix_orient)
        throw TangledMesh("non-positive tet volume " + fmt_double(vol) + " in region " +
                          region_class_name(tag.cls));
      std::swap(c, d);
      vol = -vol;
      if (vol <= 0) throw TangledMesh("degenerate band cell");
    }
    m.tets.push_back({a, b, c, d});
    m.tet_region.push_back(tag);
    m.tet_omega.push_back(om);
  };

  for (size_t t = 0; t < cs.tris.size(); ++t) {
    RegionTag tag = cs.tri_region[t];
    double om = omega_for_region(tag.cls, pm);
    const auto& tr = cs.tris[t];
    for (int l = 0; l < n_z; ++l) {
      std::array<int, 6> v = {n3(l, tr[0]),     n3(l, tr[1]),     n3(l, tr[2]),
                              n3(l + 1, tr[0]), n3(l + 1, tr[1]), n3(l + 1, tr[2])};
      for (const auto& tt : split_prism(v)) add_tet(tt[0], tt[1], tt[2], tt[3], tag, om, false);
    }
  }

  if (m_slip) {
    int n_az = cs.n_az;
    std::vector<int> p_of(n_z);
    for (int l = 0; l < n_z; ++l)
      p_of[l] = static_cast<int>(std::floor(double(slip_end) * (l + 0.5) / n_z + 0.5));
    if (p_of[0] != 0 || p_of[n_z - 1] != slip_end)
      throw ValidationError("slip schedule failed; raise n_z");
    for (int l = 1; l < n_z; ++l)
      if (std::abs(p_of[l] - p_of[l - 1]) > 1)
        throw ValidationError("slip schedule jumps more than one station");

    auto wrap = [n_az](int j) { return ((j % n_az) + n_az) % n_az; };
    for (size_t bi = 0; bi < cs.bands.size(); ++bi) {
      const auto& band = cs.bands[bi];
      RegionTag tag{RegionClass::Band, static_cast<int>(bi)};
      for (int l = 0; l < n_z; ++l) {
        int p = p_of[l];
        int qb = l > 0 ? std::min(p_of[l - 1], p) : p;
        int qt = l + 1 < n_z ? std::min(p, p_of[l + 1]) : p;
        for (int i = 0; i < n_az; ++i) {
          int i1 = wrap(i + 1);
          int j = wrap(i + p), j1 = wrap(i + p + 1);
          int s0b = n3(l, band.static_circle[i]), s1b = n3(l, band.static_circle[i1]);
          int a0b = n3(l, band.armor_circle[j]), a1b = n3(l, band.armor_circle[j1]);
          int s0t = n3(l + 1, band.static_circle[i]), s1t = n3(l + 1, band.static_circle[i1]);
          int a0t = n3(l + 1, band.armor_circle[j]), a1t = n3(l + 1, band.armor_circle[j1]);

          std::array<double, 3> cen{0, 0, 0};
          for (int id : {s0b, s1b, a0b, a1b, s0t, s1t, a0t, a1t})
            for (int k = 0; k < 3; ++k) cen[k] += m.X[id][k] / 8.0;
          int cn = static_cast<int>(m.X.size());
          m.X.push_back(cen);

          std::array<std::array<int, 3>, 12> ft;
          int nf = 0;
          auto push2 = [&](const std::array<std::array<int, 3>, 2>& two) {
            ft[nf++] = two[0];
            ft[nf++] = two[1];
          };
          // horizontal faces, matched to the shared interface triangulation
          if (qb == p) push2({{{s0b, s1b, a1b}, {s0b, a1b, a0b}}});
          else if (qb == p - 1) push2({{{s0b, s1b, a0b}, {s1b, a1b, a0b}}});
          else throw TangledMesh("band interface offset out of range");
          if (qt == p) push2({{{s0t, s1t, a1t}, {s0t, a1t, a0t}}});
          else if (qt == p - 1) push2({{{s0t, s1t, a0t}, {s1t, a1t, a0t}}});
          else throw TangledMesh("band interface offset out of range");
          // lateral faces, min-id diagonals shared with the neighbors
          push2(split_quad(s0b, s1b, s1t, s0t));
          push2(split_quad(a0b, a1b, a1t, a0t));
          push2(split_quad(s0b, a0b, a0t, s0t));
          push2(split_quad(s1b, a1b, a1t, s1t));
          for (int k = 0; k < 12; ++k)
            add_tet(cn, ft[k][0], ft[k][1], ft[k][2], tag, pm.omega_core, true);
        }
      }
    }
  }

  m.src_nodes.resize(n2);
  m.dst_nodes.resize(n2);
  for (int i = 0; i < n2; ++i) {
    m.src_nodes[i] = n3(0, i);
    m.dst_nodes[i] = n3(n_z, i);
  }
  for (int l = 0; l <= n_z; ++l)
    for (int id : cs.outer_circle) m.outer_nodes.push_back(n3(l, id));

  if (cs.r_stretch_inner > 0)
    m.stretch = {cs.r_stretch_inner, cs.r_outer, cs.r_outer};

  audit_conformity(m);
  return m;
}

EdgeSet build_edges(const PeriodicMesh& m) {
  static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EdgeSet es;
  es.tet_edges.resize(m.tets.size());
  std::unordered_map<uint64_t, int> idx;
  idx.reserve(m.tets.size() * 2);
  for (size_t t = 0; t < m.tets.size(); ++t) {
    for (int k = 0; k < 6; ++k) {
      int a = m.tets[t][pairs[k][0]], b = m.tets[t][pairs[k][1]];
      uint64_t key = (uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b));
      auto [it, fresh] = idx.try_emplace(key, static_cast<int>(es.edges.size()));
      if (fresh) es.edges.push_back({std::min(a, b), std::max(a, b)});
      es.tet_edges[t][k] = it->second;
    }
  }
  return es;
}

FacePairing pair_periodic_faces(const PeriodicMesh& m, const EdgeSet& es, double tol) {
  if (m.src_nodes.size() != m.dst_nodes.size())
    throw NoMatch("periodic faces carry different node counts");
  if (tol <= 0) {
    double rmax = 0;
    for (int i : m.src_nodes) rmax = std::max(rmax, std::hypot(m.X[i][0], m.X[i][1]));
    tol = 1e-9 * 2.0 * rmax;
  }
  double c = std::cos(m.model.theta), s = std::sin(m.model.theta);

  double cell = tol * 64.0;
  auto key_of = [cell](double x, double y) {
    auto qx = static_cast<int64_t>(std::floor(x / cell));
    auto qy = static_cast<int64_t>(std::floor(y / cell));
    return (uint64_t(uint32_t(qx)) << 32) | uint64_t(uint32_t(qy));
  };
  std::unordered_map<uint64_t, std::vector<int>> grid;
  std::vector<std::array<double, 2>> rot(m.src_nodes.size());
  for (size_t k = 0; k < m.src_nodes.size(); ++k) {
    const auto& p = m.X[m.src_nodes[k]];
    rot[k] = {p[0] * c - p[1] * s, p[0] * s + p[1] * c};
    grid[key_of(rot[k][0], rot[k][1])].push_back(static_cast<int>(k));
  }

  FacePairing fp;
  std::vector<int> src_of(m.X.size(), -1);
  for (int d : m.dst_nodes) {
    double x = m.X[d][0], y = m.X[d][1];
    int found = -1;
    int hits = 0;
    auto qx = static_cast<int64_t>(std::floor(x / cell));
    auto qy = static_cast<int64_t>(std::floor(y / cell));
    for (int64_t ax = qx - 1; ax <= qx + 1; ++ax)
      for (int64_t ay = qy - 1; ay <= qy + 1; ++ay) {
        auto it = grid.find((uint64_t(uint32_t(ax)) << 32) | uint64_t(uint32_t(ay)));
        if (it == grid.end()) continue;
        for (int k : it->second) {
          double dx = rot[k][0] - x, dy = rot[k][1] - y;
          if (dx * dx + dy * dy <= tol * tol) {
            found = k;
            ++hits;
          }
        }
      }
    if (hits != 1)
      throw NoMatch("face node at (" + fmt_double(x) + ", " + fmt_double(y) + ") has " +
                    std::to_string(hits) + " rotated partners");
    src_of[d] = m.src_nodes[found];
    fp.node_pairs.push_back({d, m.src_nodes[found]});
  }

  std::vector<uint8_t> in_dst(m.X.size(), 0), in_src(m.X.size(), 0);
  for (int d : m.dst_nodes) in_dst[d] = 1;
  for (int d : m.src_nodes) in_src[d] = 1;
  std::unordered_map<uint64_t, int> edge_idx;
  edge_idx.reserve(es.edges.size() * 2);
  for (size_t e = 0; e < es.edges.size(); ++e)
    edge_idx.emplace((uint64_t(es.edges[e][0]) << 32) | uint64_t(es.edges[e][1]),
                     static_cast<int>(e));

  size_t src_face_edges = 0;
  for (size_t e = 0; e < es.edges.size(); ++e) {
    int lo = es.edges[e][0], hi = es.edges[e][1];
    if (in_src[lo] && in_src[hi]) ++src_face_edges;
    if (!in_dst[lo] || !in_dst[hi]) continue;
    int a = src_of[lo], b = src_of[hi];
    auto it = edge_idx.find((uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b)));
    if (it == edge_idx.end())
      throw NoMatch("face triangulations do not correspond along edge " + std::to_string(lo) +
                    "-" + std::to_string(hi));
    fp.edge_pairs.push_back({static_cast<int>(e), it->second, a < b ? 1 : -1});
  }
  if (src_face_edges != fp.edge_pairs.size())
    throw NoMatch("face edge counts differ: " + std::to_string(src_face_edges) + " vs " +
                  std::to_string(fp.edge_pairs.size()));
  return fp;
}

void set_stretch_extent(PeriodicMesh& m, double R_eff) {
  if (!m.stretch.active()) throw BadRadius("mesh has no stretched annulus");
  if (!(R_eff > m.stretch.r0))
    throw BadRadius("farfield extent " + fmt_double(R_eff) + " must exceed the annulus start " +
                    fmt_double(m.stretch.r0));
  m.stretch.R_eff = R_eff;
}

PeriodicMesh build_cable_mesh(const CableSpec& spec, const MeshParams& p) {
  PeriodicModel pm = derive_periodic_model(spec);
  CrossSection cs = build_cross_section(spec, p);
  int m_slip = cs.n_az / pm.g;
  double h_xy = 2.0 * kPi * spec.r_pitch_m() / cs.n_az;
  int n_auto = static_cast<int>(std::lround(pm.L / (p.h_z_rel * h_xy)));
  int floor_nz = std::max(4, 2 * m_slip);
  int per_layer = 3 * static_cast<int>(cs.tris.size()) +
                  12 * static_cast<int>(cs.bands.size()) * cs.n_az;
  int cap = std::max(floor_nz, p.tet_budget / std::max(1, per_layer));
  int n_z = p.n_z > 0 ? std::max(p.n_z, floor_nz) : std::clamp(n_auto, floor_nz, cap);
  return extrude_slab(cs, pm, n_z, pm.L);
}

namespace {

std::vector<int> grow_air_rings(CrossSection& cs, std::vector<int> ring, double r_from,
                                double r_to, double growth, RegionTag tag) {
  double r = r_from;
  int n = static_cast<int>(ring.size());
  while (r < r_to * 0.9999) {
    double rn = std::min(r * growth, r_to);
    if (r_to / rn < 1.08) rn = r_to;
    std::vector<int> next(n);
    for (int t = 0; t < n; ++t) {
      const auto& q = cs.nodes[ring[t]];
      double ang = std::atan2(q[1], q[0]);
      next[t] = cs.add_node(rn * std::cos(ang), rn * std::sin(ang), RotBlock::Static);
    }
    add_ring_strip(cs, ring, next, tag);
    ring = std::move(next);
    r = rn;
  }
  return ring;
}

}  // namespace

PeriodicMesh build_wire_fixture(double a_m, double r_out_m, double L_m, int n_az,
                                int cond_rings, int n_z, double air_growth) {
  if (r_out_m <= 2 * a_m) throw BadRadius("wire fixture needs r_out > 2a");
  CrossSection cs;
  double ac = a_m * polygon_radius_correction(n_az);
  std::vector<double> radii{0.35 * ac};
  for (int k = 1; k <= cond_rings; ++k)
    radii.push_back(0.35 * ac + 0.65 * ac * std::pow(double(k) / cond_rings, 0.7));
  radii.back() = ac;
  std::vector<int> ring =
      add_polar_disk(cs, 0, 0, radii, n_az, 0.0, {RegionClass::Conductor, 0}, RotBlock::Static);
  ring = grow_air_rings(cs, std::move(ring), ac, r_out_m, air_growth, {RegionClass::Air, 0});
  cs.r_outer = r_out_m;
  cs.outer_circle = ring;
  check_cross_section(cs, 1e-9);
  PeriodicModel pm;
  pm.g = 1;
  pm.L = L_m;
  pm.theta = 0;
  pm.omega_core = 0;
  pm.omega_armor = 0;
  return extrude_slab(cs, pm, n_z, L_m);
}

PeriodicMesh build_trefoil_fixture(double a_m, double spacing_m, double r_out_m,
                                   double L_m, int n_az, int n_z, double fill_h_rel) {
  double d = spacing_m / 1.7320508075688772;
  if (spacing_m <= 2.2 * a_m) throw BadRadius("trefoil spacing too tight");
  CrossSection cs;
  double ac = a_m * polygon_radius_correction(n_az);
  std::vector<std::vector<int>> holes(3);
  for (int i = 0; i < 3; ++i) {
    double g = 2.0 * kPi * i / 3.0;
    std::vector<double> radii{0.4 * ac, 0.7 * ac, ac};
    holes[i] = add_polar_disk(cs, d * std::cos(g), d * std::sin(g), radii, n_az, g,
                              {RegionClass::Conductor, i}, RotBlock::Static);
  }
  double R1 = d + a_m + std::max(2.0 * a_m, 0.12 * spacing_m);
  int n_b = 48;
  std::vector<int> ring(n_b);
  for (int t = 0; t < n_b; ++t) {
    double ang = 2.0 * kPi * t / n_b;
    ring[t] = cs.add_node(R1 * std::cos(ang), R1 * std::sin(ang), RotBlock::Static);
  }
  delaunay_fill(cs, ring, holes, fill_h_rel * spacing_m, {RegionClass::Air, 0});
  ring = grow_air_rings(cs, std::move(ring), R1, r_out_m, 1.5, {RegionClass::Air, 0});
  cs.r_stretch_inner = r_out_m;
  double R6 = 1.5 * r_out_m;
  double r = r_out_m;
  for (int k = 1; k <= 3; ++k) {
    double rn = r_out_m + (R6 - r_out_m) * k / 3.0;
    std::vector<int> next(ring.size());
    for (size_t t = 0; t < ring.size(); ++t) {
      const auto& q = cs.nodes[ring[t]];
      double ang = std::atan2(q[1], q[0]);
      next[t] = cs.add_node(rn * std::cos(ang), rn * std::sin(ang), RotBlock::Static);
    }
    add_ring_strip(cs, ring, next, {RegionClass::Air, 0});
    ring = std::move(next);
    r = rn;
  }
  cs.r_outer = R6;
  cs.outer_circle = ring;
  check_cross_section(cs, 1e-9);
  PeriodicModel pm;
  pm.g = 1;
  pm.L = L_m;
  pm.theta = 0;
  pm.omega_core = 0;
  pm.omega_armor = 0;
  return extrude_slab(cs, pm, n_z, L_m);
}

std::string region_class_name(RegionClass c) {
  switch (c) {
    case RegionClass::Conductor: return "conductor";
    case RegionClass::Sheath: return "sheath";
    case RegionClass::Insulation: return "insulation";
    case RegionClass::Serving: return "serving";
    case RegionClass::FillerBundle: return "filler_bundle";
    case RegionClass::Band: return "band";
    case RegionClass::ArmorSteel: return "armor_steel";
    case RegionClass::ArmorPolymer: return "armor_polymer";
    case RegionClass::ArmorGap: return "armor_gap";
    case RegionClass::Jacket: return "jacket";
    case RegionClass::Exterior: return "exterior";
    case RegionClass::Air: return "air";
  }
  return "unknown";
}

MeshReport mesh_report(const PeriodicMesh& m) {
  MeshReport r;
  r.nodes = static_cast<int>(m.X.size());
  r.tets = static_cast<int>(m.tets.size());
  r.edges = static_cast<int>(build_edges(m).edges.size());
  r.n_z = m.n_z;
  r.L = m.model.L;
  r.min_volume = std::numeric_limits<double>::max();
  r.min_dihedral_deg = 180.0;
  for (size_t t = 0; t < m.tets.size(); ++t) {
    const auto& tt = m.tets[t];
    double v = tet_volume(m.X[tt[0]], m.X[tt[1]], m.X[tt[2]], m.X[tt[3]]);
    r.min_volume = std::min(r.min_volume, v);
    r.total_volume += v;
    r.region_volume[region_class_name(m.tet_region[t].cls)] += v;

    // outward normals of the four faces
    std::array<std::array<double, 3>, 4> nrm;
    for (int skip = 0; skip < 4; ++skip) {
      int f[3], n = 0;
      for (int k = 0; k < 4; ++k)
        if (k != skip) f[n++] = tt[k];
      const auto& A = m.X[f[0]];
      const auto& B = m.X[f[1]];
      const auto& C = m.X[f[2]];
      double ux = B[0] - A[0], uy = B[1] - A[1], uz = B[2] - A[2];
      double vx = C[0] - A[0], vy = C[1] - A[1], vz = C[2] - A[2];
      nrm[skip] = {uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
      // orient away from the skipped vertex
      const auto& D = m.X[tt[skip]];
      double dot = nrm[skip][0] * (D[0] - A[0]) + nrm[skip][1] * (D[1] - A[1]) +
                   nrm[skip][2] * (D[2] - A[2]);
      if (dot > 0)
        for (auto& x : nrm[skip]) x = -x;
    }
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        double ni = std::sqrt(nrm[i][0] * nrm[i][0] + nrm[i][1] * nrm[i][1] + nrm[i][2] * nrm[i][2]);
        double nj = std::sqrt(nrm[j][0] * nrm[j][0] + nrm[j][1] * nrm[j][1] + nrm[j][2] * nrm[j][2]);
        if (ni == 0 || nj == 0) continue;
        double cosd = -(nrm[i][0] * nrm[j][0] + nrm[i][1] * nrm[j][1] + nrm[i][2] * nrm[j][2]) /
                      (ni * nj);
        cosd = std::clamp(cosd, -1.0, 1.0);
        r.min_dihedral_deg = std::min(r.min_dihedral_deg, std::acos(cosd) * 180.0 / kPi);
      }
  }
  return r;
}

std::string format_mesh_report(const MeshReport& r) {
  std::ostringstream os;
  os << "nodes " << r.nodes << "\n";
  os << "tets " << r.tets << "\n";
  os << "edges " << r.edges << "\n";
  os << "n_z " << r.n_z << "\n";
  os << "L_m " << fmt_double(r.L) << "\n";
  os << "min_volume_m3 " << fmt_double(r.min_volume) << "\n";
  os << "total_volume_m3 " << fmt_double(r.total_volume) << "\n";
  os << "min_dihedral_deg " << fmt_double(r.min_dihedral_deg) << "\n";
  for (const auto& [k, v] : r.region_volume) os << "volume_" << k << "_m3 " << fmt_double(v) << "\n";
  return os.str();
}

}  // namespace cablefem
