#pragma once
// Shared lowest-order tetrahedral edge-element machinery for the frequency-
// and time-domain solvers: element frames, the radial-stretch metric, the
// operator walker, the gauged dof reduction, and drive-group coupling tables.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cablefem/emsolver.hpp"
#include "cablefem/errors.hpp"
#include "cablefem/mesh.hpp"

namespace cablefem::fem {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu0 = 4e-7 * kPi;

using Vec3 = std::array<double, 3>;

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline Vec3 axpy(double s, const Vec3& a, const Vec3& b) {
  return {s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2]};
}

// 4-point Gauss rule on the tet, degree-2 exact; row = point, col = lambda
constexpr double kQa = 0.5854101966249685;
constexpr double kQb = 0.13819660112501052;
constexpr double kQ[4][4] = {{kQa, kQb, kQb, kQb},
                             {kQb, kQa, kQb, kQb},
                             {kQb, kQb, kQa, kQb},
                             {kQb, kQb, kQb, kQa}};

struct TetFrame {
  double V = 0;
  Vec3 p[4];
  Vec3 g[4];     // grad lambda
  int le[6][2];  // local node pair, ordered so global(a) < global(b)
  int ge[6];     // global edge ids
  Vec3 ce[6];    // curl w_e = 2 grad_a x grad_b, constant
};

inline TetFrame frame_of(const PeriodicMesh& m, const EdgeSet& es, size_t t) {
  const auto& tet = m.tets[t];
  TetFrame fr;
  for (int i = 0; i < 4; ++i) fr.p[i] = m.X[tet[i]];
  Vec3 d1 = sub(fr.p[1], fr.p[0]), d2 = sub(fr.p[2], fr.p[0]), d3 = sub(fr.p[3], fr.p[0]);
  double V6 = dot(d1, cross(d2, d3));
  fr.V = V6 / 6.0;
  fr.g[1] = scale(cross(d2, d3), 1.0 / V6);
  fr.g[2] = scale(cross(d3, d1), 1.0 / V6);
  fr.g[3] = scale(cross(d1, d2), 1.0 / V6);
  fr.g[0] = {-fr.g[1][0] - fr.g[2][0] - fr.g[3][0], -fr.g[1][1] - fr.g[2][1] - fr.g[3][1],
             -fr.g[1][2] - fr.g[2][2] - fr.g[3][2]};
  static const int kLoc[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (int k = 0; k < 6; ++k) {
    int a = kLoc[k][0], b = kLoc[k][1];
    if (tet[a] > tet[b]) std::swap(a, b);
    fr.le[k][0] = a;
    fr.le[k][1] = b;
    fr.ge[k] = es.tet_edges[t][k];
    fr.ce[k] = scale(cross(fr.g[a], fr.g[b]), 2.0);
  }
  return fr;
}

// Radial-stretch metric: diagonal material factors in the local cylindrical
// frame. sigma-type tensors scale by (fr, fphi, fz), nu-type by the inverse.
struct Diag {
  double fr = 1, fphi = 1, fz = 1;
  double cx = 1, sx = 0;
  bool ident = true;
};

inline double stretch_slope(const StretchSpec& st) {
  if (!st.active()) return 0.0;
  if (std::isinf(st.R_eff)) return 1.0;
  return 1.0 - (st.r1 - st.r0) / (st.R_eff - st.r0);
}

inline Diag metric_at(const StretchSpec& st, double cstr, double x, double y) {
  Diag d;
  if (cstr == 0.0) return d;
  double rho = std::hypot(x, y);
  if (rho <= st.r0) return d;
  double w = st.r1 - st.r0;
  double u = std::min(rho - st.r0, w * (1.0 - 1e-9));
  double s = 1.0 - cstr * u / w;
  double R = st.r0 + u / s;
  double Rp = 1.0 / (s * s);
  d.fr = R / (rho * Rp);
  d.fphi = rho * Rp / R;
  d.fz = R * Rp / rho;
  d.cx = x / rho;
  d.sx = y / rho;
  d.ident = false;
  return d;
}

inline double bilin(const Diag& d, const Vec3& a, const Vec3& b) {
  if (d.ident) return dot(a, b);
  double ar = d.cx * a[0] + d.sx * a[1], ap = -d.sx * a[0] + d.cx * a[1];
  double br = d.cx * b[0] + d.sx * b[1], bp = -d.sx * b[0] + d.cx * b[1];
  return d.fr * ar * br + d.fphi * ap * bp + d.fz * a[2] * b[2];
}

inline double bilin_inv(const Diag& d, const Vec3& a, const Vec3& b) {
  if (d.ident) return dot(a, b);
  double ar = d.cx * a[0] + d.sx * a[1], ap = -d.sx * a[0] + d.cx * a[1];
  double br = d.cx * b[0] + d.sx * b[1], bp = -d.sx * b[0] + d.cx * b[1];
  return ar * br / d.fr + ap * bp / d.fphi + a[2] * b[2] / d.fz;
}

inline void check_material(double sigma, cplx mu, const RegionTag& tag) {
  bool bad = !std::isfinite(sigma) || sigma < 0 || !std::isfinite(mu.real()) ||
             !std::isfinite(mu.imag()) || mu.real() <= 0 || mu.imag() > 0;
  if (bad) {
    std::ostringstream os;
    os << "invalid material in region " << region_class_name(tag.cls) << "[" << tag.index
       << "]: sigma = " << sigma << ", mu_r = " << mu.real() << " + " << mu.imag() << "j";
    throw SingularMaterial(os.str());
  }
}

// unit tangent of the twisted extrusion through (x, y), twist rate om
inline Vec3 twist_dir(double om, double x, double y) {
  double n = std::sqrt(1.0 + om * om * (x * x + y * y));
  return {-om * y / n, om * x / n, 1.0 / n};
}

// Walks all tets and emits every (row, col) entry of the reluctivity-weighted
// curl-curl operator and the conductivity mass on the full edge space:
// emit(ge, gf, k, m) with k = nu-weighted stiffness and m = sigma-weighted
// mass (no frequency factor). Emission order is deterministic.
template <class Nu, class Emit>
void walk_operator(const PeriodicMesh& m, const EdgeSet& es, const std::vector<double>& sig,
                   const std::vector<Nu>& nu, double cstr, Emit&& emit) {
  bool stretch_on = m.stretch.active() && cstr != 0.0;
  double r0 = m.stretch.r0;
  for (size_t t = 0; t < m.tets.size(); ++t) {
    TetFrame fr = frame_of(m, es, t);
    Nu nv = nu[t];
    double sg = sig[t];
    bool strt = false;
    if (stretch_on)
      for (int i = 0; i < 4 && !strt; ++i)
        strt = std::hypot(fr.p[i][0], fr.p[i][1]) > r0 * (1.0 + 1e-12);

    Nu lk[6][6];
    double lm[6][6];
    if (!strt) {
      for (int e = 0; e < 6; ++e)
        for (int f = e; f < 6; ++f) {
          lk[e][f] = nv * (fr.V * dot(fr.ce[e], fr.ce[f]));
          double me = 0;
          if (sg > 0) {
            int a = fr.le[e][0], b = fr.le[e][1], c = fr.le[f][0], d = fr.le[f][1];
            auto ii = [&](int i, int j) { return fr.V / 20.0 * (i == j ? 2.0 : 1.0); };
            me = sg * (dot(fr.g[b], fr.g[d]) * ii(a, c) - dot(fr.g[b], fr.g[c]) * ii(a, d) -
                       dot(fr.g[a], fr.g[d]) * ii(b, c) + dot(fr.g[a], fr.g[c]) * ii(b, d));
          }
          lm[e][f] = me;
        }
    } else {
      for (int e = 0; e < 6; ++e)
        for (int f = e; f < 6; ++f) {
          lk[e][f] = Nu{};
          lm[e][f] = 0;
        }
      for (int q = 0; q < 4; ++q) {
        Vec3 xq = {0, 0, 0};
        for (int i = 0; i < 4; ++i) xq = axpy(kQ[q][i], fr.p[i], xq);
        Diag d = metric_at(m.stretch, cstr, xq[0], xq[1]);
        Vec3 wq[6];
        for (int e = 0; e < 6; ++e) {
          int a = fr.le[e][0], b = fr.le[e][1];
          wq[e] = axpy(kQ[q][a], fr.g[b], scale(fr.g[a], -kQ[q][b]));
        }
        double wV = fr.V / 4.0;
        for (int e = 0; e < 6; ++e)
          for (int f = e; f < 6; ++f) {
            lk[e][f] += nv * (wV * bilin_inv(d, fr.ce[e], fr.ce[f]));
            if (sg > 0) lm[e][f] += sg * wV * bilin(d, wq[e], wq[f]);
          }
      }
    }
    for (int e = 0; e < 6; ++e)
      for (int f = e; f < 6; ++f) {
        emit(fr.ge[e], fr.ge[f], lk[e][f], lm[e][f]);
        if (f != e) emit(fr.ge[f], fr.ge[e], lk[e][f], lm[e][f]);
      }
  }
}

// ---- gauged dof reduction --------------------------------------------------
// Eliminates periodic slave edges, grounds the outer rim, and gauges the
// remainder with a spanning-tree over the node graph collapsed by periodic
// node pairs, rim edges, and conducting tets.

struct DofMap {
  static constexpr std::uint8_t kUnknown = 0, kSlave = 1, kZero = 2;
  std::vector<std::uint8_t> state;
  std::vector<int> aux;  // unknown -> reduced index, slave -> master edge
  std::vector<std::int8_t> sgn;
  int n_u = 0;

  std::pair<double, int> resolve(int e) const {
    if (state[e] == kUnknown) return {1.0, aux[e]};
    if (state[e] == kZero) return {0.0, -1};
    int ms = aux[e];
    if (state[ms] == kUnknown) return {static_cast<double>(sgn[e]), aux[ms]};
    return {0.0, -1};
  }
};

inline DofMap build_dof_map(const PeriodicMesh& m, const EdgeSet& es, const FacePairing& pairing,
                            const std::vector<double>& sig) {
  size_t E = es.edges.size(), T = m.tets.size(), N = m.X.size();
  DofMap d;
  d.state.assign(E, DofMap::kUnknown);
  d.aux.assign(E, -1);
  d.sgn.assign(E, 1);
  for (const auto& ep : pairing.edge_pairs) {
    d.state[ep[0]] = DofMap::kSlave;
    d.aux[ep[0]] = ep[1];
    d.sgn[ep[0]] = static_cast<std::int8_t>(ep[2]);
  }
  std::vector<char> outer(N, 0);
  for (int n : m.outer_nodes) outer[n] = 1;
  for (size_t e = 0; e < E; ++e)
    if (d.state[e] == DofMap::kUnknown && outer[es.edges[e][0]] && outer[es.edges[e][1]])
      d.state[e] = DofMap::kZero;

  std::vector<int> uf(N);
  for (size_t i = 0; i < N; ++i) uf[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (uf[a] != a) a = uf[a] = uf[uf[a]];
    return a;
  };
  auto join = [&](int a, int b) { uf[find(a)] = find(b); };
  for (const auto& np : pairing.node_pairs) join(np[0], np[1]);
  for (size_t e = 0; e < E; ++e)
    if (d.state[e] == DofMap::kZero) join(es.edges[e][0], es.edges[e][1]);
  for (size_t t = 0; t < T; ++t)
    if (sig[t] > 0)
      for (int i = 1; i < 4; ++i) join(m.tets[t][0], m.tets[t][i]);

  int next = 0;
  for (size_t e = 0; e < E; ++e) {
    if (d.state[e] != DofMap::kUnknown) continue;
    int ra = find(es.edges[e][0]), rb = find(es.edges[e][1]);
    if (ra != rb) {
      join(ra, rb);
      d.state[e] = DofMap::kZero;  // spanning-tree edge, gauged away
    } else {
      d.aux[e] = next++;
    }
  }
  d.n_u = next;
  return d;
}

// ---- drive-group coupling --------------------------------------------------

struct GroupData {
  std::string name;
  GroupConstraint kind = GroupConstraint::Current;
  cplx target = 0;
  double G = 0;           // integral of sigma t.t dV
  std::vector<double> s;  // integral of sigma t.w_e dV, full edge space
};

struct GroupTables {
  std::vector<GroupData> groups;
  std::vector<int> gtet;  // tet -> group, -1 ungrouped
};

inline GroupTables build_groups(const PeriodicMesh& m, const EdgeSet& es,
                                const std::vector<double>& sig, double cstr,
                                const DriveSpec& drives) {
  size_t E = es.edges.size(), T = m.tets.size();
  if (drives.groups.empty()) throw ValidationError("drive has no groups");
  bool any_current = false;
  for (const auto& g : drives.groups) any_current |= g.constraint == GroupConstraint::Current;
  if (!any_current) throw ValidationError("drive needs at least one Current group");

  // region -> group lookup; index -1 in a tag is a class-wide wildcard
  std::map<std::pair<int, int>, int> exact;
  std::map<int, int> wild;
  for (size_t k = 0; k < drives.groups.size(); ++k) {
    for (const RegionTag& tag : drives.groups[k].regions) {
      int cls = static_cast<int>(tag.cls);
      if (tag.index < 0) {
        if (!wild.emplace(cls, static_cast<int>(k)).second)
          throw OverConstrained("region class " + region_class_name(tag.cls) +
                                " claimed by two groups");
      } else {
        if (!exact.emplace(std::make_pair(cls, tag.index), static_cast<int>(k)).second)
          throw OverConstrained("region " + region_class_name(tag.cls) + "[" +
                                std::to_string(tag.index) + "] claimed by two groups");
      }
    }
  }
  for (const auto& [key, g] : exact)
    if (wild.count(key.first) && wild[key.first] != g)
      throw OverConstrained("region class " + std::to_string(key.first) +
                            " claimed by both a wildcard and an exact group");

  GroupTables gt;
  gt.groups.resize(drives.groups.size());
  for (size_t k = 0; k < drives.groups.size(); ++k) {
    gt.groups[k].name = drives.groups[k].name;
    gt.groups[k].kind = drives.groups[k].constraint;
    gt.groups[k].target = drives.groups[k].I_target;
    gt.groups[k].s.assign(E, 0.0);
    gt.groups[k].G = 0;
  }
  gt.gtet.assign(T, -1);
  for (size_t t = 0; t < T; ++t) {
    const RegionTag& tag = m.tet_region[t];
    auto it = exact.find(std::make_pair(static_cast<int>(tag.cls), tag.index));
    if (it != exact.end())
      gt.gtet[t] = it->second;
    else {
      auto iw = wild.find(static_cast<int>(tag.cls));
      if (iw != wild.end()) gt.gtet[t] = iw->second;
    }
    if (sig[t] > 0 && gt.gtet[t] < 0)
      throw ValidationError("conducting region " + region_class_name(tag.cls) + "[" +
                            std::to_string(tag.index) + "] belongs to no drive group");
  }

  // group source vectors s_k and conductances G_k
  for (size_t t = 0; t < T; ++t) {
    int gk = gt.gtet[t];
    if (gk < 0 || sig[t] <= 0) continue;
    TetFrame fr = frame_of(m, es, t);
    double om = m.tet_omega[t];
    GroupData& g = gt.groups[gk];
    for (int q = 0; q < 4; ++q) {
      Vec3 xq = {0, 0, 0};
      for (int i = 0; i < 4; ++i) xq = axpy(kQ[q][i], fr.p[i], xq);
      Diag d = metric_at(m.stretch, cstr, xq[0], xq[1]);
      Vec3 th = twist_dir(om, xq[0], xq[1]);
      double wV = fr.V / 4.0 * sig[t];
      g.G += wV * bilin(d, th, th);
      for (int e = 0; e < 6; ++e) {
        int a = fr.le[e][0], bn = fr.le[e][1];
        Vec3 we = axpy(kQ[q][a], fr.g[bn], scale(fr.g[a], -kQ[q][bn]));
        g.s[fr.ge[e]] += wV * bilin(d, th, we);
      }
    }
  }
  for (const auto& g : gt.groups)
    if (g.G <= 0)
      throw ValidationError("drive group '" + g.name + "' has no conducting volume");
  return gt;
}

}  // namespace cablefem::fem
