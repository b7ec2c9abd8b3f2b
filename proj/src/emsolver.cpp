#include "cablefem/emsolver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <variant>

#include "cablefem/errors.hpp"
#include "fem_core.hpp"

namespace cablefem {

using namespace fem;

namespace {

constexpr cplx kJ{0.0, 1.0};

}  // namespace

int FieldSolution::group_index(const std::string& name) const {
  for (size_t k = 0; k < group_names.size(); ++k)
    if (group_names[k] == name) return static_cast<int>(k);
  throw UnknownGroup("no drive group named '" + name + "'");
}

// ---- EmSystem --------------------------------------------------------------

struct EmSystem::Impl {
  const PeriodicMesh* m = nullptr;
  const EdgeSet* es = nullptr;
  std::vector<double> sig;  // per tet
  std::vector<cplx> mu;
  double f = 0, omega = 0, cstr = 0;

  bool constrained = false;
  DofMap dof;
  int n_total = 0;

  struct Group {
    std::string name;
    GroupConstraint kind = GroupConstraint::Current;
    cplx target = 0;
    double G = 0;  // integral of sigma t.t dV
    int border = -1;
    std::vector<double> s;  // integral of sigma t.w_e dV, full edge space
  };
  std::vector<Group> groups;
  std::vector<int> gtet;

  Eigen::SparseMatrix<cplx> A;  // symmetrically equilibrated: D (K_red) D
  Eigen::VectorXcd b;
  Eigen::VectorXd D;  // 1/sqrt(|diag|), restores x = D y
  Eigen::UmfPackLU<Eigen::SparseMatrix<cplx>> lu;
  bool analyzed = false, factored = false;

  size_t n_edges() const { return es->edges.size(); }

  std::pair<double, int> resolve(int e) const { return dof.resolve(e); }

  void validate_materials() const {
    for (size_t t = 0; t < m->tets.size(); ++t) check_material(sig[t], mu[t], m->tet_region[t]);
  }

  // walks K + jwM on the full edge space
  template <class Emit>
  void walk(Emit&& emit) const {
    std::vector<cplx> nu(mu.size());
    for (size_t t = 0; t < mu.size(); ++t) nu[t] = 1.0 / (kMu0 * mu[t]);
    walk_operator(*m, *es, sig, nu, cstr, [&](int i, int j, cplx kv, double mv) {
      emit(i, j, kv + kJ * omega * mv);
    });
  }

  void assemble_reduced() {
    size_t border_nnz = 0;
    for (const auto& g : groups) {
      if (g.border < 0) continue;
      ++border_nnz;
      for (size_t e = 0; e < g.s.size(); ++e)
        if (g.s[e] != 0 && resolve(static_cast<int>(e)).second >= 0) border_nnz += 2;
    }
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(m->tets.size() * 36 + border_nnz);
    walk([&](int ge, int gf, cplx v) {
      auto [fa, ia] = resolve(ge);
      if (ia < 0) return;
      auto [fb, ib] = resolve(gf);
      if (ib < 0) return;
      trips.emplace_back(ia, ib, v * fa * fb);
    });
    cplx jw = kJ * omega;
    for (const auto& g : groups) {
      if (g.border < 0) continue;
      for (size_t e = 0; e < g.s.size(); ++e) {
        if (g.s[e] == 0) continue;
        auto [fa, ia] = resolve(static_cast<int>(e));
        if (ia < 0 || fa == 0) continue;
        cplx v = -g.s[e] * fa;
        trips.emplace_back(ia, g.border, v);
        trips.emplace_back(g.border, ia, v);
      }
      trips.emplace_back(g.border, g.border, g.G / jw);
    }
    std::vector<cplx> diag(n_total, cplx{0, 0});
    for (const auto& tr : trips)
      if (tr.row() == tr.col()) diag[tr.row()] += tr.value();
    D.resize(n_total);
    for (int i = 0; i < n_total; ++i) {
      double d = std::abs(diag[i]);
      D[i] = d > 0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    for (auto& tr : trips)
      tr = {tr.row(), tr.col(), tr.value() * (D[tr.row()] * D[tr.col()])};
    A.resize(n_total, n_total);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    factored = false;
  }
};

EmSystem::EmSystem(const PeriodicMesh& mesh, const EdgeSet& edges, const MaterialMap& materials,
                   double f) {
  impl = std::make_unique<Impl>();
  impl->m = &mesh;
  impl->es = &edges;
  impl->f = f;
  impl->omega = 2.0 * kPi * f;
  impl->cstr = stretch_slope(mesh.stretch);
  if (!(f > 0)) throw ValidationError("frequency must be positive");
  size_t T = mesh.tets.size();
  impl->sig.resize(T);
  impl->mu.resize(T);
  std::map<std::pair<int, int>, RegionMaterial> cache;
  for (size_t t = 0; t < T; ++t) {
    const RegionTag& tag = mesh.tet_region[t];
    auto key = std::make_pair(static_cast<int>(tag.cls), tag.index);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, materials(tag)).first;
    impl->sig[t] = it->second.sigma;
    impl->mu[t] = evaluate_permeability(it->second.mu, 0.0);
  }
  impl->validate_materials();
}

EmSystem::EmSystem(const PeriodicMesh& mesh, const EdgeSet& edges, std::vector<double> sigma_tet,
                   std::vector<cplx> mu_tet, double f) {
  impl = std::make_unique<Impl>();
  impl->m = &mesh;
  impl->es = &edges;
  impl->f = f;
  impl->omega = 2.0 * kPi * f;
  impl->cstr = stretch_slope(mesh.stretch);
  if (!(f > 0)) throw ValidationError("frequency must be positive");
  if (sigma_tet.size() != mesh.tets.size() || mu_tet.size() != mesh.tets.size())
    throw ValidationError("per-tet material arrays do not match the mesh");
  impl->sig = std::move(sigma_tet);
  impl->mu = std::move(mu_tet);
  impl->validate_materials();
}

EmSystem::EmSystem(EmSystem&&) noexcept = default;
EmSystem& EmSystem::operator=(EmSystem&&) noexcept = default;
EmSystem::~EmSystem() = default;

int EmSystem::n_edges() const { return static_cast<int>(impl->n_edges()); }
int EmSystem::n_unknowns() const { return impl->n_total; }

std::vector<cplx> EmSystem::apply_full(const std::vector<cplx>& x) const {
  if (x.size() != impl->n_edges()) throw ValidationError("vector length != edge count");
  std::vector<cplx> y(x.size(), cplx{0, 0});
  impl->walk([&](int i, int j, cplx v) { y[i] += v * x[j]; });
  return y;
}

double EmSystem::symmetry_error() const {
  size_t E = impl->n_edges();
  Eigen::SparseMatrix<cplx> Af(E, E);
  std::vector<Eigen::Triplet<cplx>> trips;
  impl->walk([&](int i, int j, cplx v) { trips.emplace_back(i, j, v); });
  Af.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseMatrix<cplx> D = Eigen::SparseMatrix<cplx>(Af.transpose()) - Af;
  double mx = 0, scale = 0;
  for (int k = 0; k < Af.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(Af, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < D.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(D, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return scale > 0 ? mx / scale : 0.0;
}

bool EmSystem::is_real() const {
  double mx = 0, mi = 0;
  impl->walk([&](int, int, cplx v) {
    mx = std::max(mx, std::abs(v));
    mi = std::max(mi, std::abs(v.imag()));
  });
  return mi <= 1e-14 * mx;
}

void EmSystem::constrain(const FacePairing& pairing, const DriveSpec& drives) {
  Impl& I = *impl;
  const PeriodicMesh& m = *I.m;
  if (std::abs(drives.f - I.f) > 1e-12 * I.f)
    throw ValidationError("drive frequency differs from the assembled frequency");

  GroupTables gt = build_groups(m, *I.es, I.sig, I.cstr, drives);
  I.gtet = std::move(gt.gtet);
  I.groups.clear();
  I.groups.resize(gt.groups.size());
  for (size_t k = 0; k < gt.groups.size(); ++k) {
    I.groups[k].name = std::move(gt.groups[k].name);
    I.groups[k].kind = gt.groups[k].kind;
    I.groups[k].target = gt.groups[k].target;
    I.groups[k].G = gt.groups[k].G;
    I.groups[k].s = std::move(gt.groups[k].s);
    I.groups[k].border = -1;
  }

  I.dof = build_dof_map(m, *I.es, pairing, I.sig);
  int nb = 0;
  for (auto& g : I.groups)
    if (g.kind != GroupConstraint::VoltageGradientZero) g.border = I.dof.n_u + nb++;
  I.n_total = I.dof.n_u + nb;

  cplx jw = kJ * I.omega;
  I.b = Eigen::VectorXcd::Zero(I.n_total);
  for (const auto& g : I.groups)
    if (g.kind == GroupConstraint::Current) I.b[g.border] = m.model.L * g.target / jw;

  I.constrained = true;
  I.analyzed = false;
  I.assemble_reduced();
}

void EmSystem::update_permeability(std::vector<cplx> mu_tet) {
  Impl& I = *impl;
  if (mu_tet.size() != I.mu.size()) throw ValidationError("permeability array does not match");
  I.mu = std::move(mu_tet);
  I.validate_materials();
  if (I.constrained) I.assemble_reduced();
}

FieldSolution EmSystem::solve() {
  Impl& I = *impl;
  if (!I.constrained) throw ValidationError("solve() before constrain()");
  const PeriodicMesh& m = *I.m;
  size_t E = I.n_edges();

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(I.n_total);
  double bnorm = I.b.norm();
  if (bnorm > 0) {
    if (!I.factored) {
      if (!I.analyzed) {
        // nested dissection keeps the fill of these extruded meshes tractable
        I.lu.umfpackControl()[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
        I.lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
        I.lu.analyzePattern(I.A);
        I.analyzed = true;
      }
      I.lu.factorize(I.A);
      if (I.lu.info() != Eigen::Success)
        throw SolverFailure("sparse factorization failed on " + std::to_string(I.n_total) +
                            " unknowns (gauge or material degeneracy)");
      I.factored = true;
    }
    Eigen::VectorXcd bs = I.b.cwiseProduct(I.D.cast<cplx>());
    double bsnorm = bs.norm();
    Eigen::VectorXcd y = I.lu.solve(bs);
    double relres = (bs - I.A * y).norm() / bsnorm;
    for (int it = 0; it < 3 && relres > 1e-13; ++it) {
      Eigen::VectorXcd r = bs - I.A * y;
      y += I.lu.solve(r);
      relres = (bs - I.A * y).norm() / bsnorm;
    }
    if (!(relres < 1e-10)) {
      std::ostringstream os;
      os << "linear solve stalled at relative residual " << relres;
      throw SolverFailure(os.str());
    }
    x = y.cwiseProduct(I.D.cast<cplx>());
  }

  FieldSolution sol;
  sol.mesh = &m;
  sol.edges = I.es;
  sol.f = I.f;
  sol.dofs.resize(E);
  for (size_t e = 0; e < E; ++e) {
    auto [fa, ia] = I.resolve(static_cast<int>(e));
    sol.dofs[e] = ia >= 0 ? fa * x[ia] : cplx{0, 0};
  }
  double Iscale = 0;
  for (const auto& g : I.groups)
    if (g.kind == GroupConstraint::Current) Iscale = std::max(Iscale, std::abs(g.target));
  for (const auto& g : I.groups) {
    cplx ek = g.border >= 0 ? cplx(x[g.border]) : cplx{0, 0};
    cplx sdot = 0;
    for (size_t e = 0; e < E; ++e)
      if (g.s[e] != 0) sdot += g.s[e] * sol.dofs[e];
    cplx Ik = (g.G * ek - kJ * I.omega * sdot) / m.model.L;
    if (Iscale > 0) {
      double tolk = 1e-9 * Iscale;
      if (g.kind == GroupConstraint::Current && std::abs(Ik - g.target) > tolk)
        throw SolverFailure("group '" + g.name + "' missed its current target by " +
                            std::to_string(std::abs(Ik - g.target)) + " A");
      if (g.kind == GroupConstraint::FloatingZeroCurrent && std::abs(Ik) > tolk)
        throw SolverFailure("floating group '" + g.name + "' carries " +
                            std::to_string(std::abs(Ik)) + " A");
    }
    sol.group_names.push_back(g.name);
    sol.group_kind.push_back(g.kind);
    sol.e_k.push_back(ek);
    sol.I_k.push_back(Ik);
  }
  sol.sigma_tet = I.sig;
  sol.mu_tet = I.mu;
  sol.group_of_tet = I.gtet;
  return sol;
}

// ---- one-call drivers ------------------------------------------------------

FieldSolution solve_frequency(const PeriodicMesh& mesh, const EdgeSet& edges,
                              const FacePairing& pairing, const MaterialMap& materials,
                              const DriveSpec& drives) {
  EmSystem sys(mesh, edges, materials, drives.f);
  sys.constrain(pairing, drives);
  return sys.solve();
}

FieldSolution solve_nonlinear_mu(const PeriodicMesh& mesh, const EdgeSet& edges,
                                 const FacePairing& pairing, const MaterialMap& materials,
                                 const DriveSpec& drives, PicardOptions opt) {
  size_t T = mesh.tets.size();
  std::vector<double> sig(T);
  std::vector<cplx> mu(T);
  std::vector<int> model_of(T, -1);
  std::vector<MaterialModel> models;
  std::map<std::pair<int, int>, std::pair<RegionMaterial, int>> cache;
  for (size_t t = 0; t < T; ++t) {
    const RegionTag& tag = mesh.tet_region[t];
    auto key = std::make_pair(static_cast<int>(tag.cls), tag.index);
    auto it = cache.find(key);
    if (it == cache.end()) {
      RegionMaterial rm = materials(tag);
      int idx = -1;
      if (!std::holds_alternative<LinearComplex>(rm.mu)) {
        idx = static_cast<int>(models.size());
        models.push_back(rm.mu);
      }
      it = cache.emplace(key, std::make_pair(rm, idx)).first;
    }
    sig[t] = it->second.first.sigma;
    mu[t] = evaluate_permeability(it->second.first.mu, 0.0);
    model_of[t] = it->second.second;
  }

  EmSystem sys(mesh, edges, sig, mu, drives.f);
  sys.constrain(pairing, drives);
  std::vector<IterationRecord> log;
  for (int iter = 1; iter <= opt.cap; ++iter) {
    FieldSolution sol = sys.solve();
    double maxrel = 0, Hmax = 0;
    for (size_t t = 0; t < T; ++t) {
      if (model_of[t] < 0) continue;
      TetFrame fr = frame_of(mesh, edges, t);
      Vec3 Br = {0, 0, 0}, Bi = {0, 0, 0};
      for (int k = 0; k < 6; ++k) {
        cplx a = sol.dofs[fr.ge[k]];
        Br = axpy(a.real(), fr.ce[k], Br);
        Bi = axpy(a.imag(), fr.ce[k], Bi);
      }
      double Babs = std::sqrt(dot(Br, Br) + dot(Bi, Bi));
      double H = Babs / (kMu0 * std::abs(mu[t]));
      Hmax = std::max(Hmax, H);
      cplx munew = evaluate_permeability(models[model_of[t]], H);
      cplx applied = mu[t] + opt.relax * (munew - mu[t]);
      maxrel = std::max(maxrel, std::abs(applied - mu[t]) / std::abs(mu[t]));
      mu[t] = applied;
    }
    log.push_back({iter, maxrel, Hmax});
    if (maxrel < opt.tol) {
      sol.log = log;
      return sol;
    }
    sys.update_permeability(mu);
  }
  std::ostringstream os;
  os << "permeability fixed point did not converge in " << opt.cap << " iterations;";
  for (const auto& r : log)
    os << " [" << r.iter << "] dmu = " << r.max_rel_dmu << ", Hmax = " << r.H_max << ";";
  throw NoConvergence(os.str());
}

// ---- energies and probes ---------------------------------------------------

EnergyBreakdown compute_energy(const FieldSolution& sol) {
  const PeriodicMesh& m = *sol.mesh;
  const EdgeSet& es = *sol.edges;
  double omega = 2.0 * kPi * sol.f;
  double cstr = stretch_slope(m.stretch);
  bool stretch_on = m.stretch.active() && cstr != 0.0;
  EnergyBreakdown out;
  for (size_t t = 0; t < m.tets.size(); ++t) {
    TetFrame fr = frame_of(m, es, t);
    std::string cls = region_class_name(m.tet_region[t].cls);
    cplx nu = 1.0 / (kMu0 * sol.mu_tet[t]);
    double sg = sol.sigma_tet[t];
    bool strt = false;
    if (stretch_on)
      for (int i = 0; i < 4 && !strt; ++i)
        strt = std::hypot(fr.p[i][0], fr.p[i][1]) > m.stretch.r0 * (1.0 + 1e-12);

    Vec3 Br = {0, 0, 0}, Bi = {0, 0, 0};
    for (int k = 0; k < 6; ++k) {
      cplx a = sol.dofs[fr.ge[k]];
      Br = axpy(a.real(), fr.ce[k], Br);
      Bi = axpy(a.imag(), fr.ce[k], Bi);
    }
    double qmag = 0;  // integral of B* . metric . B
    if (!strt)
      qmag = fr.V * (dot(Br, Br) + dot(Bi, Bi));
    else
      for (int q = 0; q < 4; ++q) {
        Vec3 xq = {0, 0, 0};
        for (int i = 0; i < 4; ++i) xq = axpy(kQ[q][i], fr.p[i], xq);
        Diag d = metric_at(m.stretch, cstr, xq[0], xq[1]);
        qmag += fr.V / 4.0 * (bilin_inv(d, Br, Br) + bilin_inv(d, Bi, Bi));
      }
    out.stored_J += 0.5 * nu.real() * qmag;
    out.stored_by_class[cls] += 0.5 * nu.real() * qmag;
    if (nu.imag() != 0) {
      out.magnetic_W += omega * nu.imag() * qmag;
      out.magnetic_by_class[cls] += omega * nu.imag() * qmag;
    }

    if (sg > 0) {
      int gk = sol.group_of_tet[t];
      cplx ek = gk >= 0 ? sol.e_k[gk] : cplx{0, 0};
      double om = m.tet_omega[t];
      double pc = 0;
      for (int q = 0; q < 4; ++q) {
        Vec3 xq = {0, 0, 0};
        for (int i = 0; i < 4; ++i) xq = axpy(kQ[q][i], fr.p[i], xq);
        Diag d = metric_at(m.stretch, cstr, xq[0], xq[1]);
        Vec3 th = twist_dir(om, xq[0], xq[1]);
        Vec3 Ar = {0, 0, 0}, Ai = {0, 0, 0};
        for (int k = 0; k < 6; ++k) {
          int a = fr.le[k][0], bn = fr.le[k][1];
          Vec3 we = axpy(kQ[q][a], fr.g[bn], scale(fr.g[a], -kQ[q][bn]));
          cplx dk = sol.dofs[fr.ge[k]];
          Ar = axpy(dk.real(), we, Ar);
          Ai = axpy(dk.imag(), we, Ai);
        }
        // E = ek t - j w A
        Vec3 Er = axpy(ek.real(), th, scale(Ai, omega));
        Vec3 Ei = axpy(ek.imag(), th, scale(Ar, -omega));
        pc += fr.V / 4.0 * sg * (bilin(d, Er, Er) + bilin(d, Ei, Ei));
      }
      out.conduction_W += pc;
      out.conduction_by_class[cls] += pc;
    }
  }
  for (size_t k = 0; k < sol.e_k.size(); ++k)
    out.input_W += (sol.e_k[k] * std::conj(sol.I_k[k])).real() * m.model.L;
  return out;
}

std::array<cplx, 3> field_at(const FieldSolution& sol, const std::array<double, 3>& p) {
  const PeriodicMesh& m = *sol.mesh;
  const EdgeSet& es = *sol.edges;
  if (m.stretch.active() && std::hypot(p[0], p[1]) >= m.stretch.r0 * (1.0 - 1e-12))
    throw PointOutsideMesh("probe point lies in the stretched annulus");
  double L = m.model.L;
  double ztol = 1e-9 * std::max(L, 1.0);
  if (p[2] < -ztol || p[2] > L + ztol)
    throw PointOutsideMesh("probe z outside the slab");
  for (size_t t = 0; t < m.tets.size(); ++t) {
    const auto& tet = m.tets[t];
    double zmin = m.X[tet[0]][2], zmax = zmin;
    for (int i = 1; i < 4; ++i) {
      zmin = std::min(zmin, m.X[tet[i]][2]);
      zmax = std::max(zmax, m.X[tet[i]][2]);
    }
    if (p[2] < zmin - ztol || p[2] > zmax + ztol) continue;
    bool miss = false;
    for (int c = 0; c < 2 && !miss; ++c) {
      double lo = m.X[tet[0]][c], hi = lo;
      for (int i = 1; i < 4; ++i) {
        lo = std::min(lo, m.X[tet[i]][c]);
        hi = std::max(hi, m.X[tet[i]][c]);
      }
      miss = p[c] < lo - 1e-12 || p[c] > hi + 1e-12;
    }
    if (miss) continue;
    TetFrame fr = frame_of(m, es, t);
    Vec3 rel = sub(p, fr.p[0]);
    double l1 = dot(fr.g[1], rel), l2 = dot(fr.g[2], rel), l3 = dot(fr.g[3], rel);
    double l0 = 1.0 - l1 - l2 - l3;
    double eps = 1e-9;
    if (l0 < -eps || l1 < -eps || l2 < -eps || l3 < -eps) continue;
    cplx Bx = 0, By = 0, Bz = 0;
    for (int k = 0; k < 6; ++k) {
      cplx a = sol.dofs[fr.ge[k]];
      Bx += a * fr.ce[k][0];
      By += a * fr.ce[k][1];
      Bz += a * fr.ce[k][2];
    }
    return {Bx, By, Bz};
  }
  throw PointOutsideMesh("probe point not inside any tet");
}

// ---- standard materials and drives ----------------------------------------

MaterialMap cable_materials(const CableSpec& spec, double sigma_exterior, bool armor_present) {
  return [spec, sigma_exterior, armor_present](const RegionTag& tag) -> RegionMaterial {
    switch (tag.cls) {
      case RegionClass::Conductor:
        return {spec.sigma_c(), LinearComplex{}};
      case RegionClass::Sheath:
        return {spec.sigma_s(), LinearComplex{}};
      case RegionClass::ArmorSteel:
        if (armor_present) return {spec.sigma_a(), spec.armor_mu};
        return {0.0, LinearComplex{}};
      case RegionClass::Exterior:
        return {sigma_exterior, LinearComplex{}};
      default:
        return {0.0, LinearComplex{}};
    }
  };
}

DriveSpec balanced_three_phase(double I_rms, double f, Bonding bonding, bool armor_group) {
  DriveSpec d;
  d.f = f;
  const char* ph[3] = {"phase_a", "phase_b", "phase_c"};
  const char* sh[3] = {"sheath_a", "sheath_b", "sheath_c"};
  double angs[3] = {0.0, -2.0 * kPi / 3.0, 2.0 * kPi / 3.0};
  for (int i = 0; i < 3; ++i) {
    DriveGroup g;
    g.name = ph[i];
    g.regions = {{RegionClass::Conductor, i}};
    g.constraint = GroupConstraint::Current;
    g.I_target = I_rms * cplx{std::cos(angs[i]), std::sin(angs[i])};
    d.groups.push_back(std::move(g));
  }
  GroupConstraint bond = bonding == Bonding::SinglePoint ? GroupConstraint::FloatingZeroCurrent
                                                        : GroupConstraint::VoltageGradientZero;
  for (int i = 0; i < 3; ++i) {
    DriveGroup g;
    g.name = sh[i];
    g.regions = {{RegionClass::Sheath, i}};
    g.constraint = bond;
    d.groups.push_back(std::move(g));
  }
  if (armor_group) {
    DriveGroup g;
    g.name = "armor";
    g.regions = {{RegionClass::ArmorSteel, -1}};
    g.constraint = bond;
    d.groups.push_back(std::move(g));
  }
  return d;
}

DriveSpec zero_sequence_drive(double I0, double f, bool armor_group) {
  DriveSpec d;
  d.f = f;
  const char* ph[3] = {"phase_a", "phase_b", "phase_c"};
  for (int i = 0; i < 3; ++i) {
    DriveGroup g;
    g.name = ph[i];
    g.regions = {{RegionClass::Conductor, i}};
    g.constraint = GroupConstraint::Current;
    g.I_target = I0;
    d.groups.push_back(std::move(g));
  }
  DriveGroup ret;
  ret.name = "return";
  ret.regions = {{RegionClass::Sheath, -1}, {RegionClass::Exterior, -1}};
  if (armor_group) ret.regions.push_back({RegionClass::ArmorSteel, -1});
  ret.constraint = GroupConstraint::Current;
  ret.I_target = -3.0 * I0;
  d.groups.push_back(std::move(ret));
  return d;
}

}  // namespace cablefem
