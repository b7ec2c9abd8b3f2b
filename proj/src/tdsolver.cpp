#include "cablefem/tdsolver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <variant>

#include "cablefem/errors.hpp"
#include "fem_core.hpp"

namespace cablefem {

using namespace fem;

namespace {

// Inverse of the arctangent magnetisation law: H(B) = nu0 tan(beta B)/beta,
// beta = pi/(2 B_sat). Linearly extended past u_c = 1.5 rad so Newton
// iterates that overshoot B_sat stay finite.
struct BhLaw {
  double nu0 = 0, beta = 0;
  double bc = 0, Hc = 0, dHc = 0;

  BhLaw(double mu_initial, double B_sat) {
    nu0 = 1.0 / (kMu0 * mu_initial);
    beta = kPi / (2.0 * B_sat);
    double uc = 1.5, tc = std::tan(uc);
    bc = uc / beta;
    Hc = nu0 * tc / beta;
    dHc = nu0 * (1.0 + tc * tc);
  }

  // secant reluctivity H/B and tangent slope dH/dB at |B| = b
  void eval(double b, double& nu, double& dhdb) const {
    if (b < 1e-12) {
      nu = nu0;
      dhdb = nu0;
      return;
    }
    if (b >= bc) {
      nu = (Hc + dHc * (b - bc)) / b;
      dhdb = dHc;
      return;
    }
    double u = beta * b, tu = std::tan(u);
    nu = nu0 * tu / u;
    dhdb = nu0 * (1.0 + tu * tu);
  }
};

// one saturating tet, with its edges already resolved to reduced dofs
struct NlTet {
  int law = 0;
  double V = 0;
  double fac[6];
  int idx[6];
  Vec3 ce[6];
};

std::string region_str(const RegionTag& tag) {
  return region_class_name(tag.cls) + "[" + std::to_string(tag.index) + "]";
}

}  // namespace

Waveforms solve_transient(const PeriodicMesh& m, const EdgeSet& es, const FacePairing& pairing,
                          const MaterialMap& materials, const TransientCase& tc) {
  double f0 = tc.drives.f;
  if (!(f0 > 0)) throw ValidationError("frequency must be positive");
  if (tc.steps_per_period < 100) throw ValidationError("steps_per_period must be at least 100");
  if (tc.periods_discard < 1 || tc.periods_total <= tc.periods_discard)
    throw ValidationError("need periods_total > periods_discard >= 1");
  if (!(tc.theta >= 0.5 && tc.theta <= 1.0)) throw ValidationError("theta must lie in [0.5, 1]");
  if (!(tc.newton_tol > 0) || tc.newton_max < 1)
    throw ValidationError("Newton settings must be positive");

  size_t T = m.tets.size();
  double cstr = stretch_slope(m.stretch);
  double omega = 2.0 * kPi * f0;
  double th = tc.theta;
  int spp = tc.steps_per_period;
  double dt = 1.0 / (f0 * spp);
  int Ntot = tc.periods_total * spp, Nd = tc.periods_discard * spp;

  // material resolution: instantaneous laws only
  std::vector<double> sig(T), nulin(T, 0.0);
  std::vector<int> law_of(T, -1);
  std::vector<BhLaw> laws;
  {
    struct Entry {
      double sigma, nu;
      int law;
    };
    std::map<std::pair<int, int>, Entry> cache;
    for (size_t t = 0; t < T; ++t) {
      const RegionTag& tag = m.tet_region[t];
      auto key = std::make_pair(static_cast<int>(tag.cls), tag.index);
      auto it = cache.find(key);
      if (it == cache.end()) {
        RegionMaterial rm = materials(tag);
        Entry en{rm.sigma, 0.0, -1};
        if (const auto* lc = std::get_if<LinearComplex>(&rm.mu)) {
          if (lc->mu_im != 0.0)
            throw ValidationError("region " + region_str(tag) +
                                  ": lossy complex permeability has no time-domain law");
          check_material(rm.sigma, cplx{lc->mu_re, 0.0}, tag);
          en.nu = 1.0 / (kMu0 * lc->mu_re);
        } else if (std::holds_alternative<FieldDependent>(rm.mu)) {
          throw ValidationError("region " + region_str(tag) +
                                ": |H|-dependent permeability is frequency-domain only");
        } else {
          const auto& bh = std::get<AnhystereticBH>(rm.mu);
          if (!(bh.mu_initial > 0) || !(bh.B_sat > 0))
            throw ValidationError("region " + region_str(tag) + ": invalid anhysteretic law");
          check_material(rm.sigma, cplx{bh.mu_initial, 0.0}, tag);
          en.law = static_cast<int>(laws.size());
          laws.emplace_back(bh.mu_initial, bh.B_sat);
        }
        it = cache.emplace(key, en).first;
      }
      sig[t] = it->second.sigma;
      nulin[t] = it->second.nu;
      law_of[t] = it->second.law;
    }
  }

  GroupTables gt = build_groups(m, es, sig, cstr, tc.drives);
  DofMap dof = build_dof_map(m, es, pairing, sig);
  int n_u = dof.n_u;
  size_t K = gt.groups.size();
  std::vector<int> border(K, -1);
  int nb = 0;
  for (size_t k = 0; k < K; ++k)
    if (gt.groups[k].kind != GroupConstraint::VoltageGradientZero)
      border[k] = n_u + nb++;
  int n_total = n_u + nb;
  double Lm = m.model.L;

  std::vector<Eigen::VectorXd> sred(K, Eigen::VectorXd::Zero(n_u));
  for (size_t k = 0; k < K; ++k)
    for (size_t e = 0; e < gt.groups[k].s.size(); ++e) {
      double sv = gt.groups[k].s[e];
      if (sv == 0) continue;
      auto [fa, ia] = dof.resolve(static_cast<int>(e));
      if (ia >= 0) sred[k][ia] += fa * sv;
    }

  // drive i_k(t); FZC pins the net current to zero
  std::vector<double> amp(K, 0.0), pha(K, 0.0);
  for (size_t k = 0; k < K; ++k)
    if (gt.groups[k].kind == GroupConstraint::Current) {
      amp[k] = std::sqrt(2.0) * std::abs(gt.groups[k].target);
      pha[k] = std::arg(gt.groups[k].target);
    }

  // fixed operators: linear stiffness, conduction mass, bordered Jacobian part
  std::vector<Eigen::Triplet<double>> tK, tM;
  walk_operator(m, es, sig, nulin, cstr, [&](int ge, int gf, double kv, double mv) {
    auto [fa, ia] = dof.resolve(ge);
    if (ia < 0) return;
    auto [fb, ib] = dof.resolve(gf);
    if (ib < 0) return;
    double w = fa * fb;
    if (kv != 0) tK.emplace_back(ia, ib, kv * w);
    if (mv != 0) tM.emplace_back(ia, ib, mv * w);
  });
  Eigen::SparseMatrix<double> Klin(n_u, n_u), Mred(n_u, n_u);
  Klin.setFromTriplets(tK.begin(), tK.end());
  Mred.setFromTriplets(tM.begin(), tM.end());

  std::vector<Eigen::Triplet<double>> jfix;
  jfix.reserve(tK.size() + tM.size() + 2 * K * static_cast<size_t>(n_u));
  for (const auto& tr : tK) jfix.push_back(tr);
  for (const auto& tr : tM) jfix.emplace_back(tr.row(), tr.col(), tr.value() / (th * dt));
  for (size_t k = 0; k < K; ++k) {
    if (border[k] < 0) continue;
    for (int i = 0; i < n_u; ++i)
      if (sred[k][i] != 0) {
        jfix.emplace_back(i, border[k], -sred[k][i]);
        jfix.emplace_back(border[k], i, -sred[k][i]);
      }
    jfix.emplace_back(border[k], border[k], th * dt * gt.groups[k].G);
  }
  tK.clear();
  tK.shrink_to_fit();
  tM.clear();
  tM.shrink_to_fit();

  bool stretch_on = m.stretch.active() && cstr != 0.0;
  std::vector<NlTet> nl;
  for (size_t t = 0; t < T; ++t) {
    if (law_of[t] < 0) continue;
    TetFrame fr = frame_of(m, es, t);
    if (stretch_on)
      for (int i = 0; i < 4; ++i)
        if (std::hypot(fr.p[i][0], fr.p[i][1]) > m.stretch.r0 * (1.0 + 1e-12))
          throw ValidationError("nonlinear permeability inside the stretch annulus");
    NlTet q;
    q.law = law_of[t];
    q.V = fr.V;
    for (int e = 0; e < 6; ++e) {
      auto [fa, ia] = dof.resolve(fr.ge[e]);
      q.fac[e] = ia >= 0 ? fa : 0.0;
      q.idx[e] = ia;
      q.ce[e] = fr.ce[e];
    }
    nl.push_back(q);
  }

  // K(a) a on the reduced edge space, nonlinear tets at their secant state
  auto add_K = [&](const Eigen::VectorXd& xa, Eigen::VectorXd& r) {
    r.head(n_u).noalias() += Klin * xa;
    for (const NlTet& q : nl) {
      Vec3 B = {0, 0, 0};
      for (int e = 0; e < 6; ++e)
        if (q.idx[e] >= 0) B = axpy(q.fac[e] * xa[q.idx[e]], q.ce[e], B);
      double b = std::sqrt(dot(B, B)), nu, dh;
      laws[q.law].eval(b, nu, dh);
      for (int e = 0; e < 6; ++e)
        if (q.idx[e] >= 0) r[q.idx[e]] += q.fac[e] * q.V * nu * dot(q.ce[e], B);
    }
  };

  // carried-over part of the theta scheme, edge rows only
  auto make_cn = [&](const Eigen::VectorXd& xn) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_total);
    add_K(xn.head(n_u), c);
    for (size_t k = 0; k < K; ++k)
      if (border[k] >= 0) c.head(n_u) -= sred[k] * xn[border[k]];
    return Eigen::VectorXd(((1.0 - th) / th) * c.head(n_u));
  };

  // residual plus the magnitude of its summands, which anchors the absolute
  // convergence floor: below ~1e-12 of the term scale only cancellation noise
  // is left
  auto residual = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& xn,
                      const Eigen::VectorXd& cn, double tmid, double& scale) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_total);
    Eigen::VectorXd da = x.head(n_u) - xn.head(n_u);
    Eigen::VectorXd rm = Mred * da / (th * dt);
    add_K(x.head(n_u), r);
    r.head(n_u) += cn;
    double sc = rm.norm() + r.head(n_u).norm();
    double sb = 0;
    for (size_t k = 0; k < K; ++k) {
      if (border[k] < 0) continue;
      double ek = x[border[k]], ekn = xn[border[k]];
      r.head(n_u).noalias() -= sred[k] * ek;
      double ik = amp[k] * std::cos(omega * tmid + pha[k]);
      double g1 = th * dt * gt.groups[k].G * ek, g2 = (1.0 - th) * dt * gt.groups[k].G * ekn;
      double g3 = sred[k].dot(da), g4 = dt * Lm * ik;
      r[border[k]] = g1 + g2 - g3 - g4;
      sc += std::abs(ek) * sred[k].norm();
      sb = std::max(sb, std::abs(g1) + std::abs(g2) + std::abs(g3) + std::abs(g4));
    }
    r.head(n_u) += rm;
    scale = sc + sb;
    return r;
  };

  Eigen::SparseMatrix<double> J(n_total, n_total);
  Eigen::VectorXd Dq(n_total);
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false, haveJ = false;

  auto build_J = [&](const Eigen::VectorXd& x) {
    std::vector<Eigen::Triplet<double>> trips = jfix;
    for (const NlTet& q : nl) {
      Vec3 B = {0, 0, 0};
      for (int e = 0; e < 6; ++e)
        if (q.idx[e] >= 0) B = axpy(q.fac[e] * x[q.idx[e]], q.ce[e], B);
      double b = std::sqrt(dot(B, B)), nu, dh;
      laws[q.law].eval(b, nu, dh);
      double ct = b > 1e-12 ? (dh - nu) / (b * b) : 0.0;
      double cb[6];
      for (int e = 0; e < 6; ++e) cb[e] = dot(q.ce[e], B);
      for (int e = 0; e < 6; ++e) {
        if (q.idx[e] < 0) continue;
        for (int f = e; f < 6; ++f) {
          if (q.idx[f] < 0) continue;
          double v = q.V * (nu * dot(q.ce[e], q.ce[f]) + ct * cb[e] * cb[f]) * q.fac[e] * q.fac[f];
          trips.emplace_back(q.idx[e], q.idx[f], v);
          if (f != e) trips.emplace_back(q.idx[f], q.idx[e], v);
        }
      }
    }
    std::vector<double> diag(n_total, 0.0);
    for (const auto& tr : trips)
      if (tr.row() == tr.col()) diag[tr.row()] += tr.value();
    for (int i = 0; i < n_total; ++i) {
      double d = std::abs(diag[i]);
      Dq[i] = d > 0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    for (auto& tr : trips) tr = {tr.row(), tr.col(), tr.value() * (Dq[tr.row()] * Dq[tr.col()])};
    J.setFromTriplets(trips.begin(), trips.end());
    J.makeCompressed();
    if (!analyzed) {
      lu.umfpackControl()[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
      lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw SolverFailure("transient factorization failed on " + std::to_string(n_total) +
                          " unknowns");
    haveJ = true;
  };

  // time march; Newton is a chord iteration on a lagged Jacobian
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_total), xold = x;
  std::vector<std::vector<double>> eh(K), ph(K);
  for (size_t k = 0; k < K; ++k) {
    eh[k].assign(Ntot + 1, 0.0);
    ph[k].assign(Ntot + 1, 0.0);
  }
  for (int n = 0; n < Ntot; ++n) {
    Eigen::VectorXd xn = x;
    Eigen::VectorXd cn = make_cn(xn);
    // the current source sits at the step midpoint so that averaging two
    // adjacent circuit rows reproduces the nodal current with no phase error
    double tmid = (n + 0.5) * dt;
    Eigen::VectorXd xt = n == 0 ? xn : Eigen::VectorXd(2.0 * xn - xold);
    double r0 = 0, rprev = 0;
    for (int iter = 0;; ++iter) {
      double scale = 0;
      Eigen::VectorXd r = residual(xt, xn, cn, tmid, scale);
      double rn = r.norm();
      if (iter == 0) r0 = rn;
      if (rn <= std::max(tc.newton_tol * r0, 1e-12 * scale)) break;
      if (iter >= tc.newton_max) {
        std::ostringstream os;
        os << "Newton stalled at step " << n + 1 << " (t = " << (n + 1) * dt << " s): residual "
           << rn << " after " << iter << " iterations; the time step is too large, raise "
           << "steps_per_period";
        throw NewtonFailure(os.str());
      }
      if (!haveJ || (iter > 0 && iter % 6 == 0) || (iter >= 2 && rn > 0.9 * rprev)) build_J(xt);
      Eigen::VectorXd rhs = -Dq.cwiseProduct(r);
      Eigen::VectorXd y = lu.solve(rhs);
      xt += Dq.cwiseProduct(y);
      rprev = rn;
    }
    xold = xn;
    x = xt;
    for (size_t k = 0; k < K; ++k) {
      ph[k][n + 1] = sred[k].dot(x.head(n_u));
      if (border[k] >= 0) eh[k][n + 1] = x[border[k]];
    }
  }

  // Currents at node n come from averaging the circuit rows of the two
  // adjacent steps: the central flux difference pairs with the smoothed
  // voltage (th e_{n+1} + e_n + (1-th) e_{n-1})/2, and the result equals the
  // mean of the two exactly enforced midpoint currents, i(t_n) cos(w dt/2).
  // Both neighbours exist because at least one period is discarded.
  Waveforms w;
  w.f0 = f0;
  w.dt = dt;
  w.report_km = 1.0;
  w.t.reserve(Ntot - Nd);
  for (int n = Nd; n < Ntot; ++n) w.t.push_back(n * dt);
  for (size_t k = 0; k < K; ++k) {
    std::vector<double> ev, iv;
    ev.reserve(Ntot - Nd);
    iv.reserve(Ntot - Nd);
    for (int n = Nd; n < Ntot; ++n) {
      double dphi = (ph[k][n + 1] - ph[k][n - 1]) / (2.0 * dt);
      double ebar = (th * eh[k][n + 1] + eh[k][n] + (1.0 - th) * eh[k][n - 1]) / 2.0;
      ev.push_back(eh[k][n]);
      iv.push_back((gt.groups[k].G * ebar - dphi) / Lm);
    }
    const std::string& name = gt.groups[k].name;
    if (name == "armor") {
      w.v_a.resize(ev.size());
      for (size_t i = 0; i < ev.size(); ++i) w.v_a[i] = ev[i] * 1000.0 * w.report_km;
      w.i_a = iv;
    }
    w.e_group[name] = std::move(ev);
    w.i_group[name] = std::move(iv);
  }
  return w;
}

std::map<int, Harmonic> extract_harmonics(const std::vector<double>& signal, double dt,
                                          double f0) {
  if (signal.empty()) throw ValidationError("empty signal");
  if (!(dt > 0) || !(f0 > 0)) throw ValidationError("dt and f0 must be positive");
  size_t N = signal.size();
  double pf = static_cast<double>(N) * dt * f0;
  long P = std::lround(pf);
  if (P < 1 || std::abs(pf - P) > 1e-6 * std::max(1.0, pf)) {
    std::ostringstream os;
    os << "signal spans " << pf << " periods of " << f0 << " Hz, need a whole number";
    throw NonIntegerPeriods(os.str());
  }
  std::map<int, Harmonic> out;
  double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(N);
  out[0] = {std::abs(mean), mean < 0 ? kPi : 0.0};
  int kmax = static_cast<int>((N - 1) / (2 * static_cast<size_t>(P)));
  for (int k = 1; k <= kmax; ++k) {
    double wk = 2.0 * kPi * k * static_cast<double>(P) / static_cast<double>(N);
    double c = 0, s = 0;
    for (size_t n = 0; n < N; ++n) {
      c += signal[n] * std::cos(wk * static_cast<double>(n));
      s += signal[n] * std::sin(wk * static_cast<double>(n));
    }
    out[k] = {2.0 * std::hypot(c, s) / static_cast<double>(N), std::atan2(-s, c)};
  }
  return out;
}

}  // namespace cablefem
