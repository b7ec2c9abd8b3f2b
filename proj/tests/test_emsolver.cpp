#include "cablefem/emsolver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "cablefem/errors.hpp"
#include "cablefem/mesh.hpp"
#include "cablefem/oracle.hpp"

namespace cablefem {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu0 = 4e-7 * kPi;
constexpr double kSigCu = 5.8e7;

struct Fixture {
  PeriodicMesh m;
  EdgeSet es;
  FacePairing fp;
};

// Accuracy is set by the layer height L/n_z, so the accuracy tests use a
// short slab; the identity tests keep a long one to exercise coarse layers.
Fixture wire(int n_az = 48, int rings = 8, int n_z = 2, double L = 0.05) {
  Fixture f;
  f.m = build_wire_fixture(0.01, 0.08, L, n_az, rings, n_z);
  f.es = build_edges(f.m);
  f.fp = pair_periodic_faces(f.m, f.es);
  return f;
}

Fixture trefoil() {
  Fixture f;
  f.m = build_trefoil_fixture(0.01, 0.035, 0.15, 0.05, 36, 2);
  f.es = build_edges(f.m);
  f.fp = pair_periodic_faces(f.m, f.es);
  return f;
}

MaterialMap copper_in_air() {
  return [](const RegionTag& t) -> RegionMaterial {
    if (t.cls == RegionClass::Conductor) return {kSigCu, LinearComplex{}};
    return {0.0, LinearComplex{}};
  };
}

DriveSpec one_wire(cplx I, double f = 50.0) {
  DriveSpec d;
  d.f = f;
  d.groups.push_back({"wire", {{RegionClass::Conductor, 0}}, GroupConstraint::Current, I});
  return d;
}

DriveSpec three_cond(GroupConstraint c0, GroupConstraint c1, GroupConstraint c2, cplx i0,
                     cplx i1, cplx i2) {
  DriveSpec d;
  d.f = 50.0;
  GroupConstraint cs[3] = {c0, c1, c2};
  cplx is[3] = {i0, i1, i2};
  const char* nm[3] = {"g0", "g1", "g2"};
  for (int k = 0; k < 3; ++k)
    d.groups.push_back({nm[k], {{RegionClass::Conductor, k}}, cs[k], is[k]});
  return d;
}

TEST(EmSystem, OperatorIsComplexSymmetric) {
  Fixture f = wire(24, 4, 2);
  EmSystem sys(f.m, f.es, copper_in_air(), 50.0);
  EXPECT_LT(sys.symmetry_error(), 1e-13);
  EXPECT_FALSE(sys.is_real());
}

TEST(EmSystem, LosslessOperatorIsReal) {
  Fixture f = wire(24, 4, 2);
  size_t T = f.m.tets.size();
  EmSystem sys(f.m, f.es, std::vector<double>(T, 0.0), std::vector<cplx>(T, cplx{1.0, 0.0}),
               50.0);
  EXPECT_TRUE(sys.is_real());
  EXPECT_LT(sys.symmetry_error(), 1e-13);
}

TEST(EmSystem, QuadraticFormDissipationIsPositive) {
  Fixture f = wire(24, 4, 2);
  size_t T = f.m.tets.size();
  std::vector<double> sig(T, 0.0);
  std::vector<cplx> mu(T, cplx{1.0, 0.0});
  for (size_t t = 0; t < T; ++t)
    if (f.m.tet_region[t].cls == RegionClass::Conductor) {
      sig[t] = 1e6;
      mu[t] = cplx{100.0, -30.0};
    }
  EmSystem sys(f.m, f.es, sig, mu, 50.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> x(f.es.edges.size());
  for (auto& v : x) v = cplx{u(rng), u(rng)};
  std::vector<cplx> y = sys.apply_full(x);
  cplx q = 0;
  for (size_t e = 0; e < x.size(); ++e) q += std::conj(x[e]) * y[e];
  EXPECT_GT(q.imag(), 0.0);  // conduction + hysteresis losses
}

TEST(Solve, ZeroDriveGivesZeroField) {
  Fixture f = wire(24, 4, 2);
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(0.0));
  double mx = 0;
  for (const cplx& a : sol.dofs) mx = std::max(mx, std::abs(a));
  EXPECT_EQ(mx, 0.0);
  EXPECT_EQ(std::abs(sol.I_k[0]), 0.0);
}

TEST(Solve, FieldScalesLinearlyWithDrive) {
  Fixture f = wire(24, 4, 2);
  FieldSolution s1 = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(100.0));
  FieldSolution s2 = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(200.0));
  double mx = 0, err = 0;
  for (size_t e = 0; e < s1.dofs.size(); ++e) {
    mx = std::max(mx, std::abs(s2.dofs[e]));
    err = std::max(err, std::abs(s2.dofs[e] - 2.0 * s1.dofs[e]));
  }
  EXPECT_GT(mx, 0.0);
  EXPECT_LT(err, 1e-8 * mx);
}

TEST(Solve, EchoesTargetCurrent) {
  Fixture f = wire(24, 4, 2);
  cplx I{80.0, -60.0};
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(I));
  EXPECT_LT(std::abs(sol.I_k[0] - I), 1e-9 * std::abs(I));
  EXPECT_GT(sol.e_k[0].real(), 0.0);
}

// R and internal inductance of a round copper wire against the Kelvin
// function solution, plus the coaxial external inductance to the rim where
// the tangential A is grounded.
TEST(Solve, SkinEffectMatchesRoundWireSolution) {
  Fixture f = wire(64, 10, 2, 0.01);
  double I = 1000.0, fs = 50.0;
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(I, fs));
  EnergyBreakdown en = compute_energy(sol);
  double L = f.m.model.L;
  double R_fe = en.conduction_W / (I * I) / L;
  double Li_fe = 2.0 * en.stored_by_class.at("conductor") / (I * I) / L;

  oracle::RoundWireImpedance ref = oracle::skin_round_wire(0.01, kSigCu, 1.0, fs);
  EXPECT_GT(ref.ratio, 1.02);  // mild but visible skin effect
  EXPECT_NEAR(R_fe, ref.R_ac, 0.01 * ref.R_ac);
  EXPECT_NEAR(Li_fe, ref.L_int, 0.02 * ref.L_int);

  // the same numbers through the circuit side
  double R_z = sol.e_k[0].real() / I;
  double X_z = sol.e_k[0].imag() / I;
  EXPECT_NEAR(R_z, R_fe, 1e-10 * R_fe);
  double L_ext = oracle::coax_external_inductance(0.01, 0.08);
  EXPECT_NEAR(X_z / (2.0 * kPi * fs), ref.L_int + L_ext, 0.02 * (ref.L_int + L_ext));
}

TEST(Solve, PowerBalanceIsExact) {
  Fixture f = trefoil();
  cplx a120 = std::polar(100.0, -2.0 * kPi / 3.0);
  cplx b120 = std::polar(100.0, 2.0 * kPi / 3.0);
  DriveSpec d = three_cond(GroupConstraint::Current, GroupConstraint::Current,
                           GroupConstraint::Current, 100.0, a120, b120);
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), d);
  EnergyBreakdown en = compute_energy(sol);
  EXPECT_GT(en.input_W, 0.0);
  EXPECT_NEAR(en.input_W, en.conduction_W + en.magnetic_W, 1e-8 * en.input_W);

  double q_in = 0;
  for (size_t k = 0; k < sol.e_k.size(); ++k)
    q_in += (sol.e_k[k] * std::conj(sol.I_k[k])).imag() * f.m.model.L;
  EXPECT_NEAR(q_in, 2.0 * 2.0 * kPi * 50.0 * en.stored_J, 1e-8 * q_in);
}

TEST(Solve, MutualImpedanceIsReciprocal) {
  Fixture f = trefoil();
  DriveSpec dA = three_cond(GroupConstraint::Current, GroupConstraint::FloatingZeroCurrent,
                            GroupConstraint::FloatingZeroCurrent, 100.0, 0.0, 0.0);
  DriveSpec dB = three_cond(GroupConstraint::FloatingZeroCurrent, GroupConstraint::Current,
                            GroupConstraint::FloatingZeroCurrent, 0.0, 100.0, 0.0);
  FieldSolution sA = solve_frequency(f.m, f.es, f.fp, copper_in_air(), dA);
  FieldSolution sB = solve_frequency(f.m, f.es, f.fp, copper_in_air(), dB);
  cplx zAB = sA.e_k[1], zBA = sB.e_k[0];
  EXPECT_GT(std::abs(zAB), 0.0);
  EXPECT_LT(std::abs(zAB - zBA), 1e-8 * std::abs(zAB));
  // floating conductors carry no net current but do see a voltage
  EXPECT_LT(std::abs(sA.I_k[1]), 1e-7);
  EXPECT_LT(std::abs(sA.I_k[2]), 1e-7);
}

TEST(Solve, VoltageGradientZeroShortsTheGroup) {
  Fixture f = trefoil();
  DriveSpec d = three_cond(GroupConstraint::Current, GroupConstraint::VoltageGradientZero,
                           GroupConstraint::FloatingZeroCurrent, 100.0, 0.0, 0.0);
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), d);
  EXPECT_EQ(sol.e_k[1], cplx(0.0, 0.0));
  EXPECT_GT(std::abs(sol.I_k[1]), 1e-3);  // induced circulating current
  EXPECT_LT(std::abs(sol.I_k[2]), 1e-7);
  EXPECT_EQ(sol.group_index("g2"), 2);
  EXPECT_THROW(sol.group_index("missing"), UnknownGroup);
}

TEST(Solve, UpdatePermeabilityKeepsThePattern) {
  Fixture f = wire(24, 4, 2);
  EmSystem sys(f.m, f.es, copper_in_air(), 50.0);
  sys.constrain(f.fp, one_wire(100.0));
  FieldSolution s1 = sys.solve();
  size_t T = f.m.tets.size();
  sys.update_permeability(std::vector<cplx>(T, cplx{1.0, 0.0}));
  FieldSolution s2 = sys.solve();
  double mx = 0, err = 0;
  for (size_t e = 0; e < s1.dofs.size(); ++e) {
    mx = std::max(mx, std::abs(s1.dofs[e]));
    err = std::max(err, std::abs(s1.dofs[e] - s2.dofs[e]));
  }
  EXPECT_LT(err, 1e-12 * mx);  // same material, same answer
  sys.update_permeability(std::vector<cplx>(T, cplx{4.0, 0.0}));
  FieldSolution s3 = sys.solve();
  EnergyBreakdown e1 = compute_energy(s1), e3 = compute_energy(s3);
  EXPECT_GT(e3.stored_J, 1.5 * e1.stored_J);
}

TEST(Solve, AirFieldObeysAmpere) {
  Fixture f = wire(48, 8, 2, 0.01);
  double I = 1000.0;
  FieldSolution sol = solve_frequency(f.m, f.es, f.fp, copper_in_air(), one_wire(I));
  double z = 0.004;
  // per-tet B is a flux average, so compare the annulus flux, not point values
  double r1 = 0.012, r2 = 0.06;
  int nr = 60, np = 48;
  double flux = 0;
  for (int i = 0; i < nr; ++i) {
    double r = r1 + (i + 0.5) * (r2 - r1) / nr;
    for (int k = 0; k < np; ++k) {
      double ph = (k + 0.37) * 2.0 * kPi / np;
      auto B = field_at(sol, {r * std::cos(ph), r * std::sin(ph), z});
      cplx bphi = -B[0] * std::sin(ph) + B[1] * std::cos(ph);
      flux += bphi.real() * (r2 - r1) / nr / np;
      EXPECT_LT(std::abs(B[2]), 0.05 * std::abs(bphi));
    }
  }
  double ref = kMu0 * I / (2.0 * kPi) * std::log(r2 / r1);
  EXPECT_NEAR(flux, ref, 0.03 * ref);
  // pointwise the smeared field still tracks 1/r
  auto Bp = field_at(sol, {0.025, 0.0, z});
  EXPECT_NEAR(std::abs(Bp[1]), kMu0 * I / (2.0 * kPi * 0.025), 0.08 * kMu0 * I / (2.0 * kPi * 0.025));
  EXPECT_THROW(field_at(sol, {0.1, 0.0, z}), PointOutsideMesh);
  EXPECT_THROW(field_at(sol, {0.025, 0.0, -0.01}), PointOutsideMesh);
}

TEST(Nonlinear, PicardSettlesOnTheCurve) {
  Fixture f = wire(32, 6, 2, 0.01);
  // skin depth stays >= the wire radius over the whole curve; dense sampling
  // of a smooth saturation law, as datasheet curves are
  FieldDependent curve;
  for (double H : {0.0, 500.0, 1000.0, 1500.0, 2000.0, 3000.0, 4000.0, 6000.0, 8000.0,
                   12000.0, 16000.0, 24000.0, 48000.0, 1e6})
    curve.samples.push_back({H, 40.0 + 160.0 / (1.0 + H / 3000.0), 0.0});
  curve.source = "test";
  MaterialMap mm = [&curve](const RegionTag& t) -> RegionMaterial {
    if (t.cls == RegionClass::Conductor) return {1e5, curve};
    return {0.0, LinearComplex{}};
  };
  FieldSolution sol = solve_nonlinear_mu(f.m, f.es, f.fp, mm, one_wire(1000.0));
  ASSERT_GE(sol.log.size(), 2u);
  EXPECT_LT(sol.log.back().max_rel_dmu, 1e-3);
  double Hs = 1000.0 / (2.0 * kPi * 0.01);  // surface field of the wire
  EXPECT_GT(sol.log.back().H_max, 0.5 * Hs);
  EXPECT_LT(sol.log.back().H_max, 20.0 * Hs);
  // iterated permeability actually left the H -> 0 value
  double mu_min = 1e9;
  for (size_t t = 0; t < sol.mu_tet.size(); ++t)
    if (f.m.tet_region[t].cls == RegionClass::Conductor)
      mu_min = std::min(mu_min, sol.mu_tet[t].real());
  EXPECT_LT(mu_min, 150.0);
}

TEST(Nonlinear, ZeroDriveConvergesImmediately) {
  Fixture f = wire(24, 4, 2);
  FieldDependent curve;
  curve.samples = {{0.0, 300.0, 0.0}, {1e6, 50.0, 0.0}};
  curve.source = "test";
  MaterialMap mm = [&curve](const RegionTag& t) -> RegionMaterial {
    if (t.cls == RegionClass::Conductor) return {kSigCu, curve};
    return {0.0, LinearComplex{}};
  };
  FieldSolution sol = solve_nonlinear_mu(f.m, f.es, f.fp, mm, one_wire(0.0));
  EXPECT_EQ(sol.log.size(), 1u);
  EXPECT_EQ(sol.log[0].max_rel_dmu, 0.0);
}

TEST(Validation, RejectsBadDrives) {
  Fixture f = wire(24, 4, 2);
  MaterialMap mm = copper_in_air();

  DriveSpec uncovered;
  uncovered.f = 50.0;
  uncovered.groups.push_back({"air", {{RegionClass::Air, 0}}, GroupConstraint::Current, 1.0});
  EXPECT_THROW(solve_frequency(f.m, f.es, f.fp, mm, uncovered), ValidationError);

  DriveSpec dup = one_wire(100.0);
  dup.groups.push_back(
      {"again", {{RegionClass::Conductor, 0}}, GroupConstraint::FloatingZeroCurrent, 0.0});
  EXPECT_THROW(solve_frequency(f.m, f.es, f.fp, mm, dup), OverConstrained);

  DriveSpec empty_air = one_wire(100.0);
  empty_air.groups.push_back(
      {"air", {{RegionClass::Air, -1}}, GroupConstraint::FloatingZeroCurrent, 0.0});
  EXPECT_THROW(solve_frequency(f.m, f.es, f.fp, mm, empty_air), ValidationError);

  DriveSpec floating_only = one_wire(0.0);
  floating_only.groups[0].constraint = GroupConstraint::FloatingZeroCurrent;
  EXPECT_THROW(solve_frequency(f.m, f.es, f.fp, mm, floating_only), ValidationError);

  EmSystem sys(f.m, f.es, mm, 50.0);
  EXPECT_THROW(sys.constrain(f.fp, one_wire(100.0, 60.0)), ValidationError);
}

TEST(Validation, RejectsSingularMaterials) {
  Fixture f = wire(24, 4, 2);
  MaterialMap bad = [](const RegionTag& t) -> RegionMaterial {
    if (t.cls == RegionClass::Conductor) return {kSigCu, LinearComplex{0.0, 0.0}};
    return {0.0, LinearComplex{}};
  };
  EXPECT_THROW(EmSystem(f.m, f.es, bad, 50.0), SingularMaterial);
}

}  // namespace
}  // namespace cablefem
