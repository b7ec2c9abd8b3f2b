#include "cablefem/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "cablefem/errors.hpp"

using namespace cablefem;

namespace {
const std::string kFix = FIXTURE_DIR;
constexpr double kPi = 3.14159265358979323846;

double tri_area(const CrossSection& cs, int t) {
  const auto& a = cs.nodes[cs.tris[t][0]];
  const auto& b = cs.nodes[cs.tris[t][1]];
  const auto& c = cs.nodes[cs.tris[t][2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

// covered cross-section area: meshed triangles plus the untriangulated band
// annuli, counted from the z = 0 footprint
double section_area(const CrossSection& cs) {
  double A = 0;
  for (size_t t = 0; t < cs.tris.size(); ++t) A += tri_area(cs, t);
  for (const auto& b : cs.bands) {
    int n = static_cast<int>(b.static_circle.size());
    for (int i = 0; i < n; ++i) {
      int i1 = (i + 1) % n;
      const auto& s0 = cs.nodes[b.static_circle[i]];
      const auto& s1 = cs.nodes[b.static_circle[i1]];
      const auto& a0 = cs.nodes[b.armor_circle[i]];
      const auto& a1 = cs.nodes[b.armor_circle[i1]];
      A += std::abs(0.5 * ((s1[0] - s0[0]) * (a1[1] - s0[1]) - (s1[1] - s0[1]) * (a1[0] - s0[0])));
      A += std::abs(0.5 * ((a1[0] - s0[0]) * (a0[1] - s0[1]) - (a1[1] - s0[1]) * (a0[0] - s0[0])));
    }
  }
  return A;
}
}  // namespace

TEST(Extrude, TwoTrianglePatchIsConformingAndExact) {
  CrossSection cs;
  int a = cs.add_node(0, 0, RotBlock::Static);
  int b = cs.add_node(1, 0, RotBlock::Static);
  int c = cs.add_node(1, 1, RotBlock::Static);
  int d = cs.add_node(0, 1, RotBlock::Static);
  cs.add_tri(a, b, c, {RegionClass::Air, 0});
  cs.add_tri(a, c, d, {RegionClass::Air, 0});
  cs.outer_circle = {a, b, c, d};
  cs.r_outer = 1.5;
  PeriodicModel pm;
  pm.g = 1;
  pm.L = 0.4;
  pm.theta = 0;
  pm.omega_core = 0;
  pm.omega_armor = 0;
  PeriodicMesh m = extrude_slab(cs, pm, 3, 0.4);
  EXPECT_EQ(m.tets.size(), 2u * 3u * 3u);
  MeshReport r = mesh_report(m);
  EXPECT_NEAR(r.total_volume, 1.0 * 0.4, 1e-14);
  EXPECT_GT(r.min_volume, 0.0);
}

TEST(Extrude, RejectsBadArguments) {
  CrossSection cs;
  int a = cs.add_node(0, 0, RotBlock::Static);
  int b = cs.add_node(1, 0, RotBlock::Static);
  int c = cs.add_node(0, 1, RotBlock::Static);
  cs.add_tri(a, b, c, {RegionClass::Air, 0});
  cs.outer_circle = {a, b, c};
  PeriodicModel pm;
  pm.g = 1;
  pm.L = 1;
  pm.theta = 0;
  EXPECT_THROW(extrude_slab(cs, pm, 0, 1.0), ValidationError);
  EXPECT_THROW(extrude_slab(cs, pm, 4, -1.0), ValidationError);
}

TEST(WireFixture, IdentityPairingAndExactConductorArea) {
  double a = 5e-3, r_out = 30e-3, L = 0.1;
  PeriodicMesh m = build_wire_fixture(a, r_out, L, 16, 3, 4);
  EXPECT_EQ(m.src_nodes.size(), m.dst_nodes.size());
  EXPECT_FALSE(m.stretch.active());
  EXPECT_THROW(set_stretch_extent(m, 1.0), BadRadius);

  EdgeSet es = build_edges(m);
  FacePairing fp = pair_periodic_faces(m, es);
  EXPECT_EQ(fp.node_pairs.size(), m.src_nodes.size());
  for (const auto& pr : fp.node_pairs) {
    EXPECT_NEAR(m.X[pr[0]][0], m.X[pr[1]][0], 1e-12);
    EXPECT_NEAR(m.X[pr[0]][1], m.X[pr[1]][1], 1e-12);
    EXPECT_NEAR(m.X[pr[0]][2] - m.X[pr[1]][2], L, 1e-12);
  }
  for (const auto& ep : fp.edge_pairs) EXPECT_EQ(ep[2], 1);

  MeshReport r = mesh_report(m);
  EXPECT_NEAR(r.region_volume.at("conductor"), kPi * a * a * L, kPi * a * a * L * 1e-9);
  EXPECT_GT(r.min_volume, 0.0);
  EXPECT_GT(r.min_dihedral_deg, 0.5);
  std::string txt = format_mesh_report(r);
  EXPECT_NE(txt.find("volume_conductor_m3"), std::string::npos);
}

TEST(WireFixture, PerturbedFaceNodeFailsPairing) {
  PeriodicMesh m = build_wire_fixture(5e-3, 30e-3, 0.1, 16, 3, 4);
  EdgeSet es = build_edges(m);
  m.X[m.dst_nodes[7]][0] += 1e-4;
  EXPECT_THROW(pair_periodic_faces(m, es), NoMatch);
}

TEST(TrefoilFixture, BuildsWithStretchAndPairs) {
  double a = 16.1e-3, s = 70e-3, r_out = 0.5, L = 0.3;
  PeriodicMesh m = build_trefoil_fixture(a, s, r_out, L, 18, 4);
  EXPECT_TRUE(m.stretch.active());
  EXPECT_NEAR(m.stretch.r0, r_out, 1e-12);
  set_stretch_extent(m, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isinf(m.stretch.R_eff));
  EXPECT_THROW(set_stretch_extent(m, 0.5 * r_out), BadRadius);

  EdgeSet es = build_edges(m);
  FacePairing fp = pair_periodic_faces(m, es);
  EXPECT_EQ(fp.node_pairs.size(), m.src_nodes.size());

  MeshReport r = mesh_report(m);
  double want = 3.0 * kPi * a * a * L;
  EXPECT_NEAR(r.region_volume.at("conductor"), want, want * 1e-9);
}

TEST(CableMesh, C5CoarseClosesPeriodically) {
  CableSpec spec = load_cable(kFix + "/cables/C5.cable");
  MeshParams p = make_mesh_params(MeshLevel::Coarse, spec);
  CrossSection cs = build_cross_section(spec, p);
  EXPECT_EQ(cs.n_az, spec.N * p.m_div);
  EXPECT_EQ(cs.bands.size(), 2u);

  PeriodicMesh m = build_cable_mesh(spec, p);
  // contralay: armor lags the cores, attachment walks forward
  EXPECT_EQ(m.model.rel_sign, -1);
  EXPECT_EQ(m.slip_total, cs.n_az / m.model.g);
  EXPECT_GE(m.n_z, 2 * (cs.n_az / m.model.g));

  EdgeSet es = build_edges(m);
  FacePairing fp = pair_periodic_faces(m, es);
  EXPECT_EQ(fp.node_pairs.size(), m.src_nodes.size());
  EXPECT_FALSE(fp.edge_pairs.empty());

  // every src node is used exactly once
  std::set<int> used;
  for (const auto& pr : fp.node_pairs) used.insert(pr[1]);
  EXPECT_EQ(used.size(), fp.node_pairs.size());

  MeshReport r = mesh_report(m);
  EXPECT_GT(r.min_volume, 0.0);

  double L = m.model.L;
  double steel = r.region_volume.at("armor_steel") / L;
  double da = spec.da_mm * 1e-3;
  double steel_want = spec.steel_count() * kPi * da * da / 4.0;
  EXPECT_NEAR(steel, steel_want, 0.02 * steel_want);

  // interface quads are non-planar under twist, so diagonal splits trade
  // O(theta/n_z) slivers between neighbor regions; 1e-3 still catches a
  // missing polygon-area correction (that error would be ~1e-2)
  double cond = r.region_volume.at("conductor") / L;
  double rc = spec.rc_m();
  EXPECT_NEAR(cond, 3.0 * kPi * rc * rc, 3.0 * kPi * rc * rc * 1e-3);

  double sheath = r.region_volume.at("sheath") / L;
  double sh_want = kPi * (spec.rs_out_m() * spec.rs_out_m() - spec.rs_in_m() * spec.rs_in_m()) * 3.0;
  EXPECT_NEAR(sheath, sh_want, sh_want * 1e-3);

  // conforming positive tets over the whole slab: volume closes to the footprint
  double expect = section_area(cs) * L;
  EXPECT_NEAR(r.total_volume, expect, 5e-3 * expect);

  EXPECT_TRUE(m.stretch.active());
  EXPECT_NEAR(m.stretch.r0, cs.r_stretch_inner, 1e-12);
}

TEST(CableMesh, DeterministicRebuild) {
  CableSpec spec = load_cable(kFix + "/cables/C5.cable");
  MeshParams p = make_mesh_params(MeshLevel::Coarse, spec);
  PeriodicMesh m1 = build_cable_mesh(spec, p);
  PeriodicMesh m2 = build_cable_mesh(spec, p);
  ASSERT_EQ(m1.X.size(), m2.X.size());
  ASSERT_EQ(m1.tets.size(), m2.tets.size());
  for (size_t i = 0; i < m1.X.size(); ++i)
    for (int k = 0; k < 3; ++k) ASSERT_EQ(m1.X[i][k], m2.X[i][k]);
  for (size_t t = 0; t < m1.tets.size(); ++t) ASSERT_EQ(m1.tets[t], m2.tets[t]);
  EXPECT_EQ(format_mesh_report(mesh_report(m1)), format_mesh_report(mesh_report(m2)));
}

TEST(CableMesh, SlipNeedsEnoughLayers) {
  CableSpec spec = load_cable(kFix + "/cables/C5.cable");
  MeshParams p = make_mesh_params(MeshLevel::Coarse, spec);
  CrossSection cs = build_cross_section(spec, p);
  PeriodicModel pm = derive_periodic_model(spec);
  EXPECT_THROW(extrude_slab(cs, pm, 2, pm.L), ValidationError);
}

TEST(CrossSection, AllFixtureCablesMeshAndKeepSteelArea) {
  const char* ids[] = {"C1a", "C1b", "C2a", "C2b", "C3", "C4", "C5", "C6", "C7", "C8"};
  for (const char* id : ids) {
    SCOPED_TRACE(id);
    CableSpec spec = load_cable(kFix + "/cables/" + id + ".cable");
    MeshParams p = make_mesh_params(MeshLevel::Coarse, spec);
    CrossSection cs = build_cross_section(spec, p);
    double steel = 0;
    for (size_t t = 0; t < cs.tris.size(); ++t)
      if (cs.tri_region[t].cls == RegionClass::ArmorSteel) steel += tri_area(cs, t);
    double da = spec.da_mm * 1e-3;
    double want = spec.steel_count() * kPi * da * da / 4.0;
    if (want > 0) EXPECT_NEAR(steel, want, 0.02 * want);
  }
}
