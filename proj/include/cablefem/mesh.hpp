#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "cablefem/mesh2d.hpp"

namespace cablefem {

// Radial coordinate map closing the domain: the annulus [r0, r1] is read as
// [r0, R_eff], R_eff = r1 meaning identity and R_eff = inf an open boundary.
struct StretchSpec {
  double r0 = 0, r1 = 0;
  double R_eff = 0;
  bool active() const { return r1 > r0 && r0 > 0; }
};

// Tetrahedral mesh of one rotated-periodic slab in the frame where the cores
// are straight columns twisted rigidly by omega_core.
struct PeriodicMesh {
  std::vector<std::array<double, 3>> X;
  std::vector<std::array<int, 4>> tets;
  std::vector<RegionTag> tet_region;
  std::vector<double> tet_omega;  // twist rate of the region each tet sits in

  std::vector<int> src_nodes;   // z = 0 face
  std::vector<int> dst_nodes;   // z = L face
  std::vector<int> outer_nodes; // outer rim, all layers

  PeriodicModel model;
  int n_z = 0;
  int n_az = 0;      // band stations (0 for fixtures without bands)
  int slip_total = 0;  // signed armor slip over the slab, in stations
  StretchSpec stretch;
};

struct EdgeSet {
  std::vector<std::array<int, 2>> edges;       // canonical lo < hi
  std::vector<std::array<int, 6>> tet_edges;   // per tet, local order
                                               // (01,02,03,12,13,23)
};
EdgeSet build_edges(const PeriodicMesh& m);

// dst-face objects matched to their rotated src-face images.
struct FacePairing {
  std::vector<std::array<int, 2>> node_pairs;  // (dst node, src node)
  std::vector<std::array<int, 3>> edge_pairs;  // (dst edge, src edge, sign)
};
// Matches the z = L face onto the z = 0 face rotated by model.theta. tol <= 0
// picks 1e-9 of the mesh diameter. Throws NoMatch when a node or edge has no
// partner within tol.
FacePairing pair_periodic_faces(const PeriodicMesh& m, const EdgeSet& es, double tol = 0);

// Declares how far the stretched annulus physically reaches. R_eff may be
// infinity; R_eff <= r0 (or a mesh without a stretched zone) throws BadRadius.
void set_stretch_extent(PeriodicMesh& m, double R_eff);

// General extruder: n_z layers over length L with rigid rotation, slip-banded
// armor re-quadding, and Dompierre prism splitting.
PeriodicMesh extrude_slab(const CrossSection& cs, const PeriodicModel& pm, int n_z, double L);

// Full cable slab at the given density. Twist and slab length come from the
// datasheet's periodic model.
PeriodicMesh build_cable_mesh(const CableSpec& spec, const MeshParams& p);

// Straight test fixtures (omega = 0, theta = 0, trivial pairing).
PeriodicMesh build_wire_fixture(double a_m, double r_out_m, double L_m, int n_az,
                                int cond_rings, int n_z, double air_growth = 1.5);
PeriodicMesh build_trefoil_fixture(double a_m, double spacing_m, double r_out_m,
                                   double L_m, int n_az, int n_z,
                                   double fill_h_rel = 0.2);

struct MeshReport {
  int nodes = 0, tets = 0, edges = 0, n_z = 0;
  double L = 0;
  double min_volume = 0, total_volume = 0;
  double min_dihedral_deg = 0;
  std::map<std::string, double> region_volume;
};
MeshReport mesh_report(const PeriodicMesh& m);
std::string format_mesh_report(const MeshReport& r);

std::string region_class_name(RegionClass c);

}  // namespace cablefem
