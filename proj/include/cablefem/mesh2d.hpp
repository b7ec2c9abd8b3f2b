#pragma once
#include <array>
#include <string>
#include <vector>

#include "cablefem/catalog.hpp"
#include "cablefem/geometry.hpp"

namespace cablefem {

enum class RegionClass {
  Conductor,     // index = phase 0..2
  Sheath,        // index = phase
  Insulation,    // index = phase
  Serving,       // index = phase
  FillerBundle,  // interstitial filler inside the bundle circle
  Band,          // slip bands flanking the armor annulus
  ArmorSteel,    // index = slot
  ArmorPolymer,  // index = slot
  ArmorGap,      // bedding inside the armor annulus around the wires
  Jacket,
  Exterior,      // air or sea, by case
  Air            // generic air in test fixtures
};

struct RegionTag {
  RegionClass cls = RegionClass::Air;
  int index = 0;
  bool operator==(const RegionTag&) const = default;
};

enum class RotBlock : unsigned char { Static = 0, Armor = 1 };

// Cross-section in the frame corotating with the cores at z = 0. Triangles
// cover every region except the two slip bands, which are kept structural
// (node circles only) so extrusion can re-quad them layer by layer.
struct CrossSection {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<RegionTag> tri_region;
  std::vector<RotBlock> node_block;

  struct Band {
    std::vector<int> static_circle;  // n_az nodes, CCW, station-aligned
    std::vector<int> armor_circle;   // n_az nodes, CCW, station-aligned at z=0
    bool armor_is_outer = true;      // armor side at larger radius?
  };
  std::vector<Band> bands;
  int n_az = 0;           // stations on band circles
  double station0 = 0;    // angle of station 0

  double r_outer = 0;         // outermost meshed radius
  double r_stretch_inner = 0; // 0 = no stretched annulus
  std::vector<int> outer_circle;  // nodes on r_outer

  int add_node(double x, double y, RotBlock b = RotBlock::Static);
  void add_tri(int a, int b, int c, RegionTag tag);
};

// Density knobs, scaled by mesh level. All lengths in meters.
struct MeshParams {
  int m_div = 2;            // armor stations per slot
  int n_wire_target = 14;   // nodes around each armor wire (auto-raised to fit)
  std::vector<double> wire_ring_fracs{0.55, 1.0};
  int n_az_core = 32;       // nodes around each power core
  int conductor_rings = 4;
  int insulation_rings = 2;
  int sheath_rings = 2;
  int serving_rings = 1;
  double fill_h_rel = 0.16;   // bundle lattice spacing / Dcore
  int jacket_rings = 2;
  double exterior_growth = 1.45;
  double exterior_radius = 0;  // target meshed outer radius (auto if 0)
  int stretch_rings = 5;
  int n_z = 0;                 // 0 = auto
  double h_z_rel = 1.25;       // target layer height / armor in-plane spacing
  int tet_budget = 340000;     // cap on extruded cell count
};

enum class MeshLevel { Coarse, Default, Fine };
MeshLevel mesh_level_from_string(const std::string& s);

// Exterior extent depends on what the case needs: field probes require real
// geometry out to max_probe_radius; zero-sequence wants a modest physical sea
// before the stretched closure.
MeshParams make_mesh_params(MeshLevel level, const CableSpec& spec, double max_probe_radius = 0);

// Builds the full cable cross-section (cores, filler, bands, armor ring,
// jacket, exterior, stretched annulus zone marked via r_stretch_inner).
CrossSection build_cross_section(const CableSpec& spec, const MeshParams& p);

// --- reusable primitives (exposed for tests and simple fixtures) ----------

// Area factor of a regular n-gon inscribed in a unit circle.
double polygon_area_factor(int n);
// Radius scale that restores the full circle area (capped at cap_scale).
double polygon_radius_correction(int n, double cap_scale = 10.0);

// Appends a structured polar disk: center node, fan, then rings at the given
// radii (ascending). Returns the node ids of the outermost ring.
std::vector<int> add_polar_disk(CrossSection& cs, double cx, double cy,
                                const std::vector<double>& ring_radii, int n_az,
                                double angle0, RegionTag tag, RotBlock block);

// Appends a structured annulus ring strip between two existing concentric
// node rings of equal count (CCW order, matching indices).
void add_ring_strip(CrossSection& cs, const std::vector<int>& inner,
                    const std::vector<int>& outer, RegionTag tag);

// Appends a 2:1 coarsening strip: inner ring with 2k nodes, new outer ring
// with k nodes at radius r_out. Returns the outer ring ids.
std::vector<int> add_coarsen_ring(CrossSection& cs, const std::vector<int>& inner,
                                  double r_out, RegionTag tag, RotBlock block);

// Constrained-boundary Delaunay fill of the region inside `outer` and outside
// each circle in `holes` (all CCW node-id loops of existing nodes). Interior
// points on a hex lattice of spacing h. Throws MeshFailure when a boundary
// segment cannot be recovered.
void delaunay_fill(CrossSection& cs, const std::vector<int>& outer,
                   const std::vector<std::vector<int>>& holes, double h, RegionTag tag);

// 2D mesh sanity: positive areas, no duplicate nodes closer than tol.
void check_cross_section(const CrossSection& cs, double tol);

}  // namespace cablefem
