#pragma once
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cablefem/catalog.hpp"
#include "cablefem/mesh.hpp"

namespace cablefem {

using cplx = std::complex<double>;

// Material of one mesh region: conductivity plus a permeability model. The
// permeability may be a constant complex value or a |H|-dependent curve; the
// linear solver evaluates curves at their H -> 0 value, the fixed-point solver
// iterates them.
struct RegionMaterial {
  double sigma = 0.0;           // S/m
  MaterialModel mu = LinearComplex{};
};

// Resolves every region tag of the mesh to its material.
using MaterialMap = std::function<RegionMaterial(const RegionTag&)>;

enum class GroupConstraint {
  Current,              // net group current forced to I_target
  FloatingZeroCurrent,  // gradient floats so that net current is zero
  VoltageGradientZero,  // e_k = 0, current reported post hoc
};

// One electrical group: a set of conducting regions bonded together, sharing
// one axial voltage gradient. index = -1 in a tag matches every index of that
// region class.
struct DriveGroup {
  std::string name;
  std::vector<RegionTag> regions;
  GroupConstraint constraint = GroupConstraint::Current;
  cplx I_target = 0.0;  // A RMS, used by Current only
};

struct DriveSpec {
  std::vector<DriveGroup> groups;
  double f = 50.0;  // Hz
};

struct IterationRecord {
  int iter = 0;
  double max_rel_dmu = 0;  // largest applied relative permeability change
  double H_max = 0;        // largest element |H| (A/m RMS)
};

// Solved field with the circuit quantities. All phasors are RMS. Edge DOFs are
// circulations of A along the edge from its lower to its higher node id; the
// mesh and edge set must outlive the solution.
struct FieldSolution {
  const PeriodicMesh* mesh = nullptr;
  const EdgeSet* edges = nullptr;
  double f = 0;
  std::vector<cplx> dofs;  // every edge, eliminated ones reconstructed

  std::vector<std::string> group_names;
  std::vector<GroupConstraint> group_kind;
  std::vector<cplx> e_k;  // axial voltage gradient per group, V/m
  std::vector<cplx> I_k;  // net current per group, A

  // per-tet material state actually used (fixed-point runs store the
  // converged permeability) and group membership (-1 = ungrouped)
  std::vector<double> sigma_tet;
  std::vector<cplx> mu_tet;
  std::vector<int> group_of_tet;

  std::vector<IterationRecord> log;

  int group_index(const std::string& name) const;  // UnknownGroup when absent
};

// Assembled frequency-domain system. Construction assembles the unconstrained
// operators on the full edge set; constrain() eliminates periodic slaves,
// grounds the outer rim, gauges the air, and borders the matrix with the
// circuit rows; solve() factorizes and returns the solution.
class EmSystem {
 public:
  EmSystem(const PeriodicMesh& mesh, const EdgeSet& edges, const MaterialMap& materials,
           double f);
  // per-tet material override used by the fixed-point loop
  EmSystem(const PeriodicMesh& mesh, const EdgeSet& edges, std::vector<double> sigma_tet,
           std::vector<cplx> mu_tet, double f);
  EmSystem(EmSystem&&) noexcept;
  EmSystem& operator=(EmSystem&&) noexcept;
  ~EmSystem();

  void constrain(const FacePairing& pairing, const DriveSpec& drives);
  FieldSolution solve();  // requires constrain(); reusable after re-assembly

  // swap in new per-tet permeabilities (conductivities must stay fixed) and
  // re-assemble; the factorization pattern is kept. Used by the fixed point.
  void update_permeability(std::vector<cplx> mu_tet);

  // diagnostics on the unconstrained operator, for tests
  int n_edges() const;
  int n_unknowns() const;  // after constrain()
  std::vector<cplx> apply_full(const std::vector<cplx>& x) const;  // (K + jwM) x
  double symmetry_error() const;  // max |A - A^T| / max |A|
  bool is_real() const;           // no imaginary entries assembled

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
};

// One-call linear solve.
FieldSolution solve_frequency(const PeriodicMesh& mesh, const EdgeSet& edges,
                              const FacePairing& pairing, const MaterialMap& materials,
                              const DriveSpec& drives);

struct PicardOptions {
  double relax = 0.5;
  double tol = 1e-3;  // converged when max relative mu change drops below
  int cap = 50;
};

// Fixed point over |H|-dependent permeabilities. Constant models converge in
// one iteration; NoConvergence carries the iteration log in its message.
FieldSolution solve_nonlinear_mu(const PeriodicMesh& mesh, const EdgeSet& edges,
                                 const FacePairing& pairing, const MaterialMap& materials,
                                 const DriveSpec& drives, PicardOptions opt = {});

// Energy bookkeeping of a solved case, all per slab (absolute W / J, not per
// km). Conduction entries are keyed by region class name; magnetic entries
// only appear for lossy-mu classes.
struct EnergyBreakdown {
  double conduction_W = 0;
  double magnetic_W = 0;
  double stored_J = 0;   // time-average magnetic energy W_avg
  double input_W = 0;    // sum Re(e_k conj(I_k)) L
  std::map<std::string, double> conduction_by_class;
  std::map<std::string, double> magnetic_by_class;
  std::map<std::string, double> stored_by_class;
};
EnergyBreakdown compute_energy(const FieldSolution& sol);

// B = curl A of the containing tet (constant per tet), RMS phasor components
// in mesh coordinates. Points inside the stretched annulus or outside the mesh
// throw PointOutsideMesh.
std::array<cplx, 3> field_at(const FieldSolution& sol, const std::array<double, 3>& p);

// ---- standard material maps and drives ------------------------------------

// Datasheet materials: conductor/sheath/armor conductivities, armor mu model,
// unit air elsewhere. sigma_exterior > 0 turns the exterior into sea;
// armor_present = false blanks the steel to air (geometry untouched).
MaterialMap cable_materials(const CableSpec& spec, double sigma_exterior = 0.0,
                            bool armor_present = true);

enum class Bonding { SinglePoint, SolidBonding };

// Balanced three-phase drive: conductors carry I_rms at 0/-120/+120 degrees;
// sheaths and armor float (SP) or sit at zero gradient (SB).
DriveSpec balanced_three_phase(double I_rms, double f, Bonding bonding,
                               bool armor_group = true);

// Zero-sequence drive: I0 in every conductor, one bonded return group of
// sheaths + armor + exterior forced to -3 I0.
DriveSpec zero_sequence_drive(double I0, double f, bool armor_group = true);

}  // namespace cablefem
