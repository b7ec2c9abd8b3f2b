#pragma once
#include <array>
#include <vector>

#include "cablefem/catalog.hpp"

namespace cablefem {

// Largest divisor g of the slot count such that the occupancy pattern is
// invariant under rotation by N/g slots; 1 when aperiodic.
int armor_symmetry_order(const std::vector<SlotFill>& occupancy);

// Shortest slab with exact rotational periodicity: L = 1/(g |1/Lc +- 1/La|),
// + for contralay, - for unilay. Unilay with |1/Lc - 1/La| < 1e-9 1/m has no
// finite slab and throws DegenerateTwist.
double period_length(int g, double Lc_m, double La_m, TwistSense twist);

// Rigid rotation tying the two slab faces: theta = 2 pi L / Lc.
double rotation_angle(double L_m, double Lc_m);

// Equivalent sea-return depth d = 503 sqrt(rho/f); rho in ohm*m, f in Hz.
double carson_depth(double rho_ohmm, double f_Hz);

// Everything about one cable's rotated-periodic slab.
struct PeriodicModel {
  int g = 1;              // occupancy symmetry order
  double L = 0;           // slab length (m)
  double theta = 0;       // face rotation (rad), = 2 pi L / Lc
  double omega_core = 0;  // core/jacket twist rate (rad/m), +2 pi / Lc
  double omega_armor = 0; // armor twist rate (rad/m), signed
  int rel_sign = -1;      // sign of (omega_armor - omega_core); armor slips
                          // rel_sign * 2 pi / g relative to the cores per slab
};

PeriodicModel derive_periodic_model(const CableSpec& spec);

// Centerline of armor slot k at height z: anglephase 2 pi k/N + omega_armor z.
std::array<double, 2> armor_slot_position(const CableSpec& spec, const PeriodicModel& pm,
                                          int slot, double z);

// Power core i (0..2) center at height z, first core on the +x axis at z = 0.
std::array<double, 2> core_center_position(const CableSpec& spec, const PeriodicModel& pm,
                                           int phase, double z);

// Right-handed measurement frame for field probes: longitudinal along the
// cable axis, vertical as given (orthogonalized), horizontal completing the
// triad. Throws ZeroReference when vertical is (anti)parallel to the axis.
struct ProbeFrame {
  std::array<double, 3> l{0, 0, 1};
  std::array<double, 3> v{0, 1, 0};
  std::array<double, 3> h{1, 0, 0};
};

ProbeFrame make_probe_frame(const std::array<double, 3>& axis,
                            const std::array<double, 3>& vertical);

}  // namespace cablefem
