#include "cablefem/geometry.hpp"

#include <cmath>

#include "cablefem/errors.hpp"

namespace cablefem {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

int armor_symmetry_order(const std::vector<SlotFill>& occupancy) {
  const int n = static_cast<int>(occupancy.size());
  if (n == 0) throw ValidationError("armor_symmetry_order: empty occupancy");
  for (int g = n; g >= 1; --g) {
    if (n % g != 0) continue;
    const int shift = n / g;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      ok = occupancy[i] == occupancy[(i + shift) % n];
    if (ok) return g;
  }
  return 1;
}

double period_length(int g, double Lc_m, double La_m, TwistSense twist) {
  if (g < 1) throw ValidationError("period_length: symmetry order must be >= 1");
  if (Lc_m <= 0 || La_m <= 0) throw ValidationError("period_length: lay lengths must be positive");
  double rate = (twist == TwistSense::Contralay) ? (1.0 / Lc_m + 1.0 / La_m)
                                                 : std::abs(1.0 / Lc_m - 1.0 / La_m);
  if (twist == TwistSense::Unilay && rate < 1e-9)
    throw DegenerateTwist("period_length: unilay with matched lays has no finite slab (|1/Lc - 1/La| = " +
                          fmt_double(rate) + " 1/m)");
  return 1.0 / (g * rate);
}

double rotation_angle(double L_m, double Lc_m) {
  if (L_m <= 0 || Lc_m <= 0) throw ValidationError("rotation_angle: lengths must be positive");
  return kTwoPi * L_m / Lc_m;
}

double carson_depth(double rho_ohmm, double f_Hz) {
  if (rho_ohmm <= 0 || f_Hz <= 0) throw ValidationError("carson_depth: rho and f must be positive");
  return 503.0 * std::sqrt(rho_ohmm / f_Hz);
}

PeriodicModel derive_periodic_model(const CableSpec& spec) {
  PeriodicModel pm;
  pm.g = armor_symmetry_order(spec.occupancy);
  pm.L = period_length(pm.g, spec.Lc_m, spec.La_m, spec.twist);
  pm.theta = rotation_angle(pm.L, spec.Lc_m);
  pm.omega_core = kTwoPi / spec.Lc_m;
  if (spec.twist == TwistSense::Contralay) {
    pm.omega_armor = -kTwoPi / spec.La_m;
  } else {
    pm.omega_armor = kTwoPi / spec.La_m;
  }
  pm.rel_sign = (pm.omega_armor - pm.omega_core) < 0 ? -1 : 1;
  return pm;
}

std::array<double, 2> armor_slot_position(const CableSpec& spec, const PeriodicModel& pm,
                                          int slot, double z) {
  if (slot < 0 || slot >= spec.N) throw ValidationError("armor_slot_position: slot out of range");
  double ang = kTwoPi * slot / spec.N + pm.omega_armor * z;
  double r = spec.r_pitch_m();
  return {r * std::cos(ang), r * std::sin(ang)};
}

std::array<double, 2> core_center_position(const CableSpec& spec, const PeriodicModel& pm,
                                           int phase, double z) {
  if (phase < 0 || phase > 2) throw ValidationError("core_center_position: phase out of range");
  double ang = kTwoPi * phase / 3.0 + pm.omega_core * z;
  double r = spec.core_center_m();
  return {r * std::cos(ang), r * std::sin(ang)};
}

ProbeFrame make_probe_frame(const std::array<double, 3>& axis,
                            const std::array<double, 3>& vertical) {
  auto norm = [](const std::array<double, 3>& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  };
  double na = norm(axis);
  if (na == 0) throw ZeroReference("probe frame: zero axis vector");
  std::array<double, 3> l{axis[0] / na, axis[1] / na, axis[2] / na};
  double dot = vertical[0] * l[0] + vertical[1] * l[1] + vertical[2] * l[2];
  std::array<double, 3> v{vertical[0] - dot * l[0], vertical[1] - dot * l[1],
                          vertical[2] - dot * l[2]};
  double nv = norm(v);
  if (nv < 1e-12 * (norm(vertical) + 1.0))
    throw ZeroReference("probe frame: vertical reference is parallel to the axis");
  for (auto& c : v) c /= nv;
  std::array<double, 3> h{v[1] * l[2] - v[2] * l[1], v[2] * l[0] - v[0] * l[2],
                          v[0] * l[1] - v[1] * l[0]};
  return {l, v, h};
}

}  // namespace cablefem
