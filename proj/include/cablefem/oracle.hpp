#pragma once
#include <array>
#include <complex>
#include <vector>

namespace cablefem {
namespace oracle {

// Internal impedance of an isolated round wire (per meter of length).
struct RoundWireImpedance {
  double R_dc;     // ohm/m
  double R_ac;     // ohm/m
  double L_int;    // H/m (internal inductance only)
  double ratio;    // R_ac / R_dc
};

// Exact Bessel solution for a solid round wire of radius a. Power series for
// |z| <= 8, modified-Bessel ratio continued fraction beyond (the divergent
// asymptotic series cannot reach 1e-10 at the switchover; the continued
// fraction can). Max relative error 1e-10 over the full range.
RoundWireImpedance skin_round_wire(double radius_m, double sigma_Spm, double mu_r, double f_Hz);

// External inductance per meter between radii a and b: mu0/(2 pi) ln(b/a).
double coax_external_inductance(double a_m, double b_m);

// Quasi-static field of infinite straight wires along z at 2D positions.
struct WireCurrent {
  double x;
  double y;
  std::complex<double> I;  // RMS phasor
};

// Returns (Bx, By) RMS phasors at the probe point; throws when the point
// coincides with a wire position.
std::array<std::complex<double>, 2> wires_field(const std::vector<WireCurrent>& wires,
                                                double x, double y);

}  // namespace oracle
}  // namespace cablefem
