#include "cablefem/oracle.hpp"

#include <cmath>

#include "cablefem/errors.hpp"

namespace cablefem {
namespace oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu0 = 4e-7 * kPi;
using Cplx = std::complex<double>;

// I0(z)/I1(z) by power series; accurate to ~1e-14 for |z| <= 8 (mild
// cancellation: arg(z) = pi/4 keeps Re z growing with |z|).
Cplx bessel_ratio_series(Cplx z) {
  Cplx z2 = 0.25 * z * z;
  Cplx i0 = 1.0, i1 = 0.5 * z;
  Cplx t0 = 1.0, t1 = 0.5 * z;
  for (int k = 1; k < 64; ++k) {
    t0 *= z2 / double(k * k);
    t1 *= z2 / double(k * (k + 1));
    i0 += t0;
    i1 += t1;
    if (std::abs(t0) < 1e-18 * std::abs(i0) && std::abs(t1) < 1e-18 * std::abs(i1)) break;
  }
  return i0 / i1;
}

// I0(z)/I1(z) = 2/z + I2/I1 expansion via the descending continued fraction
// r_nu = I_nu/I_{nu-1} = 1/(2 nu/z + r_{nu+1}); evaluated with modified Lentz.
Cplx bessel_ratio_cf(Cplx z) {
  const double tiny = 1e-300;
  Cplx f = tiny, C = f, D = 0.0;
  // continued fraction for r_1 = I1/I0: b_k = 2k/z, a_k = 1
  for (int k = 1; k < 2000000; ++k) {
    Cplx b = 2.0 * double(k) / z;
    D = b + D;
    if (std::abs(D) < tiny) D = tiny;
    C = b + 1.0 / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    Cplx delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 / f;  // I0/I1
}

}  // namespace

RoundWireImpedance skin_round_wire(double radius_m, double sigma_Spm, double mu_r, double f_Hz) {
  if (radius_m <= 0 || sigma_Spm <= 0 || mu_r <= 0 || f_Hz < 0)
    throw ValidationError("skin_round_wire: need a > 0, sigma > 0, mu_r > 0, f >= 0");
  RoundWireImpedance out{};
  out.R_dc = 1.0 / (sigma_Spm * kPi * radius_m * radius_m);
  double mu = kMu0 * mu_r;
  if (f_Hz == 0.0) {
    out.R_ac = out.R_dc;
    out.L_int = mu / (8.0 * kPi);
    out.ratio = 1.0;
    return out;
  }
  double w = 2.0 * kPi * f_Hz;
  double q = radius_m * std::sqrt(w * mu * sigma_Spm);  // |m a|
  Cplx m = std::sqrt(w * mu * sigma_Spm) * Cplx(std::sqrt(0.5), std::sqrt(0.5));
  Cplx z = m * radius_m;
  Cplx ratio = (q <= 8.0) ? bessel_ratio_series(z) : bessel_ratio_cf(z);
  Cplx Z = m / (2.0 * kPi * radius_m * sigma_Spm) * ratio;
  out.R_ac = Z.real();
  out.L_int = Z.imag() / w;
  out.ratio = out.R_ac / out.R_dc;
  return out;
}

double coax_external_inductance(double a_m, double b_m) {
  if (a_m <= 0) throw BadRadius("coax_external_inductance: inner radius must be positive");
  if (b_m <= a_m) throw BadRadius("coax_external_inductance: need b > a");
  return kMu0 / (2.0 * kPi) * std::log(b_m / a_m);
}

std::array<Cplx, 2> wires_field(const std::vector<WireCurrent>& wires, double x, double y) {
  Cplx bx = 0.0, by = 0.0;
  for (const auto& wcur : wires) {
    double dx = x - wcur.x, dy = y - wcur.y;
    double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) throw ValidationError("wires_field: probe point coincides with a wire");
    Cplx scale = kMu0 * wcur.I / (2.0 * kPi * d2);
    bx += scale * (-dy);
    by += scale * dx;
  }
  return {bx, by};
}

}  // namespace oracle
}  // namespace cablefem
