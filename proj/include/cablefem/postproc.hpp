#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cablefem/emsolver.hpp"
#include "cablefem/geometry.hpp"

namespace cablefem {

// One magnetic-field sample: RMS phasor components in the probe frame
// (longitudinal, vertical, horizontal), in microtesla.
struct ProbeSample {
  std::array<double, 3> point{0, 0, 0};
  cplx B_l{0, 0};
  cplx B_v{0, 0};
  cplx B_h{0, 0};
  double B_abs = 0;
};

// Engineering summary of one solved case. Scalars start as NaN and optional
// members empty; report writers skip whatever was never filled in.
struct CaseResult {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  std::string cable;
  std::string analysis;
  double f_Hz = kUnset;
  double I_A = kUnset;

  double R_series = kUnset;  // ohm/km
  double X_series = kUnset;  // ohm/km
  std::vector<cplx> I_sheath;          // A, one entry per phase
  std::optional<cplx> I_armor;         // A
  std::optional<double> V_armor;       // V over the stated route length
  double R0 = kUnset;                  // ohm/km
  double X0 = kUnset;                  // ohm/km
  std::map<std::string, double> loss_breakdown;  // W/km by loss class
  std::vector<ProbeSample> probes;
};

// Series resistance in ohm/km from the total active power dissipated in a
// slab of length L_model carrying balanced three-phase current I_rms.
double series_resistance(double P_slab_W, double I_rms, double L_model);
double series_resistance(const FieldSolution& sol, double I_rms, double L_model);

// Series reactance in ohm/km from the time-average stored magnetic energy.
double series_reactance(double W_avg_J, double omega, double I_rms, double L_model);
double series_reactance(const FieldSolution& sol, double I_rms, double L_model);

// Net current of a named drive group.
cplx group_current(const FieldSolution& sol, const std::string& group);

// Zero-sequence resistance and reactance (ohm/km) for a solution driven with
// I0 per phase and the sea return carrying -3 I0.
std::pair<double, double> zero_sequence(double P_slab_W, double W_avg_J,
                                        double omega, double I0, double L_model);
std::pair<double, double> zero_sequence(const FieldSolution& sol0, double I0,
                                        double L_model);

// Flux density at external points, projected on the probe frame, RMS uT.
std::vector<ProbeSample> probe_field(const FieldSolution& sol,
                                     const std::vector<std::array<double, 3>>& points,
                                     const ProbeFrame& frame = {});

// Active losses per km keyed by loss class. Classes present in the mesh appear
// even when their loss is zero; absent regions contribute no key.
std::map<std::string, double> loss_breakdown(const FieldSolution& sol);

// Signed percentage deviation of a computed value from a measured reference.
double relative_difference(double measured, double computed);

// Deterministic JSON report (same inputs give identical bytes).
std::string case_report_json(const CaseResult& r);
void write_case_report(const std::string& path, const CaseResult& r);

}  // namespace cablefem
