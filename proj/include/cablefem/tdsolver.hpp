#pragma once
#include <map>
#include <string>
#include <vector>

#include "cablefem/emsolver.hpp"

namespace cablefem {

// Time-domain run of the same bordered system the frequency solver builds.
// Current groups impose i_k(t) = sqrt(2) |I_k| cos(2 pi f t + arg I_k); the
// anhysteretic permeability law is evaluated instantaneously, so saturation
// harmonics appear in the waveforms while hysteresis stays a frequency-domain
// concept.
struct TransientCase {
  DriveSpec drives;
  int periods_total = 5;
  int periods_discard = 3;   // start-up transient dropped from the output
  int steps_per_period = 200;
  double theta = 0.55;       // implicitness of the one-step scheme
  double newton_tol = 1e-8;  // relative residual per step
  int newton_max = 20;
};

// Waveforms sampled at the retained step times t[j] = n dt, covering exactly
// (periods_total - periods_discard) periods. v_a is the armor gradient scaled
// to volts per report_km kilometres; both armor traces are empty when no
// group is named "armor". e_group / i_group carry every group.
struct Waveforms {
  double f0 = 0;
  double dt = 0;
  double report_km = 1.0;
  std::vector<double> t;
  std::vector<double> v_a;  // V per report_km km
  std::vector<double> i_a;  // A
  std::map<std::string, std::vector<double>> e_group;  // V/m
  std::map<std::string, std::vector<double>> i_group;  // A
};

Waveforms solve_transient(const PeriodicMesh& mesh, const EdgeSet& edges,
                          const FacePairing& pairing, const MaterialMap& materials,
                          const TransientCase& tc);

// Harmonic content at integer multiples of f0, from a signal sampled at dt
// spanning a whole number of periods (NonIntegerPeriods otherwise). amp is
// the peak amplitude, phase is referenced to the first sample:
// x(t_j) ~ sum_k amp_k cos(2 pi k f0 j dt + phase_k); order 0 is the mean.
struct Harmonic {
  double amp = 0;
  double phase = 0;
};
std::map<int, Harmonic> extract_harmonics(const std::vector<double>& signal, double dt,
                                          double f0);

}  // namespace cablefem
