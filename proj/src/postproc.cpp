#include "cablefem/postproc.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cablefem/errors.hpp"
#include "cablefem/mesh.hpp"

namespace cablefem {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_drive(double I_rms, double L_model) {
  if (!(I_rms > 0)) throw ZeroCurrent("impedance is undefined at zero drive current");
  if (!(L_model > 0)) throw ValidationError("model length must be positive");
}

std::string loss_key(const std::string& cls, bool magnetic) {
  if (cls == "conductor") return "conductors";
  if (cls == "sheath") return "sheaths";
  if (cls == "armor_steel") return magnetic ? "armor-magnetic" : "armor-conduction";
  if (cls == "exterior") return "sea";
  return magnetic ? cls + "-magnetic" : cls;
}

}  // namespace

double series_resistance(double P_slab_W, double I_rms, double L_model) {
  check_drive(I_rms, L_model);
  return P_slab_W / (3.0 * I_rms * I_rms) / L_model * 1000.0;
}

double series_resistance(const FieldSolution& sol, double I_rms, double L_model) {
  EnergyBreakdown en = compute_energy(sol);
  return series_resistance(en.conduction_W + en.magnetic_W, I_rms, L_model);
}

double series_reactance(double W_avg_J, double omega, double I_rms, double L_model) {
  check_drive(I_rms, L_model);
  return omega * 2.0 * W_avg_J / (3.0 * I_rms * I_rms) / L_model * 1000.0;
}

double series_reactance(const FieldSolution& sol, double I_rms, double L_model) {
  EnergyBreakdown en = compute_energy(sol);
  return series_reactance(en.stored_J, kTwoPi * sol.f, I_rms, L_model);
}

cplx group_current(const FieldSolution& sol, const std::string& group) {
  return sol.I_k[sol.group_index(group)];
}

std::pair<double, double> zero_sequence(double P_slab_W, double W_avg_J,
                                        double omega, double I0, double L_model) {
  check_drive(I0, L_model);
  double denom = 3.0 * I0 * I0 * L_model / 1000.0;
  return {P_slab_W / denom, omega * 2.0 * W_avg_J / denom};
}

std::pair<double, double> zero_sequence(const FieldSolution& sol0, double I0,
                                        double L_model) {
  bool sea = false;
  for (size_t t = 0; t < sol0.mesh->tets.size() && !sea; ++t)
    sea = sol0.mesh->tet_region[t].cls == RegionClass::Exterior && sol0.sigma_tet[t] > 0;
  if (!sea)
    throw MissingSeaRegion("zero-sequence needs a conducting exterior return");
  EnergyBreakdown en = compute_energy(sol0);
  return zero_sequence(en.conduction_W + en.magnetic_W, en.stored_J,
                       kTwoPi * sol0.f, I0, L_model);
}

std::vector<ProbeSample> probe_field(const FieldSolution& sol,
                                     const std::vector<std::array<double, 3>>& points,
                                     const ProbeFrame& frame) {
  std::vector<ProbeSample> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    std::array<cplx, 3> B = field_at(sol, p);
    ProbeSample s;
    s.point = p;
    for (int c = 0; c < 3; ++c) {
      s.B_l += 1e6 * B[c] * frame.l[c];
      s.B_v += 1e6 * B[c] * frame.v[c];
      s.B_h += 1e6 * B[c] * frame.h[c];
    }
    s.B_abs = std::sqrt(std::norm(s.B_l) + std::norm(s.B_v) + std::norm(s.B_h));
    out.push_back(s);
  }
  return out;
}

std::map<std::string, double> loss_breakdown(const FieldSolution& sol) {
  EnergyBreakdown en = compute_energy(sol);
  double per_km = 1000.0 / sol.mesh->model.L;
  std::map<std::string, double> out;
  bool cond = false, sheath = false, armor = false, sea = false;
  for (size_t t = 0; t < sol.mesh->tets.size(); ++t) {
    switch (sol.mesh->tet_region[t].cls) {
      case RegionClass::Conductor: cond = true; break;
      case RegionClass::Sheath: sheath = true; break;
      case RegionClass::ArmorSteel: armor = true; break;
      case RegionClass::Exterior: sea = sea || sol.sigma_tet[t] > 0; break;
      default: break;
    }
  }
  if (cond) out.emplace("conductors", 0.0);
  if (sheath) out.emplace("sheaths", 0.0);
  if (armor) {
    out.emplace("armor-conduction", 0.0);
    out.emplace("armor-magnetic", 0.0);
  }
  if (sea) out.emplace("sea", 0.0);
  for (const auto& [cls, w] : en.conduction_by_class)
    out[loss_key(cls, false)] += w * per_km;
  for (const auto& [cls, w] : en.magnetic_by_class)
    out[loss_key(cls, true)] += w * per_km;
  return out;
}

double relative_difference(double measured, double computed) {
  if (measured == 0.0) throw ZeroReference("relative difference needs a nonzero reference");
  return 100.0 * (computed - measured) / measured;
}

std::string case_report_json(const CaseResult& r) {
  using json = nlohmann::ordered_json;
  auto phasor = [](const cplx& v) {
    return json{{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}};
  };
  json j;
  if (!r.cable.empty()) j["cable"] = r.cable;
  if (!r.analysis.empty()) j["analysis"] = r.analysis;
  if (std::isfinite(r.f_Hz)) j["f_Hz"] = r.f_Hz;
  if (std::isfinite(r.I_A)) j["I_A"] = r.I_A;
  if (std::isfinite(r.R_series)) j["R_series_ohm_km"] = r.R_series;
  if (std::isfinite(r.X_series)) j["X_series_ohm_km"] = r.X_series;
  if (!r.I_sheath.empty()) {
    json arr = json::array();
    for (const auto& v : r.I_sheath) arr.push_back(phasor(v));
    j["I_sheath_A"] = arr;
  }
  if (r.I_armor) j["I_armor_A"] = phasor(*r.I_armor);
  if (r.V_armor) j["V_armor_V"] = *r.V_armor;
  if (std::isfinite(r.R0)) j["R0_ohm_km"] = r.R0;
  if (std::isfinite(r.X0)) j["X0_ohm_km"] = r.X0;
  if (!r.loss_breakdown.empty()) {
    json loss = json::object();
    for (const auto& [k, v] : r.loss_breakdown) loss[k] = v;
    j["loss_W_km"] = loss;
  }
  if (!r.probes.empty()) {
    json arr = json::array();
    for (const auto& s : r.probes) {
      arr.push_back(json{{"x_m", s.point[0]},
                         {"y_m", s.point[1]},
                         {"z_m", s.point[2]},
                         {"B_l_uT", std::abs(s.B_l)},
                         {"B_v_uT", std::abs(s.B_v)},
                         {"B_h_uT", std::abs(s.B_h)},
                         {"B_abs_uT", s.B_abs}});
    }
    j["probes"] = arr;
  }
  return j.dump(2) + "\n";
}

void write_case_report(const std::string& path, const CaseResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open report file: " + path);
  out << case_report_json(r);
}

}  // namespace cablefem
