#pragma once
#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace cablefem {

// ---- armor permeability models -------------------------------------------

// Constant complex relative permeability mu_re - j*mu_im (mu_im >= 0 is loss).
struct LinearComplex {
  double mu_re = 1.0;
  double mu_im = 0.0;
};

// Piecewise-linear complex permeability vs |H| (A/m, RMS), clamped outside the
// sampled range. Samples must be strictly ascending in H.
struct FieldDependent {
  struct Sample {
    double H_Apm;
    double mu_re;
    double mu_im;
  };
  std::vector<Sample> samples;
  std::string source;  // file the curve came from, for error messages
};

// Anhysteretic arctangent law B(H) = (2 B_sat/pi) atan(pi mu0 mu_initial H/(2 B_sat)).
// Frequency-domain use evaluates the secant permeability B/(mu0 H).
struct AnhystereticBH {
  double mu_initial = 300.0;
  double B_sat = 1.8;
};

using MaterialModel = std::variant<LinearComplex, FieldDependent, AnhystereticBH>;

// Relative permeability at field magnitude H_rms (A/m); Im <= 0 convention
// (returns mu_re - j*mu_im).
std::complex<double> evaluate_permeability(const MaterialModel& m, double H_rms);

FieldDependent load_mucurve(const std::string& path);

// ---- cable datasheet ------------------------------------------------------

enum class SlotFill { Steel, Polymer, Empty };
enum class TwistSense { Contralay, Unilay };
enum class ConductorMetal { Cu, Al };

std::vector<SlotFill> parse_occupancy(const std::string& text, int expected_count);
std::string serialize_occupancy(const std::vector<SlotFill>& occ);

struct CableSpec {
  std::string id;
  double Vr_kV = 0;
  double Imax_A = 0;
  double Sn_mm2 = 0;
  ConductorMetal material = ConductorMetal::Cu;
  double dc_mm = 0;      // conductor diameter
  double Ds_mm = 0;      // sheath outer diameter
  double es_mm = 0;      // sheath thickness
  double Dcore_mm = 0;   // power core outer diameter
  double Da_mm = 0;      // armor outer diameter (over wires)
  double da_mm = 0;      // armor wire diameter
  int N = 0;             // armor slot count
  std::vector<SlotFill> occupancy;
  double La_m = 0;       // armor lay length
  double Lc_m = 0;       // core lay length
  TwistSense twist = TwistSense::Contralay;
  double Tamb_C = 20;
  double sigma_c_MSm = 0;
  double sigma_s_MSm = 0;
  double sigma_a_MSm = 0;
  MaterialModel armor_mu = LinearComplex{};

  int steel_count() const;
  // SI accessors
  double rc_m() const { return dc_mm * 0.5e-3; }
  double rs_out_m() const { return Ds_mm * 0.5e-3; }
  double rs_in_m() const { return (Ds_mm * 0.5 - es_mm) * 1e-3; }
  double r_core_m() const { return Dcore_mm * 0.5e-3; }
  double core_center_m() const { return Dcore_mm * 1e-3 / 1.7320508075688772; }
  double r_pitch_m() const { return (Da_mm - da_mm) * 0.5e-3; }
  double r_wire_m() const { return da_mm * 0.5e-3; }
  double sigma_c() const { return sigma_c_MSm * 1e6; }
  double sigma_s() const { return sigma_s_MSm * 1e6; }
  double sigma_a() const { return sigma_a_MSm * 1e6; }
};

// Parses and validates a .cable datasheet. Relative paths in armor_mu = curve
// entries resolve against the datasheet's directory.
CableSpec load_cable(const std::string& path);
void validate_cable(const CableSpec& spec);
// Serializes to the same key = value schema; load(save(x)) reproduces every
// field exactly. Curve-backed armor_mu keeps its original path reference.
std::string serialize_cable(const CableSpec& spec);
void save_cable(const CableSpec& spec, const std::string& path);

// ---- measured reference points -------------------------------------------

enum class Quantity { R_series, X_series, I_sheath, Z0, B_probe, Va_h3 };
enum class Provenance { TextNumeric, FigureDigitized, Absent };

std::string to_string(Quantity q);
std::string to_string(Provenance p);

struct Measurement {
  Quantity quantity;
  std::string config;   // e.g. "SB,Full" or "SP,None"
  double x = 0;         // abscissa (meaning depends on quantity)
  std::string x_unit;
  double value = 0;     // NaN when provenance == Absent
  std::string value_unit;
  Provenance provenance = Provenance::TextNumeric;
  double tol_pct = 0;
};

struct MeasuredFixture {
  std::string source;
  std::vector<Measurement> rows;
};

MeasuredFixture load_measurements(const std::string& path);

// Shortest decimal representation that parses back to exactly this double.
std::string fmt_double(double v);

}  // namespace cablefem
