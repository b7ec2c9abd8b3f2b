#include "cablefem/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cablefem/errors.hpp"
#include "cablefem/keyvalue.hpp"

namespace cablefem {

namespace {
constexpr double kMu0 = 4e-7 * 3.14159265358979323846;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---- permeability ---------------------------------------------------------

std::complex<double> evaluate_permeability(const MaterialModel& m, double H_rms) {
  if (H_rms < 0) throw ValidationError("evaluate_permeability: negative field magnitude");
  if (const auto* lin = std::get_if<LinearComplex>(&m))
    return {lin->mu_re, -lin->mu_im};
  if (const auto* fd = std::get_if<FieldDependent>(&m)) {
    const auto& s = fd->samples;
    if (H_rms <= s.front().H_Apm) return {s.front().mu_re, -s.front().mu_im};
    if (H_rms >= s.back().H_Apm) return {s.back().mu_re, -s.back().mu_im};
    auto hi = std::upper_bound(s.begin(), s.end(), H_rms,
                               [](double h, const FieldDependent::Sample& a) { return h < a.H_Apm; });
    auto lo = hi - 1;
    double w = (H_rms - lo->H_Apm) / (hi->H_Apm - lo->H_Apm);
    return {lo->mu_re + w * (hi->mu_re - lo->mu_re),
            -(lo->mu_im + w * (hi->mu_im - lo->mu_im))};
  }
  const auto& bh = std::get<AnhystereticBH>(m);
  if (H_rms == 0.0) return {bh.mu_initial, 0.0};
  double B = (2.0 * bh.B_sat / kPi) * std::atan(kPi * kMu0 * bh.mu_initial * H_rms / (2.0 * bh.B_sat));
  return {B / (kMu0 * H_rms), 0.0};
}

FieldDependent load_mucurve(const std::string& path) {
  FieldDependent fd;
  fd.source = path;
  auto rows = read_csv(path, {"H_Apm", "mu_re", "mu_im"});
  if (rows.empty()) throw ParseError(path + ": permeability curve has no samples");
  for (const auto& r : rows) {
    FieldDependent::Sample s{parse_double(r[0], path + " H_Apm"),
                             parse_double(r[1], path + " mu_re"),
                             parse_double(r[2], path + " mu_im")};
    if (!fd.samples.empty() && s.H_Apm <= fd.samples.back().H_Apm)
      throw ValidationError(path + ": H samples must be strictly ascending");
    if (s.H_Apm < 0 || s.mu_re <= 0 || s.mu_im < 0)
      throw ValidationError(path + ": curve requires H >= 0, mu_re > 0, mu_im >= 0");
    fd.samples.push_back(s);
  }
  return fd;
}

// ---- occupancy ------------------------------------------------------------

namespace {

SlotFill slot_from_letter(char c, const std::string& ctx) {
  switch (c) {
    case 'S': return SlotFill::Steel;
    case 'P': return SlotFill::Polymer;
    case 'E': return SlotFill::Empty;
    default: throw ParseError(ctx + ": bad slot letter '" + std::string(1, c) + "'");
  }
}

char slot_letter(SlotFill f) {
  switch (f) {
    case SlotFill::Steel: return 'S';
    case SlotFill::Polymer: return 'P';
    default: return 'E';
  }
}

// Splits on commas at paren depth zero so "(S,P)*64,S" tokenizes correctly.
std::vector<std::string> split_terms(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

std::vector<SlotFill> parse_occupancy(const std::string& text, int expected_count) {
  const std::string ctx = "occupancy '" + text + "'";
  std::vector<SlotFill> occ;
  for (const std::string& term : split_terms(text)) {
    if (term.empty()) throw ParseError(ctx + ": empty term");
    std::size_t star = term.rfind('*');
    if (star == std::string::npos) {
      if (term.size() != 1) throw ParseError(ctx + ": bad term '" + term + "'");
      occ.push_back(slot_from_letter(term[0], ctx));
      continue;
    }
    std::string lhs = trim(term.substr(0, star));
    std::string rhs = trim(term.substr(star + 1));
    std::string count_s, pattern_s;
    if (!lhs.empty() && lhs[0] == '(') {
      pattern_s = lhs;
      count_s = rhs;
    } else if (std::isdigit(static_cast<unsigned char>(lhs.empty() ? ' ' : lhs[0]))) {
      count_s = lhs;
      pattern_s = rhs;
    } else {
      throw ParseError(ctx + ": bad term '" + term + "'");
    }
    char* end = nullptr;
    long cnt = std::strtol(count_s.c_str(), &end, 10);
    if (end != count_s.c_str() + count_s.size() || cnt < 1)
      throw ParseError(ctx + ": bad repeat count '" + count_s + "'");
    std::vector<SlotFill> pattern;
    if (pattern_s.size() >= 2 && pattern_s.front() == '(' && pattern_s.back() == ')') {
      for (const std::string& p : split_terms(pattern_s.substr(1, pattern_s.size() - 2))) {
        if (p.size() != 1) throw ParseError(ctx + ": bad pattern item '" + p + "'");
        pattern.push_back(slot_from_letter(p[0], ctx));
      }
    } else if (pattern_s.size() == 1) {
      pattern.push_back(slot_from_letter(pattern_s[0], ctx));
    } else {
      throw ParseError(ctx + ": bad pattern '" + pattern_s + "'");
    }
    for (long i = 0; i < cnt; ++i) occ.insert(occ.end(), pattern.begin(), pattern.end());
  }
  if (expected_count >= 0 && static_cast<int>(occ.size()) != expected_count)
    throw ValidationError(ctx + ": has " + std::to_string(occ.size()) + " slots, expected " +
                          std::to_string(expected_count));
  return occ;
}

std::string serialize_occupancy(const std::vector<SlotFill>& occ) {
  const int n = static_cast<int>(occ.size());
  if (n == 0) return "";
  bool uniform = std::all_of(occ.begin(), occ.end(), [&](SlotFill f) { return f == occ[0]; });
  if (uniform) return std::to_string(n) + "*" + std::string(1, slot_letter(occ[0]));
  if (n % 2 == 0 && occ[0] != occ[1]) {
    bool alternating = true;
    for (int i = 0; i < n; ++i)
      if (occ[i] != occ[i % 2]) { alternating = false; break; }
    if (alternating) {
      std::string s = "(";
      s += slot_letter(occ[0]);
      s += ',';
      s += slot_letter(occ[1]);
      s += ")*";
      s += std::to_string(n / 2);
      return s;
    }
  }
  // general: run-length encode consecutive repeats
  std::string out;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && occ[j] == occ[i]) ++j;
    if (!out.empty()) out += ',';
    if (j - i > 1) out += std::to_string(j - i) + "*";
    out += slot_letter(occ[i]);
    i = j;
  }
  return out;
}

// ---- cable spec -----------------------------------------------------------

int CableSpec::steel_count() const {
  return static_cast<int>(std::count(occupancy.begin(), occupancy.end(), SlotFill::Steel));
}

namespace {

MaterialModel parse_armor_mu(const std::string& text, const std::string& dir,
                             const std::string& ctx) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  if (kind == "linear") {
    LinearComplex lc;
    if (!(in >> lc.mu_re >> lc.mu_im))
      throw ParseError(ctx + ": armor_mu linear needs 'linear <mu_re> <mu_im>'");
    return lc;
  }
  if (kind == "curve") {
    std::string rel;
    if (!(in >> rel)) throw ParseError(ctx + ": armor_mu curve needs a file path");
    std::filesystem::path p(rel);
    if (p.is_relative()) p = std::filesystem::path(dir) / p;
    FieldDependent fd = load_mucurve(p.string());
    fd.source = rel;  // keep the reference as written for round-tripping
    return fd;
  }
  if (kind == "anhysteretic") {
    AnhystereticBH bh;
    if (!(in >> bh.mu_initial >> bh.B_sat))
      throw ParseError(ctx + ": armor_mu anhysteretic needs '<mu_initial> <B_sat>'");
    return bh;
  }
  throw ParseError(ctx + ": armor_mu kind '" + kind + "' (want linear|curve|anhysteretic)");
}

std::string serialize_armor_mu(const MaterialModel& m) {
  if (const auto* lc = std::get_if<LinearComplex>(&m))
    return "linear " + fmt_double(lc->mu_re) + " " + fmt_double(lc->mu_im);
  if (const auto* fd = std::get_if<FieldDependent>(&m)) return "curve " + fd->source;
  const auto& bh = std::get<AnhystereticBH>(m);
  return "anhysteretic " + fmt_double(bh.mu_initial) + " " + fmt_double(bh.B_sat);
}

}  // namespace

CableSpec load_cable(const std::string& path) {
  KeyValueFile kv = KeyValueFile::parse_file(path);
  CableSpec s;
  s.id = kv.get("id");
  s.Vr_kV = kv.get_double("Vr_kV");
  s.Imax_A = kv.get_double("Imax_A");
  s.Sn_mm2 = kv.get_double("Sn_mm2");
  std::string metal = kv.get("material");
  if (metal == "Cu") s.material = ConductorMetal::Cu;
  else if (metal == "Al") s.material = ConductorMetal::Al;
  else throw ParseError(path + ": material must be Cu or Al, got '" + metal + "'");
  s.dc_mm = kv.get_double("dc_mm");
  s.Ds_mm = kv.get_double("Ds_mm");
  s.es_mm = kv.get_double("es_mm");
  s.Dcore_mm = kv.get_double("Dcore_mm");
  s.Da_mm = kv.get_double("Da_mm");
  s.da_mm = kv.get_double("da_mm");
  s.N = kv.get_int("N");
  s.occupancy = parse_occupancy(kv.get("occupancy"), s.N);
  s.La_m = kv.get_double("La_m");
  s.Lc_m = kv.get_double("Lc_m");
  std::string tw = kv.get("twist");
  if (tw == "contralay") s.twist = TwistSense::Contralay;
  else if (tw == "unilay") s.twist = TwistSense::Unilay;
  else throw ParseError(path + ": twist must be contralay or unilay, got '" + tw + "'");
  s.Tamb_C = kv.get_double("Tamb_C");
  s.sigma_c_MSm = kv.get_double("sigma_c_MSm");
  s.sigma_s_MSm = kv.get_double("sigma_s_MSm");
  s.sigma_a_MSm = kv.get_double("sigma_a_MSm");
  s.armor_mu = parse_armor_mu(kv.get("armor_mu"),
                              std::filesystem::path(path).parent_path().string(), path);
  validate_cable(s);
  return s;
}

void validate_cable(const CableSpec& s) {
  const std::string ctx = "cable '" + s.id + "'";
  if (s.N < 1) throw ValidationError(ctx + ": N must be >= 1");
  if (static_cast<int>(s.occupancy.size()) != s.N)
    throw ValidationError(ctx + ": occupancy slot count != N");
  if (s.La_m <= 0 || s.Lc_m <= 0) throw ValidationError(ctx + ": lay lengths must be positive");
  if (s.sigma_c_MSm <= 0 || s.sigma_s_MSm <= 0 || s.sigma_a_MSm <= 0)
    throw ValidationError(ctx + ": conductivities must be positive");
  if (!(s.dc_mm > 0 && s.es_mm > 0 && s.Ds_mm > 0 && s.Dcore_mm > 0 && s.Da_mm > 0 && s.da_mm > 0))
    throw ValidationError(ctx + ": all diameters/thicknesses must be positive");
  if (!(s.dc_mm + 2 * s.es_mm < s.Ds_mm))
    throw ValidationError(ctx + ": need dc + 2 es < Ds");
  if (!(s.Ds_mm <= s.Dcore_mm)) throw ValidationError(ctx + ": need Ds <= Dcore");
  // trefoil: centers at Dcore/sqrt(3) give center spacing exactly Dcore
  double spacing = 2.0 * (s.Dcore_mm / std::sqrt(3.0)) * std::sin(kPi / 3.0);
  if (std::abs(spacing - s.Dcore_mm) > 0.01 * s.Dcore_mm)
    throw ValidationError(ctx + ": trefoil spacing violates touching-cores layout");
  if (s.N * s.da_mm > kPi * (s.Da_mm - s.da_mm) * 1.02)
    throw ValidationError(ctx + ": " + std::to_string(s.N) + " wires of " +
                          fmt_double(s.da_mm) + " mm exceed the armor pitch circumference");
  double bundle_r = s.Dcore_mm / std::sqrt(3.0) + s.Dcore_mm / 2.0;
  if (bundle_r >= (s.Da_mm - s.da_mm) / 2.0 - s.da_mm / 2.0)
    throw ValidationError(ctx + ": core bundle does not fit inside the armor bore");
  if (const auto* lc = std::get_if<LinearComplex>(&s.armor_mu)) {
    if (lc->mu_re <= 0 || lc->mu_im < 0)
      throw ValidationError(ctx + ": armor_mu needs mu_re > 0 and mu_im >= 0");
  } else if (const auto* bh = std::get_if<AnhystereticBH>(&s.armor_mu)) {
    if (bh->mu_initial < 1 || bh->B_sat <= 0)
      throw ValidationError(ctx + ": anhysteretic armor_mu needs mu_initial >= 1, B_sat > 0");
  }
}

std::string serialize_cable(const CableSpec& s) {
  KeyValueFile kv;
  kv.set("id", s.id);
  kv.set("Vr_kV", fmt_double(s.Vr_kV));
  kv.set("Imax_A", fmt_double(s.Imax_A));
  kv.set("Sn_mm2", fmt_double(s.Sn_mm2));
  kv.set("material", s.material == ConductorMetal::Cu ? "Cu" : "Al");
  kv.set("dc_mm", fmt_double(s.dc_mm));
  kv.set("Ds_mm", fmt_double(s.Ds_mm));
  kv.set("es_mm", fmt_double(s.es_mm));
  kv.set("Dcore_mm", fmt_double(s.Dcore_mm));
  kv.set("Da_mm", fmt_double(s.Da_mm));
  kv.set("da_mm", fmt_double(s.da_mm));
  kv.set("N", std::to_string(s.N));
  kv.set("occupancy", serialize_occupancy(s.occupancy));
  kv.set("La_m", fmt_double(s.La_m));
  kv.set("Lc_m", fmt_double(s.Lc_m));
  kv.set("twist", s.twist == TwistSense::Contralay ? "contralay" : "unilay");
  kv.set("Tamb_C", fmt_double(s.Tamb_C));
  kv.set("sigma_c_MSm", fmt_double(s.sigma_c_MSm));
  kv.set("sigma_s_MSm", fmt_double(s.sigma_s_MSm));
  kv.set("sigma_a_MSm", fmt_double(s.sigma_a_MSm));
  kv.set("armor_mu", serialize_armor_mu(s.armor_mu));
  return kv.serialize();
}

void save_cable(const CableSpec& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << serialize_cable(s);
}

// ---- measurements ---------------------------------------------------------

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::R_series: return "R_series";
    case Quantity::X_series: return "X_series";
    case Quantity::I_sheath: return "I_sheath";
    case Quantity::Z0: return "Z0";
    case Quantity::B_probe: return "B_probe";
    default: return "Va_h3";
  }
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::TextNumeric: return "TextNumeric";
    case Provenance::FigureDigitized: return "FigureDigitized";
    default: return "Absent";
  }
}

namespace {

Quantity quantity_from(const std::string& s, const std::string& ctx) {
  for (Quantity q : {Quantity::R_series, Quantity::X_series, Quantity::I_sheath, Quantity::Z0,
                     Quantity::B_probe, Quantity::Va_h3})
    if (to_string(q) == s) return q;
  throw ParseError(ctx + ": unknown quantity '" + s + "'");
}

Provenance provenance_from(const std::string& s, const std::string& ctx) {
  for (Provenance p : {Provenance::TextNumeric, Provenance::FigureDigitized, Provenance::Absent})
    if (to_string(p) == s) return p;
  throw ParseError(ctx + ": unknown provenance '" + s + "'");
}

}  // namespace

MeasuredFixture load_measurements(const std::string& path) {
  MeasuredFixture fx;
  fx.source = path;
  auto rows = read_csv(path, {"quantity", "config", "x", "x_unit", "value", "value_unit",
                              "provenance", "tol_pct"});
  for (const auto& r : rows) {
    Measurement m;
    m.quantity = quantity_from(r[0], path);
    m.config = r[1];
    m.x = parse_double(r[2], path + " x");
    m.x_unit = r[3];
    m.provenance = provenance_from(r[6], path);
    if (m.provenance == Provenance::Absent && trim(r[4]).empty())
      m.value = std::numeric_limits<double>::quiet_NaN();
    else
      m.value = parse_double(r[4], path + " value");
    m.value_unit = r[5];
    m.tol_pct = parse_double(r[7], path + " tol_pct");
    fx.rows.push_back(std::move(m));
  }
  return fx;
}

}  // namespace cablefem
