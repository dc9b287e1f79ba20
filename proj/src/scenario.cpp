#include "levimag/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "levimag/analysis.hpp"
#include "levimag/classical.hpp"
#include "levimag/constants.hpp"
#include "levimag/coupling.hpp"
#include "levimag/environment.hpp"
#include "levimag/io.hpp"
#include "levimag/magnetostatics.hpp"
#include "levimag/quantum.hpp"

#ifndef LEVIMAG_VERSION
#define LEVIMAG_VERSION "0.0.0"
#endif

namespace levimag {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Schema-checked access to a YAML mapping. Every key read is recorded so that
// finish() can reject unknown keys.

class Params {
 public:
  Params(YAML::Node node, std::shared_ptr<const std::string> file, std::string where)
      : node_(std::move(node)), file_(std::move(file)), where_(std::move(where)) {
    if (!node_.IsMap()) fail(node_, where_ + " must be a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const auto mark = at.Mark();
    std::ostringstream os;
    os << *file_ << ":" << (mark.line >= 0 ? mark.line + 1 : 1) << ":" << (mark.column >= 0 ? mark.column + 1 : 1)
       << ": " << msg;
    throw ScenarioError(os.str());
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(node_, msg); }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    fail(has(key) ? node_[key] : node_, where_ + "." + key + ": " + msg);
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node raw(const std::string& key) const {
    used_.insert(key);
    const YAML::Node n = node_[key];
    if (!n) fail(where_ + ": missing required key '" + key + "'");
    return n;
  }

  double number(const std::string& key) const { return to_number(raw(key), key); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) fail_key(key, "must be > 0");
    return v;
  }
  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }
  double non_negative(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v >= 0.0)) fail_key(key, "must be >= 0");
    return v;
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e15) fail_key(key, "must be an integer");
    return static_cast<long>(v);
  }

  std::string text(const std::string& key) const {
    const YAML::Node n = raw(key);
    if (!n.IsScalar()) fail(n, where_ + "." + key + ": expected a string");
    return n.Scalar();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }
  std::string choice(const std::string& key, const std::vector<std::string>& options, const std::string& fallback) const {
    const std::string v = fallback.empty() && !has(key) ? text(key) : text(key, fallback);
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string all;
      for (const auto& o : options) all += (all.empty() ? "" : ", ") + o;
      fail_key(key, "'" + v + "' is not one of: " + all);
    }
    return v;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const YAML::Node n = raw(key);
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, where_ + "." + key + ": expected true or false");
    }
  }

  /// A list of numbers, or a range mapping {min, max, count, spacing: linear|log}.
  std::vector<double> values(const std::string& key) const {
    const YAML::Node n = raw(key);
    std::vector<double> out;
    if (n.IsSequence()) {
      for (const auto& item : n) out.push_back(to_number(item, key));
      if (out.empty()) fail(n, where_ + "." + key + ": list must not be empty");
      return out;
    }
    if (n.IsScalar()) return {to_number(n, key)};
    const Params range(n, file_, where_ + "." + key);
    const double lo = range.number("min");
    const double hi = range.number("max");
    const long count = range.integer("count", 0);
    const auto spacing = range.choice("spacing", {"linear", "log"}, "linear");
    range.finish();
    if (count < 1) range.fail_key("count", "must be >= 1");
    if (!(hi >= lo)) range.fail("range needs max >= min");
    if (spacing == "log" && !(lo > 0.0)) range.fail("log spacing needs min > 0");
    for (long i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(spacing == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
    return out;
  }

  Params child(const std::string& key) const { return Params(raw(key), file_, where_ + "." + key); }
  std::optional<Params> maybe_child(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return child(key);
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) fail(kv.first, where_ + ": unknown key '" + key + "'");
    }
  }

  /// Runs `f`, turning std::invalid_argument into a schema error at this node.
  template <typename F>
  auto checked(F&& f) const {
    try {
      return f();
    } catch (const std::invalid_argument& e) {
      fail(where_ + ": " + e.what());
    } catch (const std::domain_error& e) {
      fail(where_ + ": " + e.what());
    }
  }

  const YAML::Node& node() const { return node_; }
  const std::shared_ptr<const std::string>& file() const { return file_; }

 private:
  double to_number(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, where_ + "." + key + ": expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, where_ + "." + key + ": expected a number, got '" + n.Scalar() + "'");
    }
  }

  YAML::Node node_;
  std::shared_ptr<const std::string> file_;
  std::string where_;
  mutable std::set<std::string> used_;
};

json yaml_to_json(const YAML::Node& n) {
  if (n.IsMap()) {
    json o = json::object();
    for (const auto& kv : n) o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
    return o;
  }
  if (n.IsSequence()) {
    json a = json::array();
    for (const auto& item : n) a.push_back(yaml_to_json(item));
    return a;
  }
  if (n.IsScalar()) {
    const std::string& s = n.Scalar();
    if (n.Tag() != "!") {  // unquoted
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return v;
      if (s == "true") return true;
      if (s == "false") return false;
    }
    return s;
  }
  return nullptr;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Run context.

struct Context {
  fs::path dir;
  ScenarioInfo info;
  std::vector<std::string> files;
  json results = json::object();

  void table(const std::string& file, io::Table t, json meta = json::object()) {
    meta["scenario"] = info.name;
    meta["seed"] = info.seed;
    t.header = std::move(meta);
    io::write_csv(dir / file, t);
    files.push_back(file);
  }
};

using Job = std::function<void(Context&)>;

struct Setup {
  std::map<std::string, Material> materials;
  fs::path base_dir;
};

// ---------------------------------------------------------------------------
// Shared parameter blocks.

Material parse_material(const Params& p, const std::string& key, const Setup& setup) {
  const YAML::Node n = p.raw(key);
  if (n.IsScalar()) {
    const auto name = n.Scalar();
    if (const auto it = setup.materials.find(name); it != setup.materials.end()) return it->second;
    try {
      return materials::preset(name);
    } catch (const std::invalid_argument& e) {
      p.fail(n, e.what());
    }
  }
  const Params m = p.child(key);
  Material mat;
  mat.name = m.text("name", "custom");
  mat.density = m.number("density");
  mat.polarization = m.number("polarization");
  mat.kind = m.choice("class", {"soft", "hard"}, "soft") == "soft" ? MaterialClass::soft : MaterialClass::hard;
  m.finish();
  m.checked([&] {
    mat.validate();
    return 0;
  });
  return mat;
}

MagnetBody parse_body(const Params& parent, const Setup& setup) {
  const Params p = parent.child("body");
  const auto shape = p.choice("shape", {"ellipsoid", "sphere"}, "ellipsoid");
  MagnetBody body{Sphere(1.0), parse_material(p, "material", setup)};
  if (shape == "ellipsoid") {
    const double a = p.number("semi_major");
    const double b = p.number("semi_minor");
    body.shape = p.checked([&] { return Shape(ProlateEllipsoid(a, b)); });
  } else {
    const double r = p.number("radius");
    body.shape = p.checked([&] { return Shape(Sphere(r)); });
  }
  p.finish();
  return body;
}

double omega_at(const MagnetBody& body, double field) {
  const double k = stiffness(body, field);
  return std::sqrt(k / inertia_phi(body.shape, body.material.density));
}

// Field giving libration frequency ω: ω ∝ B (soft) or ω ∝ √B (hard).
double field_for(const MagnetBody& body, double omega) {
  const double w1 = omega_at(body, 1.0);
  return body.material.kind == MaterialClass::soft ? omega / w1 : (omega / w1) * (omega / w1);
}

double equivalent_radius(const Shape& shape) { return std::cbrt(3.0 * volume(shape) / (4.0 * constants::pi)); }

GasConditions parse_gas(const Params& g) {
  GasConditions gas;
  gas.pressure = g.number("pressure", gas.pressure);
  gas.temperature = g.number("temperature", gas.temperature);
  gas.molar_mass = g.number("molar_mass", gas.molar_mass);
  gas.accommodation = g.number("accommodation", gas.accommodation);
  gas.molecular_diameter = g.number("molecular_diameter", gas.molecular_diameter);
  g.finish();
  g.checked([&] {
    gas.validate();
    return 0;
  });
  return gas;
}

// Damping given as quality factor, explicit rate, or gas conditions.
struct DampingSpec {
  std::optional<double> quality;
  std::optional<double> rate;
  std::optional<GasConditions> gas;

  double at(const MagnetBody& body, double omega) const {
    if (quality) return omega / *quality;
    if (rate) return *rate;
    if (gas) return gas_damping(equivalent_radius(body.shape), body.material.density, *gas).rate;
    return 0.0;
  }
};

DampingSpec parse_damping(const Params& p, bool required) {
  DampingSpec d;
  const int given = static_cast<int>(p.has("quality")) + static_cast<int>(p.has("damping_rate")) +
                    static_cast<int>(p.has("gas"));
  if (given > 1) p.fail("give only one of 'quality', 'damping_rate', 'gas'");
  if (given == 0 && required) p.fail("missing damping: give 'quality', 'damping_rate' or 'gas'");
  if (p.has("quality")) d.quality = p.positive("quality");
  if (p.has("damping_rate")) {
    d.rate = p.number("damping_rate");
    if (!(*d.rate >= 0.0)) p.fail_key("damping_rate", "must be >= 0");
  }
  if (p.has("gas")) d.gas = parse_gas(p.child("gas"));
  return d;
}

double parse_field(const Params& p, const MagnetBody& body) {
  if (p.has("field") == p.has("frequency_hz")) p.fail("give exactly one of 'field' and 'frequency_hz'");
  if (p.has("field")) return p.positive("field");
  return field_for(body, 2.0 * constants::pi * p.positive("frequency_hz"));
}

int parse_steps_per_period(const Params& p) {
  const long spp = p.integer("steps_per_period", 64);
  if (spp < 20) p.fail_key("steps_per_period", "must be >= 20 (integrator resolution guard)");
  return static_cast<int>(spp);
}

ReadoutModel parse_readout(const Params& parent) {
  ReadoutModel m;
  const auto rp = parent.maybe_child("readout");
  if (!rp) return m;
  const Params& r = *rp;
  m.kind = r.choice("kind", {"optical", "spin_pl"}, "optical") == "optical" ? DetectorKind::direct_optical
                                                                          : DetectorKind::spin_pl;
  m.gain = r.number("gain", m.gain);
  m.nonlinearity = r.number("nonlinearity", m.nonlinearity);
  m.noise_std = r.number("noise_std", m.noise_std);
  m.esr_sensitivity = r.number("esr_sensitivity", m.esr_sensitivity);
  m.esr_linewidth = r.number("esr_linewidth", m.esr_linewidth);
  m.contrast = r.number("contrast", m.contrast);
  m.baseline = r.number("baseline", m.baseline);
  m.illumination_gain = r.number("illumination_gain", m.illumination_gain);
  if (r.has("response_time") && r.has("spin_rates")) r.fail("give only one of 'response_time' and 'spin_rates'");
  m.response_time = r.number("response_time", m.response_time);
  if (const auto sr = r.maybe_child("spin_rates")) {
    const double exc = sr->number("tau_excitation");
    const double pol = sr->number("tau_polarization");
    const double duty = sr->number("duty", 0.5);
    sr->finish();
    m.response_time = sr->checked([&] { return spin_response_time(exc, pol, duty); });
  }
  r.finish();
  r.checked([&] {
    m.validate();
    return 0;
  });
  return m;
}

DecoherenceParams parse_decoherence(const Params& parent, double omega) {
  DecoherenceParams d;
  const auto dp = parent.maybe_child("decoherence");
  if (!dp) return d;
  const Params& p = *dp;
  if (p.flag("none", false)) d = DecoherenceParams::none();
  d.t1 = p.number("t1", d.t1);
  d.t2_star = p.number("t2_star", d.t2_star);
  d.gas_damping = p.number("gas_damping", d.gas_damping);
  if (p.has("thermal_occupation") && p.has("bath_temperature"))
    p.fail("give only one of 'thermal_occupation' and 'bath_temperature'");
  d.thermal_occupation = p.number("thermal_occupation", d.thermal_occupation);
  if (p.has("bath_temperature")) {
    const double t = p.number("bath_temperature");
    d.thermal_occupation = p.checked([&] { return thermal_occupation(omega, t); });
  }
  d.init_fidelity = p.number("init_fidelity", d.init_fidelity);
  p.finish();
  p.checked([&] {
    d.validate();
    return 0;
  });
  return d;
}

json fit_json(const FitReport& f) {
  return {{"frequency_hz", f.omega / (2.0 * constants::pi)},
          {"frequency_hz_stderr", f.omega_stderr / (2.0 * constants::pi)},
          {"damping_rate", f.damping},
          {"damping_rate_stderr", f.damping_stderr},
          {"quality", f.quality_unbounded ? json("inf") : json(f.quality)},
          {"quality_unbounded", f.quality_unbounded},
          {"amplitude", f.amplitude},
          {"phase", f.phase},
          {"offset", f.offset},
          {"residual_norm", f.residual_norm},
          {"iterations", f.iterations}};
}

json lorentzian_json(const LorentzianFit& f) {
  json j = {{"center_hz", f.omega0 / (2.0 * constants::pi)},
            {"center_hz_stderr", f.omega0_stderr / (2.0 * constants::pi)},
            {"fwhm_hz", f.width / (2.0 * constants::pi)},
            {"fwhm_hz_stderr", f.width_stderr / (2.0 * constants::pi)},
            {"quality", f.quality},
            {"height", f.height},
            {"offset", f.offset},
            {"area", f.area}};
  j["secondary_peak_hz"] = f.secondary_peak ? json(*f.secondary_peak / (2.0 * constants::pi)) : json(nullptr);
  return j;
}

const char* flag_name(LagFlag f) {
  switch (f) {
    case LagFlag::boundary:
      return "boundary";
    case LagFlag::unstructured:
      return "unstructured";
    case LagFlag::none:
      break;
  }
  return "none";
}

// Wraps a library call so failures name the operation.
template <typename F>
auto op(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(name + ": " + e.what());
  }
}

// Ring-down from rest at angle `amplitude`, fitted; used by several modes.
FitReport ringdown_fit(const MagnetBody& body, double field, double damping, double amplitude, double periods,
                       int spp, std::uint64_t seed) {
  const double omega = omega_at(body, field);
  SimulationConfig cfg;
  cfg.field = field;
  cfg.damping = damping;
  cfg.dt = 2.0 * constants::pi / (omega * spp);
  cfg.duration = periods * 2.0 * constants::pi / omega;
  cfg.initial_angle = amplitude;
  cfg.record_rate = false;
  cfg.seed = seed;
  const auto traj = op("classical_sim.simulate", [&] { return simulate(body, cfg); });
  return op("analysis.fit_ringdown", [&] { return fit_ringdown(traj.angle, traj.dt); });
}

// ---------------------------------------------------------------------------
// design

Job parse_design(const std::string& mode, const Params& p, const Setup& setup) {
  if (mode == "aspect_sweep") {
    const Material mat = parse_material(p, "material", setup);
    if (mat.kind != MaterialClass::soft) p.fail_key("material", "aspect sweep needs a soft material");
    const auto minors = p.values("semi_minor");
    const double field = p.positive("field");
    const auto ratios = p.values("aspect_ratio");
    p.finish();
    for (double b : minors)
      if (!(b > 0.0)) p.fail_key("semi_minor", "must be > 0");
    for (double r : ratios)
      if (!(r > 1.0)) p.fail_key("aspect_ratio", "values must be > 1 (prolate)");
    return [=](Context& ctx) {
      io::Table t;
      std::vector<double> bcol, rcol, fcol, bmax, valid;
      json optima = json::array();
      for (double b : minors) {
        for (double r : ratios) {
          const ProlateEllipsoid e(r * b, b);
          const auto sf = op("magnetostatics.libration_frequency_soft",
                             [&] { return libration_frequency_soft(e, mat, field); });
          bcol.push_back(b);
          rcol.push_back(r);
          fcol.push_back(sf.omega / (2.0 * constants::pi));
          bmax.push_back(max_field_soft(e, mat));
          valid.push_back(sf.within_validity ? 1.0 : 0.0);
        }
        const auto opt = op("magnetostatics.optimal_aspect_ratio", [&] { return optimal_aspect_ratio(b, mat, field); });
        optima.push_back({{"semi_minor", b},
                          {"aspect_ratio", opt.aspect_ratio},
                          {"frequency_hz", opt.omega / (2.0 * constants::pi)}});
      }
      t.add_column("semi_minor_m", bcol);
      t.add_column("aspect_ratio", rcol);
      t.add_column("frequency_hz", fcol);
      t.add_column("max_field_t", bmax);
      t.add_column("within_validity", valid);
      ctx.table("aspect_sweep.csv", t, {{"field_t", field}, {"material", mat.name}});
      ctx.results["optimum"] = optima;
    };
  }
  // confinement
  const MagnetBody body = parse_body(p, setup);
  const auto fields = p.values("field");
  p.finish();
  for (double b : fields)
    if (!(b > 0.0)) p.fail_key("field", "must be > 0");
  return [=](Context& ctx) {
    std::vector<double> fcol, wcol, kcol, bmax, valid;
    for (double b : fields) {
      const auto rep = op("magnetostatics.confinement", [&] { return confinement(body, b); });
      fcol.push_back(b);
      wcol.push_back(rep.omega / (2.0 * constants::pi));
      kcol.push_back(rep.stiffness);
      bmax.push_back(rep.max_field.value_or(std::numeric_limits<double>::infinity()));
      valid.push_back(rep.within_validity ? 1.0 : 0.0);
    }
    io::Table t;
    t.add_column("field_t", fcol);
    t.add_column("frequency_hz", wcol);
    t.add_column("stiffness_nm_per_rad", kcol);
    t.add_column("max_field_t", bmax);
    t.add_column("within_validity", valid);
    ctx.table("confinement.csv", t, {{"material", body.material.name}});
    ctx.results["inertia_kg_m2"] = inertia_phi(body.shape, body.material.density);
    ctx.results["volume_m3"] = volume(body.shape);
  };
}

// ---------------------------------------------------------------------------
// map

Job parse_map(const Params& p, const Setup& setup) {
  CouplingMapRequest req;
  req.radii = p.values("radius");
  req.gaps = p.values("gap");
  req.material = parse_material(p, "material", setup);
  req.bias_field = p.number("bias_field", req.bias_field);
  if (p.has("frequency_hz")) req.omega = 2.0 * constants::pi * p.positive("frequency_hz");
  req.t2_star = p.positive("t2_star", req.t2_star);
  req.threads = static_cast<unsigned>(std::max(0L, p.integer("threads", 0)));
  std::optional<std::pair<double, double>> probe;
  if (const auto pp = p.maybe_child("probe")) {
    probe = {pp->positive("radius"), pp->positive("gap")};
    pp->finish();
  }
  p.finish();
  for (double r : req.radii)
    if (!(r > 0.0)) p.fail_key("radius", "values must be > 0");
  for (double g : req.gaps)
    if (!(g >= 0.0)) p.fail_key("gap", "values must be >= 0");
  if (!req.omega && req.material.kind != MaterialClass::hard)
    p.fail("without 'frequency_hz' the libration frequency comes from the hard-magnet law; use a hard material");
  return [=](Context& ctx) {
    const auto map = op("coupling.coupling_map", [&] { return coupling_map(req); });
    std::vector<double> rc, gc, lc, ac;
    for (std::size_t i = 0; i < map.radii.size(); ++i)
      for (std::size_t j = 0; j < map.gaps.size(); ++j) {
        rc.push_back(map.radii[i]);
        gc.push_back(map.gaps[j]);
        lc.push_back(map.at(i, j));
        ac.push_back(map.aligned[i * map.gaps.size() + j] ? 1.0 : 0.0);
      }
    io::Table t;
    t.add_column("radius_m", rc);
    t.add_column("gap_m", gc);
    t.add_column("lambda_hz", lc);
    t.add_column("aligned", ac);
    json meta = {{"material", req.material.name},
                 {"bias_field_t", req.bias_field},
                 {"threshold_hz", map.threshold_hz},
                 {"layout", "radius-major"}};
    if (req.omega) meta["frequency_hz"] = *req.omega / (2.0 * constants::pi);
    ctx.table("coupling_map.csv", t, meta);

    io::Table c;
    std::vector<double> cr, cg;
    for (const auto& pt : map.contour) {
      cr.push_back(pt.radius);
      cg.push_back(pt.gap);
    }
    c.add_column("radius_m", cr);
    c.add_column("gap_m", cg);
    ctx.table("contour.csv", c, {{"threshold_hz", map.threshold_hz}});

    std::size_t above = 0;
    for (double v : map.rate_hz) above += v > map.threshold_hz ? 1 : 0;
    ctx.results["threshold_hz"] = map.threshold_hz;
    ctx.results["points_above_threshold"] = above;
    ctx.results["grid_points"] = map.rate_hz.size();
    ctx.results["contour_points"] = map.contour.size();
    if (probe) {
      const Sphere s(probe->first);
      CouplingGeometry g{s, req.material, probe->second, 0.0, req.bias_field};
      const double inertia = inertia_phi(s, req.material.density);
      const double omega =
          req.omega ? *req.omega : libration_frequency_hard(s, req.material, req.bias_field);
      const double dphi = d_phi(g);
      const double phi0 = zero_point_angle(inertia, omega);
      const double lam = constants::gamma_nv * dphi * phi0;
      ctx.results["probe"] = {{"radius_m", probe->first},
                              {"gap_m", probe->second},
                              {"d_phi_t", dphi},
                              {"zero_point_rad", phi0},
                              {"lambda_hz", lam / (2.0 * constants::pi)}};
    }
  };
}

// ---------------------------------------------------------------------------
// simulate-classical

Job parse_classical(const std::string& mode, const Params& p, const Setup& setup) {
  const MagnetBody body = parse_body(p, setup);
  const int spp = parse_steps_per_period(p);

  if (mode == "ringdown") {
    const double field = parse_field(p, body);
    const DampingSpec damping = parse_damping(p, true);
    const double temperature = p.non_negative("bath_temperature", 0.0);
    const double periods = p.positive("periods", 60.0);
    const double initial_angle = p.number("initial_angle", 0.0);
    std::optional<ExcitationSequence> exc;
    const double omega = omega_at(body, field);
    if (const auto ep = p.maybe_child("excitation")) {
      ExcitationSequence e;
      e.n_pulses = static_cast<int>(ep->integer("n_pulses", e.n_pulses));
      e.pulse_frequency = 2.0 * constants::pi * ep->positive("pulse_frequency_hz", omega / (2.0 * constants::pi));
      e.transverse_field = ep->number("transverse_field");
      e.switch_time = ep->number("switch_time", e.switch_time);
      ep->finish();
      ep->checked([&] {
        e.validate();
        return 0;
      });
      if (std::abs(e.transverse_field) > field) ep->fail_key("transverse_field", "must not exceed the static field");
      exc = e;
    }
    if (!exc && initial_angle == 0.0 && temperature == 0.0)
      p.fail("nothing excites the libration: give 'excitation', 'initial_angle' or 'bath_temperature'");
    const ReadoutModel readout = parse_readout(p);
    const long stride = p.integer("output_stride", 1);
    p.finish();
    if (stride < 1) p.fail_key("output_stride", "must be >= 1");
    return [=](Context& ctx) {
      SimulationConfig cfg;
      cfg.field = field;
      cfg.damping = damping.at(body, omega);
      cfg.bath_temperature = temperature;
      cfg.excitation = exc;
      const double period = 2.0 * constants::pi / omega;
      const double start = exc ? exc->end_time() : 0.0;
      cfg.duration = start + periods * period;
      cfg.dt = period / spp;
      cfg.initial_angle = initial_angle;
      cfg.seed = ctx.info.seed;
      const auto traj = op("classical_sim.simulate", [&] { return simulate(body, cfg); });
      const auto signal = op("classical_sim.detect", [&] { return detect(traj, readout); });

      const auto first = static_cast<std::size_t>(std::ceil(start / cfg.dt));
      const std::span<const double> tail(signal.data() + first, signal.size() - first);
      const auto fit = op("analysis.fit_ringdown", [&] { return fit_ringdown(tail, traj.dt); });

      std::vector<double> tc, ac, sc;
      for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
        tc.push_back(traj.time(i));
        ac.push_back(traj.angle[i]);
        sc.push_back(signal[i]);
      }
      io::Table t;
      t.add_column("time_s", tc);
      t.add_column("angle_rad", ac);
      t.add_column("signal", sc);
      ctx.table("trajectory.csv", t, {{"field_t", field}, {"fit_start_s", start}});
      ctx.results["model"] = {{"frequency_hz", omega / (2.0 * constants::pi)},
                              {"damping_rate", cfg.damping},
                              {"quality", cfg.damping > 0.0 ? json(omega / cfg.damping) : json("inf")},
                              {"field_t", field}};
      ctx.results["fit"] = fit_json(fit);
    };
  }

  if (mode == "freq_vs_field" || mode == "q_vs_freq") {
    const auto fields = p.values("field");
    const DampingSpec damping = parse_damping(p, mode == "q_vs_freq");
    const double amplitude = p.number("initial_angle", 0.005);
    const double periods = p.positive("periods", 40.0);
    p.finish();
    for (double b : fields)
      if (!(b > 0.0)) p.fail_key("field", "values must be > 0");
    if (amplitude == 0.0) p.fail_key("initial_angle", "must be nonzero");
    const bool soft = body.material.kind == MaterialClass::soft;
    return [=](Context& ctx) {
      std::vector<double> fc, model_f, fit_f, fit_q, model_q, reg;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const double omega = omega_at(body, fields[i]);
        const double gamma = damping.at(body, omega);
        // Enough periods to see the decay when it is slow relative to the record.
        const double n_periods =
            mode == "q_vs_freq" && gamma > 0.0 ? std::max(periods, 2.0 * omega / gamma / (2.0 * constants::pi)) : periods;
        const auto fit = ringdown_fit(body, fields[i], gamma, amplitude, n_periods, spp, ctx.info.seed + i);
        fc.push_back(fields[i]);
        model_f.push_back(omega / (2.0 * constants::pi));
        fit_f.push_back(fit.omega / (2.0 * constants::pi));
        fit_q.push_back(fit.quality);
        model_q.push_back(gamma > 0.0 ? omega / gamma : std::numeric_limits<double>::infinity());
        reg.push_back(soft ? fields[i] : std::sqrt(fields[i]));
      }
      io::Table t;
      t.add_column("field_t", fc);
      t.add_column("frequency_hz_model", model_f);
      t.add_column("frequency_hz_fit", fit_f);
      t.add_column("quality_fit", fit_q);
      t.add_column("quality_model", model_q);
      ctx.table(mode == "q_vs_freq" ? "q_vs_freq.csv" : "freq_vs_field.csv", t, {{"material", body.material.name}});

      if (fields.size() >= 3) {
        const auto lf = op("analysis.linear_fit", [&] { return linear_fit(reg, fit_f); });
        const double model_slope = omega_at(body, 1.0) / (2.0 * constants::pi);
        ctx.results["frequency_regression"] = {{"regressor", soft ? "field_t" : "sqrt_field_t"},
                                               {"slope", lf.slope},
                                               {"slope_stderr", lf.slope_stderr},
                                               {"intercept", lf.intercept},
                                               {"r_squared", lf.r_squared},
                                               {"model_slope", model_slope},
                                               {"relative_error", lf.slope / model_slope - 1.0}};
        if (mode == "q_vs_freq") {
          const auto qf = op("analysis.linear_fit", [&] { return linear_fit(fit_f, fit_q); });
          ctx.results["quality_regression"] = {{"regressor", "frequency_hz"},
                                               {"slope", qf.slope},
                                               {"intercept", qf.intercept},
                                               {"r_squared", qf.r_squared}};
        }
      }
    };
  }

  if (mode == "brownian") {
    const double field = parse_field(p, body);
    const DampingSpec damping = parse_damping(p, true);
    const double temperature = p.positive("bath_temperature", 293.0);
    const double duration = p.positive("duration");
    const long segments = p.integer("segments", 8);
    const long stride = p.integer("output_stride", 10);
    const double band = p.positive("band_fraction", 0.01);
    p.finish();
    if (segments < 1) p.fail_key("segments", "must be >= 1");
    if (stride < 1) p.fail_key("output_stride", "must be >= 1");
    if (2 * stride >= spp) p.fail_key("output_stride", "sampling below the Nyquist rate of the libration");
    return [=](Context& ctx) {
      const double omega = omega_at(body, field);
      SimulationConfig cfg;
      cfg.field = field;
      cfg.damping = damping.at(body, omega);
      cfg.bath_temperature = temperature;
      cfg.duration = duration;
      cfg.dt = 2.0 * constants::pi / (omega * spp);
      cfg.output_stride = static_cast<int>(stride);
      cfg.record_rate = false;
      cfg.seed = ctx.info.seed;
      const auto traj = op("classical_sim.simulate", [&] { return simulate(body, cfg); });
      const auto spec = op("analysis.psd", [&] { return psd(traj.angle, traj.dt, static_cast<int>(segments)); });
      const auto lf = op("analysis.fit_lorentzian", [&] { return fit_lorentzian(spec); });

      const double f0 = omega / (2.0 * constants::pi);
      std::vector<double> fc, dc;
      for (std::size_t i = 0; i < spec.frequency.size(); ++i)
        if (std::abs(spec.frequency[i] - f0) <= band * f0) {
          fc.push_back(spec.frequency[i]);
          dc.push_back(spec.density[i]);
        }
      io::Table t;
      t.add_column("frequency_hz", fc);
      t.add_column("psd_rad2_per_hz", dc);
      ctx.table("psd.csv", t, {{"segments", segments}, {"resolution_hz", spec.resolution}});

      double mean = 0.0, var = 0.0;
      for (double a : traj.angle) mean += a;
      mean /= static_cast<double>(traj.size());
      for (double a : traj.angle) var += (a - mean) * (a - mean);
      var /= static_cast<double>(traj.size());
      const double inertia = inertia_phi(body.shape, body.material.density);
      ctx.results["model"] = {{"frequency_hz", f0},
                              {"damping_rate", cfg.damping},
                              {"quality", omega / cfg.damping},
                              {"angle_variance", constants::k_boltzmann * temperature / (inertia * omega * omega)}};
      ctx.results["lorentzian"] = lorentzian_json(lf);
      ctx.results["angle_variance"] = var;
      ctx.results["psd_integral"] = spec.integrated_power();
    };
  }

  // readout_lag
  const double field = parse_field(p, body);
  const double amplitude = p.number("initial_angle", 0.01);
  const double periods = p.positive("periods", 20.0);
  const double max_lag = p.positive("max_lag", 100e-6);
  ReadoutModel readout = parse_readout(p);
  p.finish();
  if (readout.kind != DetectorKind::spin_pl) p.fail_key("readout", "readout lag needs kind: spin_pl");
  return [=](Context& ctx) {
    const double omega = omega_at(body, field);
    SimulationConfig cfg;
    cfg.field = field;
    cfg.dt = 2.0 * constants::pi / (omega * spp);
    cfg.duration = periods * 2.0 * constants::pi / omega;
    cfg.initial_angle = amplitude;
    cfg.record_rate = false;
    cfg.seed = ctx.info.seed;
    const auto traj = op("classical_sim.simulate", [&] { return simulate(body, cfg); });
    ReadoutModel plus = readout, minus = readout;
    plus.detuning_sign = +1;
    minus.detuning_sign = -1;
    auto traj_minus = traj;
    traj_minus.seed = traj.seed + 1;  // independent detector noise
    const auto s_plus = op("classical_sim.detect", [&] { return detect(traj, plus); });
    const auto s_minus = op("classical_sim.detect", [&] { return detect(traj_minus, minus); });
    std::vector<double> diff(s_plus.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s_minus[i] - s_plus[i];
    const auto lag = op("analysis.lag_estimate", [&] { return lag_estimate(traj.angle, diff, traj.dt, max_lag); });

    // Spin parts: signal minus the spin-independent illumination term.
    std::vector<double> sp(diff.size()), sm(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      const double common = readout.baseline * (1.0 + readout.illumination_gain * traj.angle[i]);
      sp[i] = s_plus[i] - common;
      sm[i] = s_minus[i] - common;
    }
    const auto corr = [](const std::vector<double>& a, const std::vector<double>& b) {
      const double n = static_cast<double>(a.size());
      double ma = 0, mb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
      }
      ma /= n;
      mb /= n;
      double sab = 0, saa = 0, sbb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
      }
      return sab / std::sqrt(saa * sbb);
    };

    std::vector<double> tc(traj.size());
    for (std::size_t i = 0; i < tc.size(); ++i) tc[i] = traj.time(i);
    io::Table t;
    t.add_column("time_s", tc);
    t.add_column("angle_rad", traj.angle);
    t.add_column("pl_plus", s_plus);
    t.add_column("pl_minus", s_minus);
    t.add_column("difference", diff);
    ctx.table("readout.csv", t, {{"response_time_s", readout.response_time}});

    io::Table scan;
    scan.add_column("lag_s", lag.scan_lags);
    scan.add_column("msd", lag.scan_msd);
    ctx.table("lag_scan.csv", scan);

    ctx.results["lag_s"] = lag.lag;
    ctx.results["flagged"] = lag.flagged;
    ctx.results["flag_reason"] = flag_name(lag.reason);
    ctx.results["response_time_s"] = readout.response_time;
    ctx.results["expected_lag_s"] = std::atan(omega * readout.response_time) / omega;
    ctx.results["spin_component_correlation"] = corr(sp, sm);
  };
}

// ---------------------------------------------------------------------------
// analyze

Job parse_analyze(const std::string& mode, const Params& p, const Setup& setup) {
  const fs::path input = setup.base_dir / p.text("input");
  const std::string time_col = p.text("time_column", "time_s");
  if (!fs::exists(input)) p.fail_key("input", "file not found: " + input.string());

  if (mode == "ringdown" || mode == "psd") {
    const std::string column = p.text("column");
    const double start = p.number("start_time", 0.0);
    const long segments = p.integer("segments", 8);
    p.finish();
    return [=](Context& ctx) {
      const auto table = op("io.read_csv", [&] { return io::read_csv(input); });
      const auto& t = op("io.column", [&] { return std::cref(table.column(time_col)); }).get();
      const auto& x = op("io.column", [&] { return std::cref(table.column(column)); }).get();
      if (t.size() < 2) throw NumericalError("analyze: fewer than two samples");
      const double dt = t[1] - t[0];
      std::size_t first = 0;
      while (first < t.size() && t[first] < start) ++first;
      const std::span<const double> tail(x.data() + first, x.size() - first);
      if (mode == "ringdown") {
        ctx.results["fit"] = fit_json(op("analysis.fit_ringdown", [&] { return fit_ringdown(tail, dt); }));
      } else {
        const auto spec = op("analysis.psd", [&] { return psd(tail, dt, static_cast<int>(segments)); });
        io::Table out;
        out.add_column("frequency_hz", spec.frequency);
        out.add_column("psd", spec.density);
        ctx.table("psd.csv", out, {{"input", input.filename().string()}, {"column", column}});
        ctx.results["psd_integral"] = spec.integrated_power();
        ctx.results["lorentzian"] = lorentzian_json(op("analysis.fit_lorentzian", [&] { return fit_lorentzian(spec); }));
      }
    };
  }
  // lag
  const std::string col_a = p.text("column_a");
  const std::string col_b = p.text("column_b");
  const double max_lag = p.positive("max_lag");
  p.finish();
  return [=](Context& ctx) {
    const auto table = op("io.read_csv", [&] { return io::read_csv(input); });
    const auto& t = op("io.column", [&] { return std::cref(table.column(time_col)); }).get();
    const auto& a = op("io.column", [&] { return std::cref(table.column(col_a)); }).get();
    const auto& b = op("io.column", [&] { return std::cref(table.column(col_b)); }).get();
    if (t.size() < 2) throw NumericalError("analyze: fewer than two samples");
    const auto lag = op("analysis.lag_estimate", [&] { return lag_estimate(a, b, t[1] - t[0], max_lag); });
    ctx.results["lag_s"] = lag.lag;
    ctx.results["flagged"] = lag.flagged;
    ctx.results["flag_reason"] = flag_name(lag.reason);
  };
}

// ---------------------------------------------------------------------------
// simulate-quantum

Job parse_quantum(const std::string& mode, const Params& p) {
  const double omega = 2.0 * constants::pi * p.positive("frequency_hz");
  const long cutoff = p.integer("cutoff", 20);
  if (cutoff < 1) p.fail_key("cutoff", "must be >= 1");
  const DecoherenceParams dec = parse_decoherence(p, omega);
  const int n = static_cast<int>(cutoff);

  if (mode == "fock_prep") {
    const auto lambdas = p.values("lambda_hz");
    const bool rwa = p.flag("rwa", true);
    p.finish();
    for (double l : lambdas)
      if (!(l >= 0.0)) p.fail_key("lambda_hz", "values must be >= 0");
    return [=](Context& ctx) {
      std::vector<double> lc, fid, spin;
      for (double l : lambdas) {
        const auto r = op("quantum_sim.fock_prep", [&] { return fock_prep(omega, 2.0 * constants::pi * l, dec, n, rwa); });
        lc.push_back(l);
        fid.push_back(r.phonon_fidelity);
        spin.push_back(r.spin_excited);
      }
      io::Table t;
      t.add_column("lambda_hz", lc);
      t.add_column("phonon_fidelity", fid);
      t.add_column("spin_excited", spin);
      ctx.table("fock_prep.csv", t, {{"frequency_hz", omega / (2.0 * constants::pi)}, {"cutoff", n}, {"rwa", rwa}});
      ctx.results["best_fidelity"] = *std::max_element(fid.begin(), fid.end());
    };
  }

  const double lambda = 2.0 * constants::pi * p.positive("lambda_hz");

  if (mode == "cooling") {
    const double mean_start = p.non_negative("mean_start", 5.0);
    const long cycles = p.integer("cycles", 100);
    const auto schedule = p.choice("schedule", {"sweep", "fixed"}, "sweep");
    p.finish();
    if (cycles < 0) p.fail_key("cycles", "must be >= 0");
    if (!(mean_start < n / 3.0)) p.fail_key("mean_start", "cutoff headroom violated (need mean_start < cutoff/3)");
    return [=](Context& ctx) {
      const auto r = op("quantum_sim.sideband_cool", [&] {
        return sideband_cool(omega, lambda, dec, mean_start, static_cast<int>(cycles), n,
                             schedule == "sweep" ? CoolingSchedule::sweep : CoolingSchedule::fixed);
      });
      std::vector<double> cyc(r.mean_phonons.size());
      for (std::size_t i = 0; i < cyc.size(); ++i) cyc[i] = static_cast<double>(i);
      io::Table t;
      t.add_column("cycle", cyc);
      t.add_column("mean_phonons", r.mean_phonons);
      ctx.table("cooling.csv", t, {{"schedule", schedule}, {"cutoff", n}});
      // Steady state: mean over the last full sweep.
      const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(n), r.mean_phonons.size());
      double tail = 0.0;
      for (std::size_t i = r.mean_phonons.size() - window; i < r.mean_phonons.size(); ++i) tail += r.mean_phonons[i];
      ctx.results["final_mean_phonons"] = r.mean_phonons.back();
      ctx.results["last_sweep_mean_phonons"] = tail / static_cast<double>(window);
      ctx.results["initialization_limit"] = 1.0 - dec.init_fidelity;
    };
  }

  // flip: |+,0⟩ exchange dynamics
  const bool rwa = p.flag("rwa", true);
  const double duration = p.positive("duration", flip_time(lambda));
  const long samples = p.integer("samples", 50);
  p.finish();
  if (samples < 1) p.fail_key("samples", "must be >= 1");
  return [=](Context& ctx) {
    const auto h = build_hamiltonian(omega, lambda, n, rwa);
    auto state = HybridState::dressed(n, +1, 0);
    std::vector<double> tc{0.0}, p_plus0{1.0}, p_minus1{0.0}, exc{excitation_number(state)};
    const double step = duration / static_cast<double>(samples);
    for (long i = 1; i <= samples; ++i) {
      state = op("quantum_sim.evolve", [&] { return evolve(state, h, dec, step); });
      tc.push_back(step * static_cast<double>(i));
      p_plus0.push_back(dressed_population(state, +1, 0));
      p_minus1.push_back(dressed_population(state, -1, 1));
      exc.push_back(excitation_number(state));
    }
    io::Table t;
    t.add_column("time_s", tc);
    t.add_column("population_plus_0", p_plus0);
    t.add_column("population_minus_1", p_minus1);
    t.add_column("excitation_number", exc);
    ctx.table("flip.csv", t, {{"rwa", rwa}, {"cutoff", n}});
    ctx.results["flip_time_s"] = flip_time(lambda);
    ctx.results["final_population_minus_1"] = p_minus1.back();
    if (h.warning) ctx.results["warning"] = *h.warning;
  };
}

// ---------------------------------------------------------------------------

struct Parsed {
  ScenarioInfo info;
  json inputs;
  std::string source_hash;
  Job job;
};

const std::map<std::string, std::vector<std::string>>& modes_by_kind() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"design", {"aspect_sweep", "confinement"}},
      {"map", {"coupling"}},
      {"simulate-classical", {"ringdown", "freq_vs_field", "brownian", "q_vs_freq", "readout_lag"}},
      {"analyze", {"ringdown", "psd", "lag"}},
      {"simulate-quantum", {"flip", "fock_prep", "cooling"}},
  };
  return m;
}

Parsed parse(const fs::path& file) {
  auto name = std::make_shared<const std::string>(file.string());
  if (!fs::exists(file)) throw ScenarioError(*name + ":1:1: file not found");
  const std::string text = slurp(file);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScenarioError(*name + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                        ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ScenarioError(*name + ":1:1: empty scenario (expected a mapping)");
  const Params top(root, name, "scenario");

  const auto schema = top.text("schema");
  if (schema != kScenarioSchema) top.fail(top.raw("schema"), "unsupported schema '" + schema + "', expected '" +
                                                                  std::string(kScenarioSchema) + "'");
  Parsed out;
  out.info.name = top.text("name");
  if (out.info.name.empty() ||
      !std::all_of(out.info.name.begin(), out.info.name.end(),
                   [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }))
    top.fail(top.raw("name"), "name must be non-empty and use only letters, digits, '_' and '-'");
  out.info.figure = top.text("figure", "");
  top.text("description", "");
  std::vector<std::string> kinds;
  for (const auto& kv : modes_by_kind()) kinds.push_back(kv.first);
  out.info.kind = top.choice("kind", kinds, "");
  out.info.mode = top.choice("mode", modes_by_kind().at(out.info.kind), "");
  const long seed = top.integer("seed", 0);
  if (seed < 0) top.fail_key("seed", "must be >= 0");
  out.info.seed = static_cast<std::uint64_t>(seed);

  Setup setup;
  setup.base_dir = file.parent_path();
  if (top.has("materials_file")) {
    const fs::path mf = setup.base_dir / top.text("materials_file");
    try {
      for (auto& m : materials::load(mf)) setup.materials[m.name] = m;
    } catch (const std::invalid_argument& e) {
      top.fail(top.raw("materials_file"), e.what());
    }
  }

  const Params params = top.child("parameters");
  top.finish();
  const auto& kind = out.info.kind;
  const auto& mode = out.info.mode;
  if (kind == "design") out.job = parse_design(mode, params, setup);
  else if (kind == "map") out.job = parse_map(params, setup);
  else if (kind == "simulate-classical") out.job = parse_classical(mode, params, setup);
  else if (kind == "analyze") out.job = parse_analyze(mode, params, setup);
  else out.job = parse_quantum(mode, params);

  out.inputs = yaml_to_json(root);
  out.source_hash = hex(fnv1a(text));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ScenarioInfo validate_scenario(const fs::path& file) { return parse(file).info; }

RunResult run_scenario(const fs::path& file, const RunOptions& options) {
  Parsed parsed = parse(file);
  if (options.seed) parsed.info.seed = *options.seed;

  Context ctx;
  ctx.info = parsed.info;
  ctx.dir = (options.output_root.empty() ? default_output_root() : options.output_root) / parsed.info.name;
  fs::create_directories(ctx.dir);

  const auto t0 = std::chrono::steady_clock::now();
  parsed.job(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  io::write_json(ctx.dir / "results.json", ctx.results);
  ctx.files.push_back("results.json");

  json outputs = json::array();
  for (const auto& f : ctx.files) {
    const std::string bytes = slurp(ctx.dir / f);
    outputs.push_back({{"file", f}, {"bytes", bytes.size()}, {"fnv1a64", hex(fnv1a(bytes))}});
  }
  const json manifest = {{"schema", kScenarioSchema},
                         {"scenario",
                          {{"name", parsed.info.name},
                           {"figure", parsed.info.figure},
                           {"kind", parsed.info.kind},
                           {"mode", parsed.info.mode},
                           {"source", file.filename().string()},
                           {"source_fnv1a64", parsed.source_hash}}},
                         {"seed", parsed.info.seed},
                         {"inputs", parsed.inputs},
                         {"software", {{"name", "levimag"}, {"version", LEVIMAG_VERSION}}},
                         {"outputs", outputs}};
  io::write_json(ctx.dir / "manifest.json", manifest);
  io::write_json(ctx.dir / "timing.json", {{"wall_seconds", wall}});

  RunResult r;
  r.info = parsed.info;
  r.output_dir = ctx.dir;
  r.files = ctx.files;
  r.files.push_back("manifest.json");
  r.files.push_back("timing.json");
  r.results = ctx.results;
  r.wall_seconds = wall;
  return r;
}

const std::vector<CatalogEntry>& scenario_catalog() {
  static const std::vector<CatalogEntry> c = {
      {"fig3_aspect_ratio", "Fig. 3", "soft-magnet libration frequency vs aspect ratio, optimum near 2.6"},
      {"fig4b_coupling_map", "Fig. 4b", "spin-libration coupling over magnet radius and NV gap, 2 kHz contour"},
      {"fig6a_ringdown", "Fig. 6a", "pulsed excitation and ring-down fit at 20.7 kHz"},
      {"fig6b_freq_vs_field", "Fig. 6b", "libration frequency vs confining field, linear regression"},
      {"fig6c_brownian_psd", "Fig. 6c", "thermally driven libration PSD with Lorentzian fit, Q = 9.3e3"},
      {"fig6d_q_vs_freq", "Fig. 6d", "ring-down quality factor vs frequency under gas damping"},
      {"fig7_fock_prep", "Fig. 7", "one-phonon Fock state preparation vs coupling strength"},
      {"cooling_limit", "Fig. 7 (cooling variant)", "pulsed sideband cooling floor set by spin initialization"},
      {"fig9_readout_lag", "Fig. 9", "spin photoluminescence read-out lag against the libration angle"},
  };
  return c;
}

fs::path bundled_scenario_dir() {
  if (const char* env = std::getenv("LEVIMAG_SCENARIO_DIR"); env && *env) return env;
  return fs::path(LEVIMAG_SOURCE_DIR) / "scenarios";
}

fs::path resolve_scenario(const std::string& name_or_path) {
  const fs::path p(name_or_path);
  if (fs::exists(p)) return p;
  for (const auto& e : scenario_catalog())
    if (e.name == name_or_path) return bundled_scenario_dir() / (e.name + ".cfg");
  return p;
}

fs::path default_output_root() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "levimag-output";
}

}  // namespace levimag
