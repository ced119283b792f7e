#include "polelift/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "polelift/error.hpp"

namespace polelift {

namespace {

constexpr int kFormatVersion = 1;

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// A YAML map together with its dotted path; every read is recorded so that
// leftover keys can be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(path_, line_of(node_), "expected a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    YAML::Node n = node_[key];
    if (!n) throw ConfigError(join(path_, key), line_of(node_), "missing required key");
    return n;
  }

  Section section(const std::string& key) { return {get(key), join(path_, key)}; }

  double number(const std::string& key) { return as_number(get(key), join(path_, key)); }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0)) throw ConfigError(join(path_, key), line_of(node_[key]), "must be positive");
    return v;
  }

  double non_negative(const std::string& key) {
    const double v = number(key);
    if (!(v >= 0.0)) throw ConfigError(join(path_, key), line_of(node_[key]), "must be non-negative");
    return v;
  }

  bool boolean(const std::string& key) {
    YAML::Node n = get(key);
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(join(path_, key), line_of(n), "expected true/false");
    }
  }

  std::string text(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsScalar()) throw ConfigError(join(path_, key), line_of(n), "expected a string");
    return n.Scalar();
  }

  Vec3 vec3(const std::string& key) { return as_vec3(get(key), join(path_, key)); }

  Mat3 mat3(const std::string& key) {
    YAML::Node n = get(key);
    const std::string p = join(path_, key);
    if (!n.IsSequence() || n.size() != 3) throw ConfigError(p, line_of(n), "expected 3 rows of 3 numbers");
    Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = as_vec3(n[r], p + "[" + std::to_string(r) + "]").transpose();
    return m;
  }

  const std::string& path() const { return path_; }
  int line() const { return line_of(node_); }

  // Throws on any key that was not read.
  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(join(path_, key), line_of(kv.first), "unknown key");
    }
  }

  static double as_number(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, line_of(n), "expected a number");
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(path, line_of(n), "expected a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(path, line_of(n), "must be finite");
    return v;
  }

  static Vec3 as_vec3(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence() || n.size() != 3) throw ConfigError(path, line_of(n), "expected [x, y, z]");
    return {as_number(n[0], path + "[0]"), as_number(n[1], path + "[1]"), as_number(n[2], path + "[2]")};
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

// Library validators throw std::invalid_argument; re-raise against a key.
template <class F>
void checked(const std::string& path, int line, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, line, e.what());
  }
}

PayloadSpec read_pole(Section s) {
  PayloadSpec p;
  p.mass = s.positive("mass");
  p.length = s.positive("length");
  p.radius = s.positive("radius");
  p.grasp_offset = s.vec3("grasp_offset");
  s.finish();
  p.inertia_com = tube_inertia(p.mass, p.length, p.radius);
  checked(s.path(), s.line(), [&] { validate(p); });
  return p;
}

ControlGains read_gains(Section s) {
  ControlGains g;
  g.k_p = s.positive("k_p");
  g.k_v = s.positive("k_v");
  g.k_i = s.positive("k_i");
  g.k_R = s.positive("k_R");
  g.k_omega = s.positive("k_omega");
  s.finish();
  return g;
}

PropellerSpec read_propeller(Section s, int index, double& time_constant) {
  PropellerSpec p;
  p.position = s.vec3("position");
  p.axis = s.vec3("axis");
  p.thrust_coeff = s.positive("thrust_coeff");
  p.drag_coeff = s.non_negative("drag_coeff");
  const std::string spin = s.text("spin");
  if (spin == "ccw") {
    p.spin = SpinDirection::CCW;
  } else if (spin == "cw") {
    p.spin = SpinDirection::CW;
  } else {
    throw ConfigError(join(s.path(), "spin"), s.line(), "expected ccw or cw");
  }
  const std::string cls = s.text("class");
  if (cls == "main") {
    p.rotor_class = RotorClass::Main;
  } else if (cls == "auxiliary") {
    p.rotor_class = RotorClass::Auxiliary;
  } else {
    throw ConfigError(join(s.path(), "class"), s.line(), "expected main or auxiliary");
  }
  p.w_min = s.non_negative("w_min");
  p.w_max = s.positive("w_max");
  time_constant = s.positive("time_constant");
  s.finish();
  checked(s.path(), s.line(), [&] { validate(p, index); });
  return p;
}

void read_vehicle(Section s, ScenarioConfig& c) {
  VehicleParams& v = c.vehicle;
  v.mass = s.positive("mass");
  v.inertia = s.mat3("inertia");
  v.com_offset = s.vec3("com_offset");
  v.gravity = s.positive("gravity");
  YAML::Node props = s.get("propellers");
  const std::string path = join(s.path(), "propellers");
  if (!props.IsSequence() || props.size() != kNumRotors) {
    throw ConfigError(path, line_of(props), "expected a list of exactly 8 propellers");
  }
  for (int i = 0; i < kNumRotors; ++i) {
    v.propellers[i] = read_propeller({props[i], path + "[" + std::to_string(i) + "]"}, i, c.motor_time_constants(i));
  }
  s.finish();
  checked(s.path(), s.line(), [&] { validate(v); });
}

void read_gripper(Section s, GripperGeometry& g) {
  g.incircle_radius = s.positive("incircle_radius");
  g.pole_radius_min = s.positive("pole_radius_min");
  g.pole_radius_max = s.positive("pole_radius_max");
  g.fold_angle = s.positive("fold_angle_deg") * std::numbers::pi / 180.0;
  g.friction_coeff = s.positive("friction_coeff");
  g.centering_time = s.non_negative("centering_time");
  g.locking_time = s.non_negative("locking_time");
  s.finish();
  checked(s.path(), s.line(), [&] { validate(g); });
  if (!self_lock_check(g)) {
    throw ConfigError(s.path(), s.line(), "gripper is not self-locking: need friction_coeff >= tan(fold angle)");
  }
}

MissionScript read_mission(Section s) {
  MissionScript m;
  m.home = s.vec3("home");
  m.clearance = s.positive("clearance");
  m.average_speed = s.positive("average_speed");
  m.max_acceleration = s.positive("max_acceleration");
  m.min_segment_time = s.positive("min_segment_time");
  m.hold_time = s.non_negative("hold_time");
  m.gate_dwell = s.non_negative("gate_dwell");
  m.gate_timeout = s.positive("gate_timeout");
  const double attempts = s.positive("max_attempts");
  if (attempts != std::floor(attempts)) throw ConfigError(join(s.path(), "max_attempts"), s.line(), "must be an integer");
  m.max_attempts = static_cast<int>(attempts);
  m.freeze_extension = s.non_negative("freeze_extension");
  m.contact_tolerance = s.positive("contact_tolerance");
  m.creep_speed = s.positive("creep_speed");
  m.mount_tolerance = s.positive("mount_tolerance");
  YAML::Node poles = s.get("poles");
  const std::string path = join(s.path(), "poles");
  if (!poles.IsSequence() || poles.size() == 0) throw ConfigError(path, line_of(poles), "expected a non-empty list");
  for (std::size_t i = 0; i < poles.size(); ++i) {
    Section p(poles[i], path + "[" + std::to_string(i) + "]");
    PoleTask task;
    task.pickup = p.vec3("pickup");
    task.pickup_offset = p.vec3("pickup_offset");
    task.place = p.vec3("place");
    task.pole = read_pole(p.section("pole"));
    p.finish();
    m.poles.push_back(task);
  }
  s.finish();
  checked(s.path(), s.line(), [&] { validate(m); });
  return m;
}

FlightPlan read_flight(Section s) {
  FlightPlan f;
  f.start = s.vec3("start");
  if (s.has("payload")) f.payload = read_pole(s.section("payload"));
  f.average_speed = s.positive("average_speed");
  f.max_acceleration = s.positive("max_acceleration");
  f.min_segment_time = s.positive("min_segment_time");
  YAML::Node wps = s.get("waypoints");
  const std::string path = join(s.path(), "waypoints");
  if (!wps.IsSequence() || wps.size() == 0) throw ConfigError(path, line_of(wps), "expected a non-empty list");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    Section w(wps[i], path + "[" + std::to_string(i) + "]");
    Waypoint wp;
    wp.position = w.vec3("position");
    wp.yaw = w.number("yaw");
    wp.hold_time = w.non_negative("hold");
    w.finish();
    f.waypoints.push_back(wp);
  }
  s.finish();
  return f;
}

ScenarioConfig read_root(const YAML::Node& doc) {
  Section s(doc, "");
  ScenarioConfig c;
  const double version = s.number("format");
  if (version != kFormatVersion) {
    throw ConfigError("format", line_of(doc["format"]), "unsupported format version (expected 1)");
  }
  c.name = s.text("name");
  const double seed = s.non_negative("seed");
  if (seed != std::floor(seed) || seed > 9.007199254740992e15) {
    throw ConfigError("seed", line_of(doc["seed"]), "must be a non-negative integer");
  }
  c.seed = static_cast<std::uint64_t>(seed);
  c.time_limit = s.positive("time_limit");
  c.output_dir = s.has("output_dir") ? s.text("output_dir") : "out/" + c.name;

  Section rates = s.section("rates");
  c.rates.physics = rates.positive("physics");
  c.rates.controller = rates.positive("controller");
  c.rates.planner = rates.positive("planner");
  rates.finish();

  read_vehicle(s.section("vehicle"), c);
  read_gripper(s.section("gripper"), c.gripper);
  if (s.has("gains")) c.gains = read_gains(s.section("gains"));
  if (s.has("loaded_gains")) c.loaded_gains = read_gains(s.section("loaded_gains"));
  if (s.has("allocation")) {
    Section a = s.section("allocation");
    c.weights.h_main = a.positive("h_main");
    c.weights.h_aux = a.positive("h_aux");
    c.weights.h_slack = a.positive("h_slack");
    c.weights.slack_bound = a.positive("slack_bound");
    a.finish();
  }

  Section b = s.section("battery");
  c.battery.voltage = b.positive("initial_voltage");
  c.battery.nominal = b.positive("nominal_voltage");
  c.battery.discharge_slope = b.non_negative("discharge_slope");
  b.finish();

  Section n = s.section("noise");
  c.noise.enabled = n.boolean("enabled");
  c.noise.sigma_position = n.non_negative("sigma_position");
  c.noise.sigma_attitude = n.non_negative("sigma_attitude_deg");
  n.finish();

  Section v = s.section("voltage_compensation");
  c.voltage.enabled = v.boolean("enabled");
  c.voltage.fit_voltage_low = v.positive("fit_voltage_low");
  c.voltage.fit_voltage_high = v.positive("fit_voltage_high");
  v.finish();

  if (s.has("mission")) c.mission = read_mission(s.section("mission"));
  if (s.has("flight")) c.flight = read_flight(s.section("flight"));
  s.finish();
  checked("", line_of(doc), [&] { validate(c); });
  return c;
}

std::string num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string out(buf, res.ptr);
  // Keep a decimal point so the dump reads back as a float literal.
  if (out.find_first_of(".en") == std::string::npos) out += ".0";
  return out;
}

std::string vec(const Vec3& v) { return "[" + num(v.x()) + ", " + num(v.y()) + ", " + num(v.z()) + "]"; }

void dump_gains(std::ostream& o, const char* key, const ControlGains& g) {
  o << key << ":\n  k_p: " << num(g.k_p) << "\n  k_v: " << num(g.k_v) << "\n  k_i: " << num(g.k_i)
    << "\n  k_R: " << num(g.k_R) << "\n  k_omega: " << num(g.k_omega) << "\n";
}

void dump_pole(std::ostream& o, const std::string& indent, const PayloadSpec& p) {
  o << indent << "mass: " << num(p.mass) << "\n"
    << indent << "length: " << num(p.length) << "\n"
    << indent << "radius: " << num(p.radius) << "\n"
    << indent << "grasp_offset: " << vec(p.grasp_offset) << "\n";
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (c.mission.has_value() == c.flight.has_value()) {
    throw std::invalid_argument("scenario needs exactly one of 'mission' or 'flight'");
  }
  const double ratio_c = c.rates.physics / c.rates.controller;
  const double ratio_p = c.rates.physics / c.rates.planner;
  if (std::abs(ratio_c - std::round(ratio_c)) > 1e-9 || std::abs(ratio_p - std::round(ratio_p)) > 1e-9 ||
      c.rates.controller > c.rates.physics || c.rates.planner > c.rates.controller) {
    throw std::invalid_argument("rates: physics must be an integer multiple of controller and planner rates, "
                                "planner <= controller <= physics");
  }
  validate(c.gripper);
  validate(c.gains);
  if (c.loaded_gains) validate(*c.loaded_gains);
  validate(c.weights);
  if (!(c.voltage.fit_voltage_low < c.voltage.fit_voltage_high)) {
    throw std::invalid_argument("voltage_compensation: fit_voltage_low must be below fit_voltage_high");
  }
  if (!c.battery.in_valid_range()) {
    throw std::invalid_argument("battery: initial voltage outside (0.8, 1.05] x nominal");
  }
  if (c.mission) {
    for (const auto& p : c.mission->poles) {
      if (p.pole.radius < c.gripper.pole_radius_min || p.pole.radius > c.gripper.pole_radius_max) {
        throw std::invalid_argument("pole radius outside the gripper range [r_min, r_max]");
      }
    }
  }
  if (c.flight && c.flight->payload) {
    const double r = c.flight->payload->radius;
    if (r < c.gripper.pole_radius_min || r > c.gripper.pole_radius_max) {
      throw std::invalid_argument("payload radius outside the gripper range [r_min, r_max]");
    }
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, std::string("YAML syntax: ") + e.msg);
  }
  if (!doc || doc.IsNull()) throw ConfigError("", 0, "empty scenario");
  return read_root(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string canonical_dump(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "format: " << kFormatVersion << "\n";
  o << "name: \"" << c.name << "\"\n";
  o << "seed: " << c.seed << "\n";
  o << "time_limit: " << num(c.time_limit) << "\n";
  o << "rates:\n  physics: " << num(c.rates.physics) << "\n  controller: " << num(c.rates.controller)
    << "\n  planner: " << num(c.rates.planner) << "\n";
  const VehicleParams& v = c.vehicle;
  o << "vehicle:\n  mass: " << num(v.mass) << "\n  inertia:\n";
  for (int r = 0; r < 3; ++r) o << "    - " << vec(v.inertia.row(r).transpose()) << "\n";
  o << "  com_offset: " << vec(v.com_offset) << "\n  gravity: " << num(v.gravity) << "\n  propellers:\n";
  for (int i = 0; i < kNumRotors; ++i) {
    const PropellerSpec& p = v.propellers[i];
    o << "    - position: " << vec(p.position) << "\n"
      << "      axis: " << vec(p.axis) << "\n"
      << "      thrust_coeff: " << num(p.thrust_coeff) << "\n"
      << "      drag_coeff: " << num(p.drag_coeff) << "\n"
      << "      spin: " << to_string(p.spin) << "\n"
      << "      class: " << to_string(p.rotor_class) << "\n"
      << "      w_min: " << num(p.w_min) << "\n"
      << "      w_max: " << num(p.w_max) << "\n"
      << "      time_constant: " << num(c.motor_time_constants(i)) << "\n";
  }
  const GripperGeometry& g = c.gripper;
  o << "gripper:\n  incircle_radius: " << num(g.incircle_radius) << "\n  pole_radius_min: " << num(g.pole_radius_min)
    << "\n  pole_radius_max: " << num(g.pole_radius_max)
    << "\n  fold_angle_deg: " << num(g.fold_angle * 180.0 / std::numbers::pi)
    << "\n  friction_coeff: " << num(g.friction_coeff) << "\n  centering_time: " << num(g.centering_time)
    << "\n  locking_time: " << num(g.locking_time) << "\n";
  dump_gains(o, "gains", c.gains);
  if (c.loaded_gains) dump_gains(o, "loaded_gains", *c.loaded_gains);
  o << "allocation:\n  h_main: " << num(c.weights.h_main) << "\n  h_aux: " << num(c.weights.h_aux)
    << "\n  h_slack: " << num(c.weights.h_slack) << "\n  slack_bound: " << num(c.weights.slack_bound) << "\n";
  o << "battery:\n  initial_voltage: " << num(c.battery.voltage) << "\n  nominal_voltage: " << num(c.battery.nominal)
    << "\n  discharge_slope: " << num(c.battery.discharge_slope) << "\n";
  o << "noise:\n  enabled: " << (c.noise.enabled ? "true" : "false")
    << "\n  sigma_position: " << num(c.noise.sigma_position)
    << "\n  sigma_attitude_deg: " << num(c.noise.sigma_attitude) << "\n";
  o << "voltage_compensation:\n  enabled: " << (c.voltage.enabled ? "true" : "false")
    << "\n  fit_voltage_low: " << num(c.voltage.fit_voltage_low)
    << "\n  fit_voltage_high: " << num(c.voltage.fit_voltage_high) << "\n";
  if (c.mission) {
    const MissionScript& m = *c.mission;
    o << "mission:\n  home: " << vec(m.home) << "\n  clearance: " << num(m.clearance)
      << "\n  average_speed: " << num(m.average_speed) << "\n  max_acceleration: " << num(m.max_acceleration)
      << "\n  min_segment_time: " << num(m.min_segment_time) << "\n  hold_time: " << num(m.hold_time)
      << "\n  gate_dwell: " << num(m.gate_dwell) << "\n  gate_timeout: " << num(m.gate_timeout)
      << "\n  max_attempts: " << m.max_attempts << "\n  freeze_extension: " << num(m.freeze_extension)
      << "\n  contact_tolerance: " << num(m.contact_tolerance) << "\n  creep_speed: " << num(m.creep_speed)
      << "\n  mount_tolerance: " << num(m.mount_tolerance) << "\n  poles:\n";
    for (const auto& p : m.poles) {
      o << "    - pickup: " << vec(p.pickup) << "\n      pickup_offset: " << vec(p.pickup_offset)
        << "\n      place: " << vec(p.place) << "\n      pole:\n";
      dump_pole(o, "        ", p.pole);
    }
  }
  if (c.flight) {
    const FlightPlan& f = *c.flight;
    o << "flight:\n  start: " << vec(f.start) << "\n";
    if (f.payload) {
      o << "  payload:\n";
      dump_pole(o, "    ", *f.payload);
    }
    o << "  average_speed: " << num(f.average_speed) << "\n  max_acceleration: " << num(f.max_acceleration)
      << "\n  min_segment_time: " << num(f.min_segment_time) << "\n  waypoints:\n";
    for (const auto& w : f.waypoints) {
      o << "    - position: " << vec(w.position) << "\n      yaw: " << num(w.yaw) << "\n      hold: " << num(w.hold_time)
        << "\n";
    }
  }
  return o.str();
}

std::string config_hash(const ScenarioConfig& c) {
  const std::string text = canonical_dump(c);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace polelift
