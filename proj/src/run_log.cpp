#include "polelift/run_log.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "polelift/controller.hpp"
#include "polelift/metrics.hpp"

namespace polelift {

namespace {

void put(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  line += buf;
  line += ',';
}

}  // namespace

std::string log_header() {
  std::string h = "t,px,py,pz,qw,qx,qy,qz,vbx,vby,vbz,wx,wy,wz";
  for (int i = 0; i < kNumRotors; ++i) h += ",w_cmd" + std::to_string(i);
  for (int i = 0; i < kNumRotors; ++i) h += ",w_act" + std::to_string(i);
  h += ",fx,fy,fz,tx,ty,tz,slack_norm,e_r,e_r_tip,phase,V,px_des,py_des,pz_des,yaw_des,pole_len";
  return h;
}

void write_log(std::ostream& out, const std::vector<LogRow>& rows) {
  out << kLogVersionLine << '\n' << log_header() << '\n';
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    put(line, r.t);
    for (int i = 0; i < 3; ++i) put(line, r.position(i));
    for (int i = 0; i < 4; ++i) put(line, r.quaternion(i));
    for (int i = 0; i < 3; ++i) put(line, r.velocity_body(i));
    for (int i = 0; i < 3; ++i) put(line, r.angular_velocity(i));
    for (int i = 0; i < kNumRotors; ++i) put(line, r.w_cmd(i));
    for (int i = 0; i < kNumRotors; ++i) put(line, r.w_act(i));
    for (int i = 0; i < 6; ++i) put(line, r.u_des(i));
    put(line, r.slack_norm);
    put(line, r.radial_error);
    put(line, r.tip_radial_error);
    line += r.phase;
    line += ',';
    put(line, r.voltage);
    for (int i = 0; i < 3; ++i) put(line, r.position_des(i));
    put(line, r.yaw_des);
    put(line, r.pole_length);
    line.pop_back();
    out << line << '\n';
  }
}

std::vector<LogRow> read_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kLogVersionLine) {
    throw std::runtime_error("not a polelift v1 log (first line must be '" + std::string(kLogVersionLine) + "')");
  }
  if (!std::getline(in, line) || line != log_header()) throw std::runtime_error("log header mismatch");
  std::vector<LogRow> rows;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    constexpr std::size_t kCols = 14 + 2 * kNumRotors + 6 + 3 + 1 + 1 + 5;
    if (f.size() != kCols) throw std::runtime_error("log line " + std::to_string(lineno) + ": wrong column count");
    std::size_t k = 0;
    auto num = [&](std::size_t idx) {
      char* end = nullptr;
      const double v = std::strtod(f[idx].c_str(), &end);
      if (end == f[idx].c_str() || *end != '\0') {
        throw std::runtime_error("log line " + std::to_string(lineno) + ": bad number '" + f[idx] + "'");
      }
      return v;
    };
    LogRow r;
    r.t = num(k++);
    for (int i = 0; i < 3; ++i) r.position(i) = num(k++);
    for (int i = 0; i < 4; ++i) r.quaternion(i) = num(k++);
    for (int i = 0; i < 3; ++i) r.velocity_body(i) = num(k++);
    for (int i = 0; i < 3; ++i) r.angular_velocity(i) = num(k++);
    for (int i = 0; i < kNumRotors; ++i) r.w_cmd(i) = num(k++);
    for (int i = 0; i < kNumRotors; ++i) r.w_act(i) = num(k++);
    for (int i = 0; i < 6; ++i) r.u_des(i) = num(k++);
    r.slack_norm = num(k++);
    r.radial_error = num(k++);
    r.tip_radial_error = num(k++);
    r.phase = f[k++];
    r.voltage = num(k++);
    for (int i = 0; i < 3; ++i) r.position_des(i) = num(k++);
    r.yaw_des = num(k++);
    r.pole_length = num(k++);
    if (!rows.empty() && !(r.t > rows.back().t)) {
      throw std::runtime_error("log line " + std::to_string(lineno) + ": time not strictly increasing");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

RecomputedErrors recompute_errors(const LogRow& row) {
  RigidState s;
  s.position = row.position;
  const Eigen::Vector4d& q = row.quaternion;
  s.attitude = RotationMatrix::from_quaternion(Eigen::Quaterniond(q(0), q(1), q(2), q(3)));
  Setpoint sp;
  sp.position = row.position_des;
  sp.attitude = RotationMatrix::about_z(row.yaw_des);
  const TrackingErrors e = compute_errors(s, sp);
  return {compute_radial_error(e.position),
          compute_radial_error(compute_tip_error(e.position, e.attitude, row.pole_length))};
}

}  // namespace polelift
