#pragma once

#include <stdexcept>
#include <string>

namespace polelift {

// Numerical blow-up in the simulator. `time` is the simulated timestamp of
// the offending step, or negative when raised below the plant level.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time = -1.0)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Scenario file problem. key_path is dotted ("vehicle.propellers[3].axis");
// line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, int line, const std::string& message)
      : std::runtime_error(format(key_path, line, message)), key_path_(std::move(key_path)), line_(line) {}
  const std::string& key_path() const { return key_path_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& msg) {
    std::string out = key.empty() ? std::string("<root>") : key;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out + ": " + msg;
  }
  std::string key_path_;
  int line_;
};

class QpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polelift
