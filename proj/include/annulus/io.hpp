#pragma once

#include "annulus/error.hpp"
#include "annulus/modal_field.hpp"
#include "annulus/simulator.hpp"
#include "annulus/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace annulus {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "ANNULUS_OUTPUT_DIR";

/// $ANNULUS_OUTPUT_DIR if set and nonempty, else "annulus_out".
std::filesystem::path default_output_dir();

/// Process exit status for a failure with this code.
int exit_code(ErrorCode code);
nlohmann::json error_json(ErrorCode code, const std::string& message);

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored.
/// Keys are unique; a repeated key is an InvalidSpec error.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  /// Throws InvalidSpec naming the first key outside `known`.
  void require_known(const std::vector<std::string>& known) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* find(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

/// Reads `alpha = lo, hi, count`-style ranges and the remaining SweepSpec keys.
SweepSpec sweep_spec_from(const KeyValueConfig& cfg);
nlohmann::json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

/// 17 significant digits; NaN and infinities spelled nan, inf, -inf.
std::string format_real(double x);

/// Columns r, theta, psi, v_r, v_theta, r outer and theta inner.
void write_field_csv(const std::filesystem::path& path, const PhysicalField& psi, const PhysicalField& v_r,
                     const PhysicalField& v_theta);

struct Segment {
  double x0, y0, x1, y1;
};

/// Marching squares on the (r, θ) lattice with periodic θ; vertices in Cartesian
/// coordinates x = r cos θ, y = r sin θ.
std::vector<Segment> contour_segments(const PhysicalField& field, double level);
/// `levels` evenly spaced values strictly inside (min, max).
std::vector<double> contour_levels(const PhysicalField& field, int levels = 11);
void write_contour_svg(const std::filesystem::path& path, const PhysicalField& field, int levels = 11);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
void write_boundary_csv(const std::filesystem::path& path, const std::vector<BoundaryPoint>& points);
std::vector<BoundaryPoint> read_boundary_csv(const std::filesystem::path& path);

/// Columns t, E3, E1, E2, max_psi, e_1 .. e_K.
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Diagnostics>& history);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// {"command", "version", "inputs", "outputs"}; no timestamps, so reruns compare equal.
nlohmann::json manifest(const std::string& command, const nlohmann::json& inputs,
                        const std::vector<std::string>& outputs);

}  // namespace annulus
