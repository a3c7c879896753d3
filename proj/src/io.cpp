#include "annulus/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace annulus {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  if (env && *env) return fs::path(env);
  return fs::path("annulus_out");
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry:
    case ErrorCode::InvalidPhysics:
    case ErrorCode::GridMismatch:
    case ErrorCode::TooCoarse:
    case ErrorCode::InvalidSpec:
      return 2;
    case ErrorCode::SingularSystem:
    case ErrorCode::EigSolverFailure:
    case ErrorCode::NoBracket:
    case ErrorCode::SolverFailure:
    case ErrorCode::NoEscape:
      return 3;
    case ErrorCode::DegenerateCoefficient:
      return 4;
    case ErrorCode::CFLViolation:
      return 5;
  }
  return 1;
}

json error_json(ErrorCode code, const std::string& message) {
  return {{"error", to_string(code)}, {"message", message}, {"exit_code", exit_code(code)}};
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidSpec, "key '" + key + "': not a number: " + text);
  }
  if (trim(text.substr(used)).size()) throw Error(ErrorCode::InvalidSpec, "key '" + key + "': trailing text: " + text);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open config " + path.string());
  return parse(in);
}

const std::string* KeyValueConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? parse_real(key, *v) : fallback;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  const double x = parse_real(key, *v);
  if (x != std::floor(x)) throw Error(ErrorCode::InvalidSpec, "key '" + key + "': expected an integer");
  return long(x);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw Error(ErrorCode::InvalidSpec, "key '" + key + "': expected a boolean");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_real(key, item));
  return out;
}

void KeyValueConfig::require_known(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw Error(ErrorCode::InvalidSpec, "unknown key '" + k + "'");
    }
  }
}

namespace {

SampleRange range_from(const KeyValueConfig& cfg, const std::string& key, const SampleRange& fallback) {
  if (!cfg.has(key)) return fallback;
  const auto v = cfg.get_doubles(key, {});
  SampleRange r;
  if (v.size() == 1) {
    r = {v[0], v[0], 1};
  } else if (v.size() == 3) {
    if (v[2] != std::floor(v[2])) throw Error(ErrorCode::InvalidSpec, "key '" + key + "': count must be an integer");
    r = {v[0], v[1], int(v[2])};
  } else {
    throw Error(ErrorCode::InvalidSpec, "key '" + key + "': expected 'value' or 'lo, hi, count'");
  }
  return r;
}

}  // namespace

SweepSpec sweep_spec_from(const KeyValueConfig& cfg) {
  cfg.require_known({"a", "alpha", "b", "mu_offset", "n", "n_theta", "threads"});
  SweepSpec s;
  s.a = cfg.get_double("a", s.a);
  s.alpha = range_from(cfg, "alpha", s.alpha);
  s.b = range_from(cfg, "b", s.b);
  s.mu_offset = cfg.get_double("mu_offset", s.mu_offset);
  s.n = int(cfg.get_long("n", s.n));
  s.n_theta = int(cfg.get_long("n_theta", s.n_theta));
  s.threads = int(cfg.get_long("threads", s.threads));
  s.validate();
  return s;
}

json to_json(const SweepSpec& s) {
  return {{"a", s.a},
          {"alpha", {{"lo", s.alpha.lo}, {"hi", s.alpha.hi}, {"count", s.alpha.count}}},
          {"b", {{"lo", s.b.lo}, {"hi", s.b.hi}, {"count", s.b.count}}},
          {"mu_offset", s.mu_offset},
          {"n", s.n},
          {"n_theta", s.n_theta}};
}

SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec s;
  try {
    s.a = j.at("a").get<double>();
    s.alpha = {j.at("alpha").at("lo").get<double>(), j.at("alpha").at("hi").get<double>(),
               j.at("alpha").at("count").get<int>()};
    s.b = {j.at("b").at("lo").get<double>(), j.at("b").at("hi").get<double>(), j.at("b").at("count").get<int>()};
    s.mu_offset = j.at("mu_offset").get<double>();
    s.n = j.at("n").get<int>();
    s.n_theta = j.at("n_theta").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed sweep manifest: ") + e.what());
  }
  return s;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidSpec, "cannot write " + path.string());
  return out;
}

double read_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_real("csv", s);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw Error(ErrorCode::InvalidSpec, path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

Classification classification_from(const std::string& s) {
  if (s == to_string(Classification::Supercritical)) return Classification::Supercritical;
  if (s == to_string(Classification::Subcritical)) return Classification::Subcritical;
  return Classification::Degenerate;
}

constexpr const char* kSweepHeader = "alpha,b,mu_c,lambda1,l,class,status";
constexpr const char* kBoundaryHeader = "alpha,no_flip,b_star,b_lo,b_hi,l_lo,l_hi,iterations,verified,status";

}  // namespace

void write_field_csv(const fs::path& path, const PhysicalField& psi, const PhysicalField& v_r,
                     const PhysicalField& v_theta) {
  if (psi.values.rows() != v_r.values.rows() || psi.values.cols() != v_r.values.cols() ||
      psi.values.rows() != v_theta.values.rows() || psi.values.cols() != v_theta.values.cols()) {
    throw Error(ErrorCode::GridMismatch, "field dump components differ in shape");
  }
  auto out = open_out(path);
  out << "r,theta,psi,v_r,v_theta\n";
  for (Eigen::Index i = 0; i < psi.nr(); ++i) {
    for (Eigen::Index j = 0; j < psi.ntheta(); ++j) {
      out << format_real(psi.r(i)) << ',' << format_real(psi.theta(j)) << ',' << format_real(psi.values(i, j)) << ','
          << format_real(v_r.values(i, j)) << ',' << format_real(v_theta.values(i, j)) << '\n';
    }
  }
}

std::vector<double> contour_levels(const PhysicalField& field, int levels) {
  const double lo = field.values.minCoeff(), hi = field.values.maxCoeff();
  std::vector<double> out;
  for (int k = 1; k <= levels; ++k) out.push_back(lo + (hi - lo) * k / (levels + 1));
  return out;
}

std::vector<Segment> contour_segments(const PhysicalField& field, double level) {
  std::vector<Segment> segs;
  const Eigen::Index nr = field.nr(), nt = field.ntheta();
  auto point = [&](Eigen::Index i, Eigen::Index j) {
    const double th = j < nt ? field.theta(j) : field.theta(j - nt) + 2.0 * pi<double>();
    return std::pair<double, double>{field.r(i) * std::cos(th), field.r(i) * std::sin(th)};
  };
  auto value = [&](Eigen::Index i, Eigen::Index j) { return field.values(i, j % nt); };
  // Crossing on the edge between lattice points p and q.
  auto cross = [&](Eigen::Index i0, Eigen::Index j0, Eigen::Index i1, Eigen::Index j1) {
    const double f0 = value(i0, j0), f1 = value(i1, j1);
    const double t = (level - f0) / (f1 - f0);
    const auto [x0, y0] = point(i0, j0);
    const auto [x1, y1] = point(i1, j1);
    return std::pair<double, double>{x0 + t * (x1 - x0), y0 + t * (y1 - y0)};
  };
  for (Eigen::Index i = 0; i + 1 < nr; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) {
      // corners: 0 (i,j) 1 (i,j+1) 2 (i+1,j+1) 3 (i+1,j)
      const Eigen::Index ci[4] = {i, i, i + 1, i + 1};
      const Eigen::Index cj[4] = {j, j + 1, j + 1, j};
      int mask = 0;
      for (int c = 0; c < 4; ++c) mask |= (value(ci[c], cj[c]) > level) << c;
      if (mask == 0 || mask == 15) continue;
      auto edge = [&](int e) { return cross(ci[e], cj[e], ci[(e + 1) % 4], cj[(e + 1) % 4]); };
      auto add = [&](int e0, int e1) {
        const auto p = edge(e0), q = edge(e1);
        segs.push_back({p.first, p.second, q.first, q.second});
      };
      // edges: 0 = corners 0-1, 1 = 1-2, 2 = 2-3, 3 = 3-0
      switch (mask) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(2, 3); break;
        case 5: case 10: {
          const double centre = 0.25 * (value(ci[0], cj[0]) + value(ci[1], cj[1]) + value(ci[2], cj[2]) +
                                        value(ci[3], cj[3]));
          const bool joined = (centre > level) == (mask == 5);
          if (joined) {
            add(0, 1);
            add(2, 3);
          } else {
            add(3, 0);
            add(1, 2);
          }
          break;
        }
        default: break;
      }
    }
  }
  return segs;
}

void write_contour_svg(const fs::path& path, const PhysicalField& field, int levels) {
  const double rmax = field.r.maxCoeff(), rmin = field.r.minCoeff();
  const double size = 600.0, scale = 0.45 * size / rmax;
  auto X = [&](double x) { return 0.5 * size + scale * x; };
  auto Y = [&](double y) { return 0.5 * size - scale * y; };
  auto out = open_out(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"" << scale * rmax
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"" << scale * rmin
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  const auto lv = contour_levels(field, levels);
  for (std::size_t k = 0; k < lv.size(); ++k) {
    const double t = lv.size() > 1 ? double(k) / double(lv.size() - 1) : 0.5;
    const int red = int(255 * t), blue = int(255 * (1 - t));
    out << "<path fill=\"none\" stroke=\"rgb(" << red << ",0," << blue << ")\" stroke-width=\"1\" data-level=\""
        << format_real(lv[k]) << "\" d=\"";
    for (const auto& s : contour_segments(field, lv[k])) {
      out << 'M' << X(s.x0) << ' ' << Y(s.y0) << 'L' << X(s.x1) << ' ' << Y(s.y1);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_real(r.alpha) << ',' << format_real(r.b) << ',' << format_real(r.mu_c) << ','
        << format_real(r.lambda1) << ',' << format_real(r.l) << ',' << to_string(r.classification) << ','
        << r.status << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::vector<SweepRow> rows;
  for (const auto& f : read_csv(path, kSweepHeader)) {
    if (f.size() != 7) throw Error(ErrorCode::InvalidSpec, path.string() + ": malformed row");
    SweepRow r;
    r.alpha = read_real(f[0]);
    r.b = read_real(f[1]);
    r.mu_c = read_real(f[2]);
    r.lambda1 = read_real(f[3]);
    r.l = read_real(f[4]);
    r.classification = classification_from(f[5]);
    r.status = f[6];
    rows.push_back(r);
  }
  return rows;
}

void write_boundary_csv(const fs::path& path, const std::vector<BoundaryPoint>& points) {
  auto out = open_out(path);
  out << kBoundaryHeader << '\n';
  for (const auto& p : points) {
    out << format_real(p.alpha) << ',' << (p.no_flip ? "true" : "false") << ',' << format_real(p.b_star) << ','
        << format_real(p.b_lo) << ',' << format_real(p.b_hi) << ',' << format_real(p.l_lo) << ','
        << format_real(p.l_hi) << ',' << p.iterations << ',' << (p.verified ? "true" : "false") << ','
        << p.status << '\n';
  }
}

std::vector<BoundaryPoint> read_boundary_csv(const fs::path& path) {
  std::vector<BoundaryPoint> out;
  for (const auto& f : read_csv(path, kBoundaryHeader)) {
    if (f.size() != 10) throw Error(ErrorCode::InvalidSpec, path.string() + ": malformed row");
    BoundaryPoint p;
    p.alpha = read_real(f[0]);
    p.no_flip = f[1] == "true";
    p.b_star = read_real(f[2]);
    p.b_lo = read_real(f[3]);
    p.b_hi = read_real(f[4]);
    p.l_lo = read_real(f[5]);
    p.l_hi = read_real(f[6]);
    p.iterations = int(read_real(f[7]));
    p.verified = f[8] == "true";
    p.status = f[9];
    out.push_back(p);
  }
  return out;
}

void write_trajectory_csv(const fs::path& path, const std::vector<Diagnostics>& history) {
  auto out = open_out(path);
  out << "t,E3,E1,E2,max_psi";
  const std::size_t modes = history.empty() ? 0 : history.front().mode_energy.size();
  for (std::size_t k = 1; k <= modes; ++k) out << ",e_" << k;
  out << '\n';
  for (const auto& d : history) {
    out << format_real(d.t) << ',' << format_real(d.E3) << ',' << format_real(d.E1) << ',' << format_real(d.E2) << ','
        << format_real(d.max_psi);
    for (double e : d.mode_energy) out << ',' << format_real(e);
    out << '\n';
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, path.string() + ": " + e.what());
  }
}

json manifest(const std::string& command, const json& inputs, const std::vector<std::string>& outputs) {
  return {{"command", command}, {"version", kVersion}, {"inputs", inputs}, {"outputs", outputs}};
}

}  // namespace annulus
