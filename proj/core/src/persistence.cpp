#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dephasim/errors.hpp"
#include "dephasim/harness.hpp"
#include "dephasim/version.hpp"

namespace dephasim {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader = "t_us,M,R,D,D_err";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_to_json(const RunConfig& cfg) {
  const auto& e = cfg.ensemble;
  return {
      {"n_runs", cfg.n_runs},
      {"seed", cfg.seed},
      {"resample_ensemble_per_run", cfg.resample_ensemble_per_run},
      {"grid",
       {{"stop_s", cfg.grid.stop},
        {"points", cfg.grid.points},
        {"spacing", to_string(cfg.grid.spacing)},
        {"log_start_s", cfg.grid.log_start}}},
      {"bath", {{"engine", to_string(cfg.engine)}, {"n_fluctuators", cfg.n_fluctuators}}},
      {"solver",
       {{"dt_s", cfg.solver.dt},
        {"m_max", cfg.solver.m_max},
        {"mode", to_string(cfg.solver.mode)},
        {"bessel_tol", cfg.solver.bessel_tol}}},
      {"ensemble",
       {{"delta_typ_rad_s", e.delta_typ},
        {"g_max_rad_s", e.g_max},
        {"g_min_rad_s", e.g_min},
        {"band_halfwidth_rad_s", e.band_halfwidth},
        {"gamma_rad_s", e.gamma},
        {"mu_av_rad_s", e.mu_av},
        {"mu_max_rad_s", e.mu_max},
        {"r_thermal_per_s", e.r_thermal}}},
      {"qubit",
       {{"e0_rad_s", cfg.qubit.e0}, {"a_mod_rad_s", cfg.qubit.a_mod}, {"omega_mod_rad_s", cfg.qubit.omega_mod}}},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.n_runs = j.at("n_runs").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.resample_ensemble_per_run = j.at("resample_ensemble_per_run").get<bool>();
  const auto& g = j.at("grid");
  cfg.grid.stop = g.at("stop_s").get<double>();
  cfg.grid.points = g.at("points").get<std::size_t>();
  cfg.grid.spacing = spacing_from_string(g.at("spacing").get<std::string>().c_str());
  cfg.grid.log_start = g.at("log_start_s").get<double>();
  const auto& b = j.at("bath");
  cfg.engine = engine_from_string(b.at("engine").get<std::string>().c_str());
  cfg.n_fluctuators = b.at("n_fluctuators").get<int>();
  const auto& s = j.at("solver");
  cfg.solver.dt = s.at("dt_s").get<double>();
  cfg.solver.m_max = s.at("m_max").get<int>();
  cfg.solver.mode = solver_mode_from_string(s.at("mode").get<std::string>().c_str());
  cfg.solver.bessel_tol = s.at("bessel_tol").get<double>();
  const auto& e = j.at("ensemble");
  cfg.ensemble.delta_typ = e.at("delta_typ_rad_s").get<double>();
  cfg.ensemble.g_max = e.at("g_max_rad_s").get<double>();
  cfg.ensemble.g_min = e.at("g_min_rad_s").get<double>();
  cfg.ensemble.band_halfwidth = e.at("band_halfwidth_rad_s").get<double>();
  cfg.ensemble.gamma = e.at("gamma_rad_s").get<double>();
  cfg.ensemble.mu_av = e.at("mu_av_rad_s").get<double>();
  cfg.ensemble.mu_max = e.at("mu_max_rad_s").get<double>();
  cfg.ensemble.r_thermal = e.at("r_thermal_per_s").get<double>();
  const auto& q = j.at("qubit");
  cfg.qubit.e0 = q.at("e0_rad_s").get<double>();
  cfg.qubit.a_mod = q.at("a_mod_rad_s").get<double>();
  cfg.qubit.omega_mod = q.at("omega_mod_rad_s").get<double>();
  return cfg;
}

double parse_field(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw SchemaError(path.string() + ":" + std::to_string(line) + ": malformed number '" + text + "'");
  }
  return v;
}

DephasingCurve read_curve(const std::filesystem::path& path, const std::vector<double>& times) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw SchemaError(path.string() + ": expected header '" + kCsvHeader + "'");
  }
  DephasingCurve curve;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= times.size()) throw SchemaError(path.string() + ": more rows than grid points");
    std::stringstream ss(line);
    std::string field;
    double v[5];
    int n = 0;
    while (std::getline(ss, field, ',')) {
      if (n == 5) throw SchemaError(path.string() + ":" + std::to_string(row + 2) + ": too many columns");
      v[n++] = parse_field(field, path, row + 2);
    }
    if (n != 5) throw SchemaError(path.string() + ":" + std::to_string(row + 2) + ": expected 5 columns");
    const double t_us = times[row] * 1e6;
    if (std::abs(v[0] - t_us) > 1e-9 * std::max(1.0, std::abs(t_us))) {
      throw SchemaError(path.string() + ":" + std::to_string(row + 2) + ": time does not match the grid");
    }
    curve.times.push_back(times[row]);
    curve.m_abs.push_back(v[1]);
    curve.r_rms.push_back(v[2]);
    curve.d.push_back(v[3]);
    curve.d_err.push_back(v[4]);
    ++row;
  }
  if (row != times.size()) throw SchemaError(path.string() + ": fewer rows than grid points");
  return curve;
}

}  // namespace

std::filesystem::path curve_csv_path(const std::filesystem::path& record_path) {
  std::filesystem::path p = record_path;
  p.replace_extension(".csv");
  return p;
}

std::string curve_csv(const DephasingCurve& curve) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    out += format_double(curve.times[k] * 1e6) + "," + format_double(curve.m_abs[k]) + "," +
           format_double(curve.r_rms[k]) + "," + format_double(curve.d[k]) + "," + format_double(curve.d_err[k]) +
           "\n";
  }
  return out;
}

void persist_run(const RunConfig& cfg, const DephasingCurve& curve, const std::filesystem::path& path,
                 const RunTiming& timing) {
  const auto csv_path = curve_csv_path(path);
  if (csv_path == path) throw ConfigError("persist_run: record path must not end in .csv");
  json record = {
      {"schema_version", kRunRecordSchemaVersion},
      {"code_version", kVersion},
      {"seed", cfg.seed},
      {"n_runs", curve.n_runs},
      {"timing", {{"wall_seconds", timing.wall_seconds}, {"threads", timing.threads}}},
      {"curve_csv", csv_path.filename().string()},
      {"config", config_to_json(cfg)},
  };
  {
    std::ofstream csv(csv_path);
    if (!csv) throw ConfigError("cannot write " + csv_path.string());
    csv << curve_csv(curve);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << record.dump(2) << "\n";
}

RunRecord load_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  json record;
  try {
    record = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  RunRecord out;
  try {
    const int version = record.at("schema_version").get<int>();
    if (version != kRunRecordSchemaVersion) {
      throw SchemaError(path.string() + ": schema version " + std::to_string(version) + ", expected " +
                        std::to_string(kRunRecordSchemaVersion));
    }
    out.code_version = record.at("code_version").get<std::string>();
    out.timing.wall_seconds = record.at("timing").at("wall_seconds").get<double>();
    out.timing.threads = record.at("timing").at("threads").get<unsigned>();
    out.cfg = config_from_json(record.at("config"));
    const auto csv = path.parent_path() / record.at("curve_csv").get<std::string>();
    out.curve = read_curve(csv, out.cfg.grid.make());
    out.curve.n_runs = record.at("n_runs").get<std::size_t>();
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace dephasim
