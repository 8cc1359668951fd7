// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the relohm executable. Each command takes
// a fully resolved RunConfig and returns its exit code, the data payload
// (written to --output or stdout) and diagnostics (always stderr).
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 domain error (boost resonance, static frequency, table range).
#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "relohm/materials.hpp"
#include "relohm/ohm_forms.hpp"
#include "relohm/verification.hpp"

namespace relohm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

enum class OutputFormat { csv, structured };

struct RunConfig {
  UnitsConfig units;
  std::optional<MaterialModel> model;
  Vec3 velocity = Vec3::Zero();
  std::vector<double> omega_list;
  std::vector<Vec3> k_list;
  std::vector<Wavevector4> points;  ///< explicit (k, omega) pairs, after the product grid
  std::optional<CVec3> e_field;
  std::vector<std::string> formulas;
  std::uint64_t seed = VerifyOptions{}.seed;
  std::size_t samples = VerifyOptions{}.samples;
  bool inject_fault = false;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;

  /// omega-major product of omega_list and k_list (k defaults to 0),
  /// followed by the explicit points.
  [[nodiscard]] std::vector<Wavevector4> grid() const {
    std::vector<Wavevector4> out;
    const std::vector<Vec3> ks = k_list.empty() ? std::vector<Vec3>{Vec3::Zero()} : k_list;
    for (double w : omega_list) {
      for (const auto& k : ks) out.push_back({w, k});
    }
    out.insert(out.end(), points.begin(), points.end());
    return out;
  }
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::string data;
  std::string diagnostics;
};

// ---------------------------------------------------------------------------
// Parsing helpers shared by the config file and the flag layer

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ParseError(what + ": '" + cell + "' is not a number");
    }
  }
  if (out.empty()) throw ParseError(what + ": empty list");
  return out;
}

inline Vec3 parse_triple(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 3) throw ParseError(what + ": expected three comma-separated values");
  return {v[0], v[1], v[2]};
}

/// "kx,ky,kz;kx,ky,kz;..."
inline std::vector<Vec3> parse_triples(const std::string& text, const std::string& what) {
  std::vector<Vec3> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_triple(item, what));
  }
  if (out.empty()) throw ParseError(what + ": empty list");
  return out;
}

/// Three real values, or six as re,im pairs.
inline CVec3 parse_complex_triple(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() == 3) return {v[0], v[1], v[2]};
  if (v.size() == 6) return {cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5])};
  throw ParseError(what + ": expected 3 real or 6 (re,im) values");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "structured" || s == "json") return OutputFormat::structured;
  throw ParseError("format: expected csv or structured, got '" + s + "'");
}

/// Applies a JSON config document. Relative model paths resolve against base_dir.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j,
                              const std::filesystem::path& base_dir) {
  using io::as_real;
  if (!j.is_object()) throw ParseError("config: expected an object");
  if (j.contains("c")) cfg.units = UnitsConfig(as_real(j["c"], "c"));
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (m.is_string()) {
      std::filesystem::path p = m.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      cfg.model = load_model_file(p.string());
    } else {
      cfg.model = io::model_from_json(m);
    }
  }
  if (j.contains("velocity")) cfg.velocity = io::as_vec3(j["velocity"], "velocity");
  if (j.contains("omega")) {
    cfg.omega_list.clear();
    if (!j["omega"].is_array()) throw ParseError("field 'omega': expected an array");
    for (std::size_t i = 0; i < j["omega"].size(); ++i) {
      cfg.omega_list.push_back(as_real(j["omega"][i], "omega[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("k")) {
    cfg.k_list.clear();
    if (!j["k"].is_array()) throw ParseError("field 'k': expected an array of triples");
    for (std::size_t i = 0; i < j["k"].size(); ++i) {
      cfg.k_list.push_back(io::as_vec3(j["k"][i], "k[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("points")) {
    cfg.points.clear();
    if (!j["points"].is_array()) throw ParseError("field 'points': expected an array");
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
      const std::string path = "points[" + std::to_string(i) + "]";
      const auto& p = j["points"][i];
      cfg.points.push_back({as_real(io::require(p, "omega", path), path + ".omega"),
                            io::as_vec3(io::require(p, "k", path), path + ".k")});
    }
  }
  if (j.contains("E")) cfg.e_field = io::as_cvec3(j["E"], "E");
  if (j.contains("formulas")) {
    cfg.formulas.clear();
    for (const auto& f : j["formulas"]) cfg.formulas.push_back(f.get<std::string>());
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("samples")) cfg.samples = j["samples"].get<std::size_t>();
  if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
  if (j.contains("format")) cfg.format = parse_format(j["format"].get<std::string>());
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    apply_config_json(cfg, j, std::filesystem::path(path).parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output helpers

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_header_sweep() {
  std::string h = "omega,kx,ky,kz,omega_prime,kpx,kpy,kpz";
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) {
      const std::string base = "sp" + std::to_string(i) + std::to_string(l);
      h += "," + base + "_re," + base + "_im";
    }
  }
  return h + ",residual";
}

inline void append_tensor_csv(std::string& row, const SpatialTensor3& s) {
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) row += "," + num(s(i, l).real()) + "," + num(s(i, l).imag());
  }
}

inline void append_vec_csv(std::string& row, const Vec3& v) {
  row += "," + num(v.x()) + "," + num(v.y()) + "," + num(v.z());
}

struct TransformRecord {
  Wavevector4 at;
  Wavevector4 at_primed;
  double gamma = 1.0;
  SpatialTensor3 sigma;
  SpatialTensor3 sigma_primed;
  double residual = 0.0;
};

/// Transforms the model's sigma at one point with the closed-form law and
/// cross-checks it against the three-step route.
inline TransformRecord transform_point(const MaterialModel& model, const Wavevector4& at,
                                       const Vec3& v, const UnitsConfig& units) {
  TransformRecord r;
  r.at = at;
  r.gamma = BoostParams::make(v, units).gamma;
  r.sigma = evaluate(model, at);
  const FrameSample direct = boost_sigma_direct({r.sigma, at}, v, units);
  const FrameSample oracle = transform_sigma_oracle({r.sigma, at}, boost_matrix(v, units), units);
  r.at_primed = direct.at;
  r.sigma_primed = direct.sigma;
  r.residual = relative_error(direct.sigma, oracle.sigma);
  return r;
}

inline std::string sweep_row_csv(const TransformRecord& r) {
  std::string row = num(r.at.omega);
  append_vec_csv(row, r.at.k);
  row += "," + num(r.at_primed.omega);
  append_vec_csv(row, r.at_primed.k);
  append_tensor_csv(row, r.sigma_primed);
  row += "," + num(r.residual);
  return row;
}

inline nlohmann::json record_json(const TransformRecord& r) {
  return {{"omega", r.at.omega},
          {"k", io::to_json(r.at.k)},
          {"omega_prime", r.at_primed.omega},
          {"k_prime", io::to_json(r.at_primed.k)},
          {"gamma", r.gamma},
          {"sigma", io::to_json(r.sigma)},
          {"sigma_prime", io::to_json(r.sigma_primed)},
          {"residual", r.residual}};
}

namespace detail {

inline CommandOutput fail(int code, const std::string& msg) { return {code, "", msg + "\n"}; }

inline std::optional<CommandOutput> require_model(const RunConfig& cfg) {
  if (!cfg.model) return fail(kExitConfig, "error: no material model given (--model PATH)");
  return std::nullopt;
}

inline std::optional<CommandOutput> require_velocity(const RunConfig& cfg) {
  try {
    (void)BoostParams::make(cfg.velocity, cfg.units);
  } catch (const SpeedLimit& e) {
    return fail(kExitConfig, std::string("error: SpeedLimit: ") + e.what());
  }
  return std::nullopt;
}

inline std::optional<CommandOutput> require_single_point(const RunConfig& cfg,
                                                         Wavevector4& out) {
  const auto g = cfg.grid();
  if (g.size() != 1) {
    return fail(kExitConfig, "error: expected exactly one (k, omega) point, got " +
                                 std::to_string(g.size()));
  }
  out = g.front();
  return std::nullopt;
}

inline const char* error_kind(const Error& e) {
  if (dynamic_cast<const BoostResonance*>(&e)) return "BoostResonance";
  if (dynamic_cast<const StaticFrequency*>(&e)) return "StaticFrequency";
  if (dynamic_cast<const OutOfRange*>(&e)) return "OutOfRange";
  if (dynamic_cast<const SpeedLimit*>(&e)) return "SpeedLimit";
  if (dynamic_cast<const FrameMismatch*>(&e)) return "FrameMismatch";
  if (dynamic_cast<const InvariantViolation*>(&e)) return "InvariantViolation";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  return "Error";
}

inline CommandOutput from_error(const Error& e, const Wavevector4* at = nullptr) {
  const bool domain = dynamic_cast<const DomainError*>(&e) != nullptr;
  std::string msg = std::string("error: ") + error_kind(e) + ": " + e.what();
  if (at) msg += " at " + describe(*at);
  return fail(domain ? kExitDomain : kExitConfig, msg);
}

inline nlohmann::json cvec_json(const CVec3& v) { return io::to_json(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline CommandOutput cmd_transform(const RunConfig& cfg) {
  if (auto e = detail::require_model(cfg)) return *e;
  if (auto e = detail::require_velocity(cfg)) return *e;
  Wavevector4 at;
  if (auto e = detail::require_single_point(cfg, at)) return *e;

  TransformRecord r;
  try {
    r = transform_point(*cfg.model, at, cfg.velocity, cfg.units);
  } catch (const Error& e) {
    return detail::from_error(e, &at);
  }

  CommandOutput out;
  if (cfg.format == OutputFormat::structured) {
    out.data = record_json(r).dump(2) + "\n";
  } else {
    std::string header = csv_header_sweep() + ",gamma";
    for (int i = 0; i < 3; ++i) {
      for (int l = 0; l < 3; ++l) {
        const std::string base = "s" + std::to_string(i) + std::to_string(l);
        header += "," + base + "_re," + base + "_im";
      }
    }
    std::string row = sweep_row_csv(r) + "," + num(r.gamma);
    append_tensor_csv(row, r.sigma);
    out.data = header + "\n" + row + "\n";
  }
  return out;
}

inline CommandOutput cmd_sweep(const RunConfig& cfg) {
  if (auto e = detail::require_model(cfg)) return *e;
  if (auto e = detail::require_velocity(cfg)) return *e;
  const auto grid = cfg.grid();
  if (grid.empty()) return detail::fail(kExitConfig, "error: empty grid (give --omega or points)");

  struct Skip {
    Wavevector4 at;
    std::string reason;
  };
  std::vector<TransformRecord> rows;
  std::vector<Skip> skipped;
  for (const auto& at : grid) {
    try {
      rows.push_back(transform_point(*cfg.model, at, cfg.velocity, cfg.units));
    } catch (const DomainError& e) {
      skipped.push_back({at, std::string(detail::error_kind(e)) + ": " + e.what()});
    } catch (const Error& e) {
      return detail::from_error(e, &at);
    }
  }

  CommandOutput out;
  if (cfg.format == OutputFormat::structured) {
    // The document is itself a loadable tabulated model of sigma'.
    nlohmann::json samples = nlohmann::json::array();
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : rows) {
      samples.push_back({{"omega", r.at_primed.omega},
                         {"k", io::to_json(r.at_primed.k)},
                         {"sigma", io::to_json(r.sigma_primed)}});
      records.push_back(record_json(r));
    }
    nlohmann::json skip_json = nlohmann::json::array();
    for (const auto& s : skipped) {
      skip_json.push_back({{"omega", s.at.omega}, {"k", io::to_json(s.at.k)}, {"reason", s.reason}});
    }
    nlohmann::json doc = {{"type", "tabulated"},
                          {"interpolation", "linear"},
                          {"velocity", io::to_json(cfg.velocity)},
                          {"c", cfg.units.c},
                          {"samples", samples},
                          {"rows", records},
                          {"skipped", skip_json}};
    out.data = doc.dump(2) + "\n";
  } else {
    out.data = csv_header_sweep() + "\n";
    for (const auto& r : rows) out.data += sweep_row_csv(r) + "\n";
    for (const auto& s : skipped) {
      std::string reason = s.reason;
      for (char& ch : reason) {
        if (ch == '\n' || ch == ',') ch = ';';
      }
      std::string line = "# skipped," + num(s.at.omega);
      append_vec_csv(line, s.at.k);
      out.data += line + "," + reason + "\n";
    }
  }
  for (const auto& s : skipped) {
    out.diagnostics += "skipped " + describe(s.at) + ": " + s.reason + "\n";
  }
  if (rows.empty()) {
    out.exit_code = kExitDomain;
    out.diagnostics += "error: every grid point was skipped\n";
  }
  return out;
}

inline CommandOutput cmd_verify(const RunConfig& cfg) {
  if (cfg.samples == 0) return detail::fail(kExitConfig, "error: --samples must be positive");
  VerifyOptions opt;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.units = cfg.units;
  opt.fault = cfg.inject_fault ? 1e-6 : 0.0;

  std::vector<SuiteResult> results;
  try {
    results = run_verification(opt);
  } catch (const Error& e) {
    return detail::fail(kExitVerifyFailed, std::string("error: suite aborted: ") + e.what());
  }

  CommandOutput out;
  const SuiteResult* first_fail = nullptr;
  if (cfg.format == OutputFormat::structured) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
      arr.push_back({{"suite", r.name},
                     {"samples", r.samples},
                     {"max_residual", r.max_residual},
                     {"tolerance", r.tolerance},
                     {"passed", r.passed()}});
    }
    out.data = nlohmann::json{{"seed", cfg.seed}, {"suites", arr}}.dump(2) + "\n";
  } else {
    out.data = "suite,samples,max_residual,tolerance,status\n";
    for (const auto& r : results) {
      out.data += r.name + "," + std::to_string(r.samples) + "," + num(r.max_residual) + "," +
                  num(r.tolerance) + "," + (r.passed() ? "PASS" : "FAIL") + "\n";
    }
  }
  for (const auto& r : results) {
    if (!r.passed() && !first_fail) first_fail = &r;
  }
  if (first_fail) {
    out.exit_code = kExitVerifyFailed;
    out.diagnostics = "verification failed: suite '" + first_fail->name + "' max residual " +
                      num(first_fail->max_residual) + " exceeds " +
                      num(first_fail->tolerance) + "\n";
  }
  return out;
}

inline CommandOutput cmd_ohm(const RunConfig& cfg) {
  if (auto e = detail::require_model(cfg)) return *e;
  if (auto e = detail::require_velocity(cfg)) return *e;
  Wavevector4 at;
  if (auto e = detail::require_single_point(cfg, at)) return *e;
  if (!cfg.e_field) return detail::fail(kExitConfig, "error: no electric field given (--E)");
  for (const auto& f : cfg.formulas) {
    if (f != "generalized" && f != "textbook" && f != "nonrelativistic") {
      return detail::fail(kExitConfig, "error: unknown formula '" + f + "'");
    }
  }

  try {
    const UnitsConfig& u = cfg.units;
    const Vec3& v = cfg.velocity;
    const FieldSet fields = fields_from_electric(*cfg.e_field, at);
    const Wavevector4 at_primed = transform_wavevector(boost_matrix(v, u), at, u);
    const SpatialTensor3 sigma_primed = evaluate(*cfg.model, at_primed);
    const bool scalar = is_scalar(sigma_primed);

    std::vector<std::string> formulas = cfg.formulas;
    if (formulas.empty()) {
      formulas = {"generalized"};
      if (scalar) formulas.insert(formulas.end(), {"textbook", "nonrelativistic"});
    }
    for (const auto& f : formulas) {
      if (f != "generalized" && !scalar) {
        return detail::fail(kExitConfig, "error: formula '" + f +
                                             "' requires a scalar conductivity; the model is "
                                             "anisotropic at " + describe(at_primed));
      }
    }

    std::vector<std::pair<std::string, OhmResult>> results;
    for (const auto& f : formulas) {
      if (f == "generalized") {
        results.emplace_back(f, generalized_ohm(sigma_primed, v, fields, u));
      } else if (f == "textbook") {
        results.emplace_back(f, split_drift(textbook_ohm(sigma_primed(0, 0), v, fields, u), v, at));
      } else {
        results.emplace_back(f,
                             split_drift(textbook_ohm_nr(sigma_primed(0, 0), v, fields), v, at));
      }
    }

    std::vector<std::tuple<std::string, std::string, double>> diffs;
    for (std::size_t a = 0; a < results.size(); ++a) {
      for (std::size_t b = a + 1; b < results.size(); ++b) {
        diffs.emplace_back(results[a].first, results[b].first,
                           max_abs(CVec3(results[a].second.drift_current -
                                         results[b].second.drift_current)));
      }
    }

    CommandOutput out;
    if (cfg.format == OutputFormat::structured) {
      nlohmann::json doc = {{"omega", at.omega},
                            {"k", io::to_json(at.k)},
                            {"omega_prime", at_primed.omega},
                            {"k_prime", io::to_json(at_primed.k)},
                            {"gamma", BoostParams::make(v, u).gamma},
                            {"E", detail::cvec_json(fields.e)},
                            {"B", detail::cvec_json(fields.b)},
                            {"sigma_prime", io::to_json(sigma_primed)}};
      for (const auto& [name, r] : results) {
        doc[name] = {{"j", detail::cvec_json(r.j)},
                     {"rho", io::to_json(r.rho)},
                     {"drift_current", detail::cvec_json(r.drift_current)}};
      }
      nlohmann::json d = nlohmann::json::object();
      for (const auto& [a, b, x] : diffs) d[a + "-" + b] = x;
      doc["differences"] = d;
      out.data = doc.dump(2) + "\n";
    } else {
      std::string data = "formula";
      for (const char* name : {"j", "drift"}) {
        for (const char* axis : {"x", "y", "z"}) {
          data += std::string(",") + name + axis + "_re," + name + axis + "_im";
        }
        if (std::string(name) == "j") data += ",rho_re,rho_im";
      }
      data += "\n";
      for (const auto& [name, r] : results) {
        std::string row = name;
        for (int i = 0; i < 3; ++i) row += "," + num(r.j(i).real()) + "," + num(r.j(i).imag());
        row += "," + num(r.rho.real()) + "," + num(r.rho.imag());
        for (int i = 0; i < 3; ++i) {
          row += "," + num(r.drift_current(i).real()) + "," + num(r.drift_current(i).imag());
        }
        data += row + "\n";
      }
      for (const auto& [a, b, x] : diffs) data += "# difference," + a + "," + b + "," + num(x) + "\n";
      out.data = data;
    }
    return out;
  } catch (const Error& e) {
    return detail::from_error(e, &at);
  }
}

}  // namespace relohm::cli
