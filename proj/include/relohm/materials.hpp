// SPDX-License-Identifier: Apache-2.0
//
// Conductivity models sigma(k, omega) and their file format.
//
// Sign convention: fields vary as exp(-i omega t), so the Drude response is
//   sigma(omega) = sigma0 / (1 - i omega tau)
// and a response to real fields obeys sigma(-k, -omega) = conj(sigma(k, omega)).
//
// Model files are JSON documents; complex numbers are [re, im] pairs.
//   {"type": "constant-scalar", "sigma0": [re, im]}
//   {"type": "drude", "sigma0": [re, im], "tau": t}
//   {"type": "diagonal", "entries": [{"sigma0": [re, im], "tau": t?}, x3]}
//   {"type": "tabulated", "interpolation": "nearest" | "linear",
//    "real_field": bool?, "samples": [{"omega": w, "k": [kx, ky, kz],
//                                      "sigma": 3x3 of [re, im]}]}
#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "relohm/response_tensor.hpp"

namespace relohm {

struct ConstantScalar {
  cplx sigma0{0.0, 0.0};
};

struct Drude {
  cplx sigma0{0.0, 0.0};
  double tau = 1.0;
};

/// One principal axis of a diagonal model; dispersive when tau is set.
struct AxisResponse {
  cplx sigma0{0.0, 0.0};
  std::optional<double> tau;
};

struct DiagonalAnisotropic {
  std::array<AxisResponse, 3> axes;
};

enum class Interpolation { nearest, linear };

struct TabulatedSample {
  Wavevector4 at;
  SpatialTensor3 sigma = SpatialTensor3::Zero();
};

/// Samples on an arbitrary (k, omega) set. Lookup picks the nearest
/// tabulated k, then interpolates in omega among samples sharing that k.
struct Tabulated {
  std::vector<TabulatedSample> samples;
  Interpolation interpolation = Interpolation::linear;
  bool real_field = false;
};

using MaterialModel = std::variant<ConstantScalar, Drude, DiagonalAnisotropic, Tabulated>;

namespace detail {

inline cplx drude_value(cplx sigma0, double tau, double omega) {
  return sigma0 / (1.0 - I * (omega * tau));
}

inline SpatialTensor3 evaluate_tabulated(const Tabulated& t, const Wavevector4& kw) {
  if (t.samples.empty()) throw OutOfRange("tabulated model has no samples");

  double best = std::numeric_limits<double>::infinity();
  Vec3 nearest_k = t.samples.front().at.k;
  for (const auto& s : t.samples) {
    const double d = (s.at.k - kw.k).squaredNorm();
    if (d < best) {
      best = d;
      nearest_k = s.at.k;
    }
  }

  std::vector<const TabulatedSample*> column;
  for (const auto& s : t.samples) {
    if (s.at.k == nearest_k) column.push_back(&s);
  }
  std::sort(column.begin(), column.end(),
            [](const auto* a, const auto* b) { return a->at.omega < b->at.omega; });

  const double lo = column.front()->at.omega;
  const double hi = column.back()->at.omega;
  if (kw.omega < lo || kw.omega > hi) {
    throw OutOfRange("omega = " + format_real(kw.omega) + " outside tabulated range [" +
                     format_real(lo) + ", " + format_real(hi) + "] at k nearest to " +
                     describe(kw));
  }

  const auto upper = std::lower_bound(
      column.begin(), column.end(), kw.omega,
      [](const TabulatedSample* s, double w) { return s->at.omega < w; });
  if ((*upper)->at.omega == kw.omega) return (*upper)->sigma;
  const TabulatedSample* b = *upper;
  const TabulatedSample* a = *(upper - 1);
  if (t.interpolation == Interpolation::nearest) {
    return (kw.omega - a->at.omega <= b->at.omega - kw.omega) ? a->sigma : b->sigma;
  }
  const double w = (kw.omega - a->at.omega) / (b->at.omega - a->at.omega);
  return (1.0 - w) * a->sigma + w * b->sigma;
}

}  // namespace detail

inline SpatialTensor3 evaluate(const MaterialModel& model, const Wavevector4& kw) {
  require_dynamic(kw.omega);
  return std::visit(
      [&](const auto& m) -> SpatialTensor3 {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantScalar>) {
          return m.sigma0 * SpatialTensor3::Identity();
        } else if constexpr (std::is_same_v<T, Drude>) {
          return detail::drude_value(m.sigma0, m.tau, kw.omega) * SpatialTensor3::Identity();
        } else if constexpr (std::is_same_v<T, DiagonalAnisotropic>) {
          CVec3 d;
          for (int i = 0; i < 3; ++i) {
            const auto& ax = m.axes[static_cast<std::size_t>(i)];
            d(i) = ax.tau ? detail::drude_value(ax.sigma0, *ax.tau, kw.omega) : ax.sigma0;
          }
          return d.asDiagonal();
        } else {
          return detail::evaluate_tabulated(m, kw);
        }
      },
      model);
}

struct RealityViolation {
  Wavevector4 at;
  double deviation = 0.0;  ///< max |sigma(-k,-w) - conj(sigma(k,w))|, or NaN
  std::string reason;
};

struct RealityReport {
  std::vector<RealityViolation> violations;
  [[nodiscard]] bool passed() const { return violations.empty(); }
};

/// Checks sigma(-k, -omega) = conj(sigma(k, omega)) within 1e-10 at each sample.
inline RealityReport check_reality(const MaterialModel& model,
                                   const std::vector<Wavevector4>& samples) {
  RealityReport report;
  for (const auto& kw : samples) {
    const Wavevector4 neg{-kw.omega, -kw.k};
    try {
      const SpatialTensor3 a = evaluate(model, kw);
      const SpatialTensor3 b = evaluate(model, neg);
      const double dev = max_abs(SpatialTensor3(b - a.conjugate()));
      if (!(dev <= 1e-10)) {
        report.violations.push_back({kw, dev, "sigma(-k,-omega) != conj(sigma(k,omega))"});
      }
    } catch (const Error& e) {
      report.violations.push_back({kw, std::numeric_limits<double>::quiet_NaN(), e.what()});
    }
  }
  return report;
}

inline std::vector<Wavevector4> sample_points(const Tabulated& t) {
  std::vector<Wavevector4> out;
  out.reserve(t.samples.size());
  for (const auto& s : t.samples) out.push_back(s.at);
  return out;
}

inline void validate(const MaterialModel& model) {
  const auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  const auto check_tau = [](double tau, const std::string& where) {
    if (!(std::isfinite(tau) && tau > 0.0)) {
      throw InvariantViolation(where + ": tau must be positive, got " + format_real(tau));
    }
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantScalar>) {
          if (!finite(m.sigma0)) throw InvariantViolation("constant-scalar: sigma0 not finite");
        } else if constexpr (std::is_same_v<T, Drude>) {
          if (!finite(m.sigma0)) throw InvariantViolation("drude: sigma0 not finite");
          check_tau(m.tau, "drude");
        } else if constexpr (std::is_same_v<T, DiagonalAnisotropic>) {
          for (std::size_t i = 0; i < 3; ++i) {
            const std::string where = "diagonal entry " + std::to_string(i);
            if (!finite(m.axes[i].sigma0)) throw InvariantViolation(where + ": sigma0 not finite");
            if (m.axes[i].tau) check_tau(*m.axes[i].tau, where);
          }
        } else {
          if (m.samples.empty()) throw InvariantViolation("tabulated: no samples");
          for (std::size_t i = 0; i < m.samples.size(); ++i) {
            const auto& s = m.samples[i];
            if (!s.at.finite() || !s.sigma.allFinite()) {
              throw InvariantViolation("tabulated sample " + std::to_string(i) + " not finite");
            }
            for (std::size_t j = 0; j < i; ++j) {
              if (m.samples[j].at == s.at) {
                throw InvariantViolation("tabulated samples " + std::to_string(j) + " and " +
                                         std::to_string(i) + " share the key " +
                                         describe(s.at));
              }
            }
          }
          if (m.real_field) {
            const RealityReport r = check_reality(m, sample_points(m));
            if (!r.passed()) {
              const auto& v = r.violations.front();
              throw InvariantViolation("tabulated model flagged real_field fails the reality "
                                       "condition at " + describe(v.at) + ": " + v.reason);
            }
          }
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Serialization

namespace io {

using nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const SpatialTensor3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const CVec3& v) {
  return json::array({to_json(v(0)), to_json(v(1)), to_json(v(2))});
}

[[noreturn]] inline void fail(const std::string& field, const std::string& msg) {
  throw ParseError("field '" + field + "': " + msg);
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double as_real(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

inline cplx as_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(field, "expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Vec3 as_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(field, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    v(i) = as_real(j[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline CVec3 as_cvec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(field, "expected three complex [re, im] entries");
  CVec3 v;
  for (int i = 0; i < 3; ++i) {
    v(i) = as_complex(j[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline SpatialTensor3 as_tensor(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(field, "expected a 3x3 array of [re, im]");
  SpatialTensor3 m;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3) {
      fail(field + "[" + std::to_string(i) + "]", "expected a row of three [re, im]");
    }
    for (std::size_t l = 0; l < 3; ++l) {
      m(static_cast<int>(i), static_cast<int>(l)) =
          as_complex(j[i][l], field + "[" + std::to_string(i) + "][" + std::to_string(l) + "]");
    }
  }
  return m;
}

inline json model_to_json(const MaterialModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantScalar>) {
          return {{"type", "constant-scalar"}, {"sigma0", to_json(m.sigma0)}};
        } else if constexpr (std::is_same_v<T, Drude>) {
          return {{"type", "drude"}, {"sigma0", to_json(m.sigma0)}, {"tau", m.tau}};
        } else if constexpr (std::is_same_v<T, DiagonalAnisotropic>) {
          json entries = json::array();
          for (const auto& ax : m.axes) {
            json e = {{"sigma0", to_json(ax.sigma0)}};
            if (ax.tau) e["tau"] = *ax.tau;
            entries.push_back(e);
          }
          return {{"type", "diagonal"}, {"entries", entries}};
        } else {
          json samples = json::array();
          for (const auto& s : m.samples) {
            samples.push_back(
                {{"omega", s.at.omega}, {"k", to_json(s.at.k)}, {"sigma", to_json(s.sigma)}});
          }
          return {{"type", "tabulated"},
                  {"interpolation",
                   m.interpolation == Interpolation::linear ? "linear" : "nearest"},
                  {"real_field", m.real_field},
                  {"samples", samples}};
        }
      },
      model);
}

inline MaterialModel model_from_json(const json& j) {
  const json& type_field = require(j, "type", "");
  if (!type_field.is_string()) fail("type", "expected a string");
  const std::string type = type_field.get<std::string>();

  MaterialModel model;
  if (type == "constant-scalar") {
    model = ConstantScalar{as_complex(require(j, "sigma0", ""), "sigma0")};
  } else if (type == "drude") {
    model = Drude{as_complex(require(j, "sigma0", ""), "sigma0"),
                  as_real(require(j, "tau", ""), "tau")};
  } else if (type == "diagonal") {
    const json& entries = require(j, "entries", "");
    if (!entries.is_array() || entries.size() != 3) fail("entries", "expected three entries");
    DiagonalAnisotropic d;
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string path = "entries[" + std::to_string(i) + "]";
      d.axes[i].sigma0 = as_complex(require(entries[i], "sigma0", path), path + ".sigma0");
      if (entries[i].contains("tau")) d.axes[i].tau = as_real(entries[i]["tau"], path + ".tau");
    }
    model = d;
  } else if (type == "tabulated") {
    Tabulated t;
    if (j.contains("interpolation")) {
      const json& mode = j["interpolation"];
      if (mode == "linear") {
        t.interpolation = Interpolation::linear;
      } else if (mode == "nearest") {
        t.interpolation = Interpolation::nearest;
      } else {
        fail("interpolation", "expected \"nearest\" or \"linear\"");
      }
    }
    if (j.contains("real_field")) {
      if (!j["real_field"].is_boolean()) fail("real_field", "expected a boolean");
      t.real_field = j["real_field"].get<bool>();
    }
    const json& samples = require(j, "samples", "");
    if (!samples.is_array()) fail("samples", "expected an array");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string path = "samples[" + std::to_string(i) + "]";
      TabulatedSample s;
      s.at.omega = as_real(require(samples[i], "omega", path), path + ".omega");
      s.at.k = as_vec3(require(samples[i], "k", path), path + ".k");
      s.sigma = as_tensor(require(samples[i], "sigma", path), path + ".sigma");
      t.samples.push_back(s);
    }
    model = std::move(t);
  } else {
    fail("type", "unknown model type \"" + type + "\"");
  }
  validate(model);
  return model;
}

/// Sweep tables written by the CLI: '#' lines are comments/trailers, the
/// first remaining line is the header, and the primed columns
/// (omega_prime, kp*, sigma_prime entries) become the tabulated samples.
inline Tabulated tabulated_from_sweep_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  Tabulated t;
  std::size_t line_no = 0;

  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };

  std::vector<std::size_t> cols;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      std::vector<std::string> wanted = {"omega_prime", "kpx", "kpy", "kpz"};
      for (int i = 0; i < 3; ++i) {
        for (int l = 0; l < 3; ++l) {
          const std::string base = "sp" + std::to_string(i) + std::to_string(l);
          wanted.push_back(base + "_re");
          wanted.push_back(base + "_im");
        }
      }
      for (const auto& w : wanted) {
        const auto it = std::find(header.begin(), header.end(), w);
        if (it == header.end()) {
          throw ParseError("line " + std::to_string(line_no) + ": missing column '" + w + "'");
        }
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> vals;
    for (std::size_t c : cols) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ", field '" + header[c] +
                         "': not a number: '" + cells[c] + "'");
      }
    }
    TabulatedSample s;
    s.at.omega = vals[0];
    s.at.k = Vec3(vals[1], vals[2], vals[3]);
    for (int i = 0; i < 9; ++i) {
      s.sigma(i / 3, i % 3) = cplx(vals[4 + 2 * i], vals[5 + 2 * i]);
    }
    t.samples.push_back(s);
  }
  if (header.empty()) throw ParseError("empty sweep table");
  return t;
}

}  // namespace io

/// Parses a model document. JSON by default; a stream whose first
/// significant character is not '{' is read as a CLI sweep table.
inline MaterialModel load_model(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] != '{') {
    std::istringstream csv(text);
    MaterialModel model = io::tabulated_from_sweep_csv(csv);
    validate(model);
    return model;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  return io::model_from_json(j);
}

inline MaterialModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  try {
    return load_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline std::string serialize_model(const MaterialModel& model) {
  return io::model_to_json(model).dump(2);
}

/// True when s is a multiple of the identity to relative rel_tol.
inline bool is_scalar(const SpatialTensor3& s, double rel_tol = 1e-14) {
  const double scale = std::max(max_abs(s), 1e-300);
  const SpatialTensor3 off = s - s(0, 0) * SpatialTensor3::Identity();
  return max_abs(off) <= rel_tol * scale;
}

}  // namespace relohm
