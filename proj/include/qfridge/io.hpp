#pragma once

// JSON configuration and CSV/JSON emission of sweep tables and reports.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "qfridge/core.hpp"
#include "qfridge/model.hpp"
#include "qfridge/sweep.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

using json = nlohmann::ordered_json;

// {omega_H, omega_C, g, T_H, T_R, T_C, gamma} plus optional per-bath
// gamma_H / gamma_R / gamma_C. gamma defaults to 0.001 * omega_H. T_H may be
// omitted when it is swept.
inline ModelParams parse_config(const json& doc, bool require_t_hot = true) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  static const std::array<std::string_view, 10> known{
      "omega_H", "omega_C", "g", "T_H", "T_R", "T_C", "gamma", "gamma_H", "gamma_R", "gamma_C"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
    if (!value.is_number()) {
      throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' must be a number");
    }
  }
  auto required = [&](const char* key) -> double {
    if (!doc.contains(key)) {
      throw Error(ErrorCode::InvalidConfig, std::string("missing config key '") + key + "'");
    }
    return doc.at(key).get<double>();
  };

  ModelParams p;
  p.omega_H = required("omega_H");
  p.omega_C = required("omega_C");
  p.g = required("g");
  p.T_R = required("T_R");
  p.T_C = required("T_C");
  if (require_t_hot || doc.contains("T_H")) {
    p.T_H = required("T_H");
  } else {
    p.T_H = p.T_R;
  }
  const double gamma = doc.value("gamma", 0.001 * p.omega_H);
  p.gamma_H = doc.value("gamma_H", gamma);
  p.gamma_R = doc.value("gamma_R", gamma);
  p.gamma_C = doc.value("gamma_C", gamma);
  return p;
}

inline ModelParams parse_config_text(std::string_view text, bool require_t_hot = true) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc, require_t_hot);
}

inline ModelParams load_config(const std::string& path, bool require_t_hot = true) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), require_t_hot);
}

inline json params_to_json(const ModelParams& p) {
  return json{{"omega_H", p.omega_H}, {"omega_C", p.omega_C}, {"omega_R", p.omega_R()},
              {"g", p.g},             {"T_H", p.T_H},         {"T_R", p.T_R},
              {"T_C", p.T_C},         {"gamma_H", p.gamma_H}, {"gamma_R", p.gamma_R},
              {"gamma_C", p.gamma_C}};
}

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

enum class Format { Csv, Json };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

namespace detail {

inline std::optional<double> column_value(const SweepRow& row, Column c) {
  switch (c) {
    case Column::Qdot_H: return row.q_dot[0];
    case Column::Qdot_R: return row.q_dot[1];
    case Column::Qdot_C: return row.q_dot[2];
    case Column::eta: return row.eta;
    case Column::sigma: return row.sigma;
    case Column::T_v:
      return row.t_virtual ? *row.t_virtual : std::numeric_limits<double>::infinity();
    case Column::refrigerator: return row.refrigerator ? 1.0 : 0.0;
    case Column::residual: return row.residual;
    case Column::g_over_gamma: return row.g_over_gamma;
  }
  return std::nullopt;
}

inline void check_row(const SweepRow& row) {
  if (!satisfies_laws(row)) {
    throw Error(ErrorCode::OracleDisagreement,
                "row at x=" + format_double(row.x) + " violates first/second law");
  }
}

}  // namespace detail

// Undefined values (eta with vanishing Qdot_H) are empty fields.
inline void write_csv(const SweepTable& table, std::ostream& out) {
  std::string header;
  if (table.multi_line) header += "g,";
  header += csv_field(variable_header(table.variable));
  for (Column c : table.columns) header += "," + csv_field(column_header(c));
  out << header << '\n';
  for (const auto& row : table.rows) {
    detail::check_row(row);
    std::string line;
    if (table.multi_line) line += format_double(row.g_line.value_or(0.0)) + ",";
    line += format_double(row.x);
    for (Column c : table.columns) {
      line += ',';
      if (const auto v = detail::column_value(row, c)) line += format_double(*v);
    }
    out << line << '\n';
  }
}

inline json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

// Array of row objects; undefined or infinite values are null.
inline void write_json(const SweepTable& table, std::ostream& out) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    detail::check_row(row);
    json obj = json::object();
    if (table.multi_line) obj["g"] = row.g_line.value_or(0.0);
    obj[std::string(variable_header(table.variable))] = row.x;
    for (Column c : table.columns) {
      const auto v = detail::column_value(row, c);
      obj[std::string(column_header(c))] = v ? json_number(*v) : json(nullptr);
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

inline void write_table(const SweepTable& table, Format format, std::ostream& out) {
  if (format == Format::Csv) {
    write_csv(table, out);
  } else {
    write_json(table, out);
  }
}

inline void emit(const SweepTable& table, Format format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_table(table, format, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

inline json report_to_json(const SteadyReport& r) {
  json populations = json::array();
  for (int i = 0; i < kDim; ++i) populations.push_back(r.populations.values(i));
  json energies = json::array();
  for (double e : r.energies) energies.push_back(e);
  json warnings = json::array();
  for (const auto& w : r.diagnostics.warnings) warnings.push_back(w);
  return json{
      {"params", params_to_json(r.params)},
      {"energies", energies},
      {"populations", populations},
      {"q_dot", {{"H", r.q(Bath::Hot)}, {"R", r.q(Bath::Room)}, {"C", r.q(Bath::Cold)}}},
      {"efficiency", r.efficiency ? json(*r.efficiency) : json(nullptr)},
      {"refrigerator", r.refrigerator},
      {"t_virtual", r.t_virtual ? json(*r.t_virtual) : json(nullptr)},
      {"entropy_production", r.entropy_production},
      {"diagnostics",
       {{"rate_matrix_mismatch", r.diagnostics.rate_matrix_mismatch},
        {"generator_residual", r.diagnostics.generator_residual},
        {"max_coherence", r.diagnostics.max_coherence},
        {"commutator_residual", r.diagnostics.commutator_residual},
        {"heat_form_mismatch", r.diagnostics.heat_form_mismatch},
        {"first_law_residual", r.diagnostics.first_law_residual},
        {"g_over_gamma", r.diagnostics.g_over_gamma},
        {"warnings", warnings}}},
  };
}

}  // namespace qfridge
