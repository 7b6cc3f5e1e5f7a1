#pragma once

// Parameter sweeps, figure presets and zero-crossing search.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/model.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

enum class SweepVariable { T_H, g, T_C, T_R };

enum class Column { Qdot_H, Qdot_R, Qdot_C, eta, sigma, T_v, refrigerator, residual, g_over_gamma };

inline const std::vector<Column>& default_columns() {
  static const std::vector<Column> cols{Column::Qdot_H, Column::Qdot_R, Column::Qdot_C,
                                        Column::eta, Column::sigma};
  return cols;
}

inline std::string_view column_key(Column c) {
  switch (c) {
    case Column::Qdot_H: return "Qdot_H";
    case Column::Qdot_R: return "Qdot_R";
    case Column::Qdot_C: return "Qdot_C";
    case Column::eta: return "eta";
    case Column::sigma: return "sigma";
    case Column::T_v: return "T_v";
    case Column::refrigerator: return "refrigerator";
    case Column::residual: return "residual";
    case Column::g_over_gamma: return "g_over_gamma";
  }
  return "?";
}

// Header text with nominal units kept for parity with the published figures.
inline std::string_view column_header(Column c) {
  switch (c) {
    case Column::Qdot_H: return "Qdot_H[J/s]";
    case Column::Qdot_R: return "Qdot_R[J/s]";
    case Column::Qdot_C: return "Qdot_C[J/s]";
    case Column::T_v: return "T_v[K]";
    default: return column_key(c);
  }
}

inline std::optional<Column> parse_column(std::string_view key) {
  for (Column c : {Column::Qdot_H, Column::Qdot_R, Column::Qdot_C, Column::eta,
                   Column::sigma, Column::T_v, Column::refrigerator, Column::residual,
                   Column::g_over_gamma}) {
    if (key == column_key(c) || key == column_header(c)) return c;
  }
  return std::nullopt;
}

inline std::string_view variable_key(SweepVariable v) {
  switch (v) {
    case SweepVariable::T_H: return "T_H";
    case SweepVariable::g: return "g";
    case SweepVariable::T_C: return "T_C";
    case SweepVariable::T_R: return "T_R";
  }
  return "?";
}

inline std::string_view variable_header(SweepVariable v) {
  switch (v) {
    case SweepVariable::T_H: return "T_H[K]";
    case SweepVariable::g: return "g";
    case SweepVariable::T_C: return "T_C[K]";
    case SweepVariable::T_R: return "T_R[K]";
  }
  return "?";
}

inline std::optional<SweepVariable> parse_variable(std::string_view key) {
  for (SweepVariable v : {SweepVariable::T_H, SweepVariable::g, SweepVariable::T_C,
                          SweepVariable::T_R}) {
    if (key == variable_key(v) || key == variable_header(v)) return v;
  }
  return std::nullopt;
}

struct SweepRange {
  double from = 0.0;
  double to = 1.0;
  int steps = 200;

  double at(int i) const {
    if (i == steps - 1) return to;
    return from + (to - from) * double(i) / double(steps - 1);
  }
};

struct SweepSpec {
  ModelParams base;
  SweepVariable variable = SweepVariable::T_H;
  SweepRange range;
  std::vector<double> g_values;  // one curve per value; empty = single curve
  std::vector<Column> outputs = default_columns();
  unsigned workers = 0;  // 0 = hardware concurrency
};

inline void validate_sweep(const SweepSpec& spec) {
  if (!(spec.range.from < spec.range.to)) {
    throw Error(ErrorCode::InvalidConfig, "sweep range needs from < to");
  }
  if (spec.range.steps < 2) {
    throw Error(ErrorCode::InvalidConfig, "sweep needs at least 2 steps");
  }
  if (!spec.g_values.empty() && spec.variable == SweepVariable::g) {
    throw Error(ErrorCode::InvalidConfig, "a g list cannot be combined with a g sweep");
  }
  if (spec.outputs.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no output columns requested");
  }
}

inline ModelParams with_variable(ModelParams p, SweepVariable v, double x) {
  switch (v) {
    case SweepVariable::T_H: p.T_H = x; break;
    case SweepVariable::g: p.g = x; break;
    case SweepVariable::T_C: p.T_C = x; break;
    case SweepVariable::T_R: p.T_R = x; break;
  }
  return p;
}

struct SweepRow {
  std::optional<double> g_line;
  double x = 0.0;
  std::array<double, 3> q_dot{};
  std::optional<double> eta;
  double sigma = 0.0;
  std::optional<double> t_virtual;
  bool refrigerator = false;
  double residual = 0.0;
  double first_law_residual = 0.0;
  double g_over_gamma = 0.0;
  double law_tolerance = 0.0;
};

struct SkippedPoint {
  std::optional<double> g_line;
  double x = 0.0;
  ErrorCode code = ErrorCode::DomainError;
  std::string reason;
};

struct SweepTable {
  SweepVariable variable = SweepVariable::T_H;
  bool multi_line = false;
  std::vector<Column> columns = default_columns();
  std::vector<SweepRow> rows;
  std::vector<SkippedPoint> skipped;
};

// |sum Q| allowed at a point: relative to the largest current, with a floor at
// the rounding level of the rates themselves.
inline double first_law_tolerance(const SteadyReport& r) {
  return 1e-12 * r.max_abs_q() + 1e-15 * r.params.max_gamma() * r.params.omega_R();
}

inline SweepRow make_row(const SteadyReport& r, std::optional<double> g_line, double x) {
  SweepRow row;
  row.g_line = g_line;
  row.x = x;
  row.q_dot = r.q_dot;
  row.eta = r.efficiency;
  row.sigma = r.entropy_production;
  row.t_virtual = r.t_virtual;
  row.refrigerator = r.refrigerator;
  row.residual = r.diagnostics.generator_residual;
  row.first_law_residual = r.diagnostics.first_law_residual;
  row.g_over_gamma = r.diagnostics.g_over_gamma;
  row.law_tolerance = first_law_tolerance(r);
  return row;
}

inline bool satisfies_laws(const SweepRow& row) {
  return row.first_law_residual <= row.law_tolerance && row.sigma >= -1e-12;
}

namespace detail {

struct GridPoint {
  std::optional<double> g_line;
  double x;
};

inline std::vector<GridPoint> grid(const SweepSpec& spec) {
  std::vector<GridPoint> pts;
  std::vector<std::optional<double>> lines;
  if (spec.g_values.empty()) {
    lines.push_back(std::nullopt);
  } else {
    for (double g : spec.g_values) lines.push_back(g);
  }
  for (const auto& line : lines) {
    for (int i = 0; i < spec.range.steps; ++i) pts.push_back({line, spec.range.at(i)});
  }
  return pts;
}

inline ModelParams point_params(const SweepSpec& spec, const GridPoint& pt) {
  ModelParams p = spec.base;
  if (pt.g_line) p.g = *pt.g_line;
  return with_variable(p, spec.variable, pt.x);
}

}  // namespace detail

// One row per grid point, ordered by (g line, grid index). Failing points are
// recorded in `skipped`; they never abort the sweep.
inline SweepTable run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  const auto pts = detail::grid(spec);

  struct Slot {
    std::optional<SweepRow> row;
    std::optional<SkippedPoint> skip;
  };
  std::vector<Slot> slots(pts.size());

  auto work = [&](std::size_t i) {
    const auto& pt = pts[i];
    try {
      const SteadyReport r = analyze(detail::point_params(spec, pt));
      SweepRow row = make_row(r, pt.g_line, pt.x);
      if (!satisfies_laws(row)) {
        slots[i].skip = SkippedPoint{pt.g_line, pt.x, ErrorCode::OracleDisagreement,
                                     "thermodynamic law check failed"};
      } else {
        slots[i].row = row;
      }
    } catch (const Error& e) {
      slots[i].skip = SkippedPoint{pt.g_line, pt.x, e.code(), e.what()};
    }
  };

  unsigned workers = spec.workers ? spec.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(pts.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < pts.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  SweepTable table;
  table.variable = spec.variable;
  table.multi_line = !spec.g_values.empty();
  table.columns = spec.outputs;
  for (auto& s : slots) {
    if (s.row) table.rows.push_back(*s.row);
    if (s.skip) table.skipped.push_back(*s.skip);
  }
  return table;
}

enum class Observable { Qdot_H, Qdot_R, Qdot_C, eta, sigma };

inline std::optional<double> observe(const SteadyReport& r, Observable o) {
  switch (o) {
    case Observable::Qdot_H: return r.q(Bath::Hot);
    case Observable::Qdot_R: return r.q(Bath::Room);
    case Observable::Qdot_C: return r.q(Bath::Cold);
    case Observable::eta: return r.efficiency;
    case Observable::sigma: return r.entropy_production;
  }
  return std::nullopt;
}

inline std::optional<double> observe(const SweepRow& row, Observable o) {
  switch (o) {
    case Observable::Qdot_H: return row.q_dot[0];
    case Observable::Qdot_R: return row.q_dot[1];
    case Observable::Qdot_C: return row.q_dot[2];
    case Observable::eta: return row.eta;
    case Observable::sigma: return row.sigma;
  }
  return std::nullopt;
}

struct ZeroCrossing {
  std::optional<double> g_line;
  double value = 0.0;
  bool rising = false;  // observable goes from negative to positive
};

// Brackets each sign change of the observable on the sweep grid and refines it
// by bisection until the bracket is at most `tolerance` wide.
// `table` must be the result of run_sweep(spec).
inline std::vector<ZeroCrossing> find_zero_crossing(const SweepSpec& spec,
                                                    const SweepTable& table,
                                                    Observable observable = Observable::Qdot_C,
                                                    double tolerance = 1e-4) {
  std::vector<ZeroCrossing> roots;

  auto eval = [&](std::optional<double> g_line, double x) -> std::optional<double> {
    ModelParams p = spec.base;
    if (g_line) p.g = *g_line;
    try {
      return observe(analyze(with_variable(p, spec.variable, x)), observable);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    const SweepRow& a = table.rows[i];
    const SweepRow& b = table.rows[i + 1];
    if (a.g_line != b.g_line) continue;
    const auto fa = observe(a, observable);
    const auto fb = observe(b, observable);
    if (!fa || !fb) continue;
    if (*fa == 0.0) {
      roots.push_back({a.g_line, a.x, *fb > 0.0});
      continue;
    }
    if (*fb == 0.0) {
      const bool line_end = i + 2 == table.rows.size() || table.rows[i + 2].g_line != b.g_line;
      if (line_end) roots.push_back({b.g_line, b.x, *fa < 0.0});
      continue;
    }
    if ((*fa < 0.0) == (*fb < 0.0)) continue;

    double lo = a.x, hi = b.x;
    double flo = *fa;
    bool ok = true;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      const auto fm = eval(a.g_line, mid);
      if (!fm) {
        ok = false;
        break;
      }
      if (*fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((*fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = *fm;
      } else {
        hi = mid;
      }
    }
    if (ok) roots.push_back({a.g_line, 0.5 * (lo + hi), *fa < 0.0});
  }
  return roots;
}

inline std::vector<ZeroCrossing> find_zero_crossing(const SweepSpec& spec,
                                                    Observable observable = Observable::Qdot_C,
                                                    double tolerance = 1e-4) {
  return find_zero_crossing(spec, run_sweep(spec), observable, tolerance);
}

// ---------------------------------------------------------------------------
// Figure presets.

struct FigurePreset {
  std::string id;
  std::string description;
  SweepSpec spec;
};

// Shared figure defaults: w_H = 3, w_C = 1, T_R = 21, T_C = 18, gamma = 0.001 w_H.
inline ModelParams figure_base() {
  ModelParams p;
  p.omega_H = 3.0;
  p.omega_C = 1.0;
  p.T_R = 21.0;
  p.T_C = 18.0;
  p.T_H = 30.0;
  p.g = 0.001 * p.omega_H;
  p.set_gamma(0.001 * p.omega_H);
  return p;
}

// [T_C, max(3 T_v, 100)]; 100 when T_v is infinite or negative. The floor of
// 100 keeps the upper Qdot_C crossing at g = 0.3 w_H (T_H ~ 93) in range.
inline SweepRange default_t_hot_range(const ModelParams& p, int steps = 200) {
  const auto tv = virtual_temperature(p);
  const double upper = (tv && *tv > 0.0) ? std::max(3.0 * *tv, 100.0) : 100.0;
  return {p.T_C, upper, steps};
}

inline std::vector<double> scaled(std::initializer_list<double> factors, double omega_H) {
  std::vector<double> out;
  // Factors are short decimals; going through integer millionths makes
  // 0.1 * 3 come out as 0.3.
  for (double f : factors) out.push_back(std::round(f * 1e6) * omega_H / 1e6);
  return out;
}

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
  return ids;
}

inline FigurePreset figure_preset(std::string_view id) {
  FigurePreset f;
  f.id = std::string(id);
  ModelParams base = figure_base();
  const double wh = base.omega_H;
  SweepSpec& s = f.spec;
  s.variable = SweepVariable::T_H;

  if (id == "fig1" || id == "fig2") {
    f.description = id == "fig1" ? "heat currents vs T_H, weak coupling g = 0.001 w_H"
                                 : "efficiency vs T_H, weak coupling g = 0.001 w_H";
  } else if (id == "fig3") {
    f.description = "Qdot_C vs T_H for several couplings";
    s.g_values = scaled({0.001, 0.1, 0.2, 0.25, 0.3, 0.35}, wh);
  } else if (id == "fig4") {
    f.description = "heat currents vs T_H, strong coupling g = 0.3 w_H";
    base.g = 0.3 * wh;
  } else if (id == "fig5") {
    f.description = "efficiency vs T_H for several couplings";
    s.g_values = scaled({0.001, 0.1, 0.15, 0.2, 0.25, 0.3}, wh);
  } else if (id == "fig6") {
    f.description = "Qdot_C vs T_H with w_C/T_C = w_R/T_R";
    base.T_C = 10.0;
    base.T_R = 40.0;
    s.g_values = scaled({0.001, 0.1, 0.2, 0.3, 0.4, 0.5}, wh);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown figure preset '" + std::string(id) + "'");
  }
  s.base = base;
  s.range = default_t_hot_range(base);
  return f;
}

}  // namespace qfridge
