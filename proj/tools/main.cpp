// Copyright 2026 The adiabound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// adiabound command-line front end.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "adiabound/bounds.hpp"
#include "adiabound/error.hpp"
#include "adiabound/models.hpp"
#include "adiabound/pathsum.hpp"
#include "adiabound/propagator.hpp"
#include "adiabound/sweep.hpp"

using namespace adiabound;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

using Cell = std::variant<double, long long, std::string, bool>;

// Small row-oriented table shared by the non-sweep subcommands.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c, bool json) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return json ? "null" : "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const std::string& s = std::get<std::string>(c);
  return json ? nlohmann::json(s).dump() : s;
}

void write_table(std::ostream& out, const Table& t, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i], false);
      out << '\n';
    }
    return;
  }
  out << '[';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << (r ? ",\n  {" : "\n  {");
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out << (i ? ", " : "") << '"' << t.columns[i] << "\": " << cell_text(t.rows[r][i], true);
    }
    out << '}';
  }
  out << (t.rows.empty() ? "]\n" : "\n]\n");
}

void output_table(const Table& t, OutputFormat format, const std::string& path) {
  if (path.empty() || path == "-") {
    write_table(std::cout, t, format);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  write_table(file, t, format);
  if (!file) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, what + ": " + e.what());
  }
}

// Flags shared by every subcommand that needs a model.
struct ModelFlags {
  std::string config_path;
  std::string model;
  std::string model_file;
  std::optional<int> n;
  std::optional<double> omega0;
  std::optional<double> softening;
  std::optional<double> coupling;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON sweep config; its model and T values are used as defaults");
    app->add_option("--model", model, "Model kind: search, marzlin_sanders, linear or toy");
    app->add_option("--model-file", model_file, "JSON file holding a model object (needed for linear)");
    app->add_option("--N", n, "Search dimension");
    app->add_option("--omega0", omega0, "Marzlin-Sanders frequency");
    app->add_option("--softening", softening, "Marzlin-Sanders exponent a (T_eff = T^a)");
    app->add_option("--coupling", coupling, "Toy-model off-diagonal coupling");
  }

  nlohmann::json config_doc() const {
    return config_path.empty() ? nlohmann::json::object() : parse_json_text(read_file(config_path), config_path);
  }

  /// Model JSON from flags, else from the config document, else `fallback`.
  nlohmann::json model_json(const nlohmann::json& doc, const char* fallback = nullptr) const {
    nlohmann::json m;
    if (!model_file.empty()) {
      m = parse_json_text(read_file(model_file), model_file);
    } else if (!model.empty()) {
      m = {{"model", model}};
    } else if (doc.contains("model")) {
      m = doc.at("model");
    } else if (fallback) {
      m = {{"model", fallback}};
    } else {
      throw Error(ErrorKind::ValidationError, "no model given (use --model, --model-file or --config)");
    }
    if (!m.is_object()) throw Error(ErrorKind::ParseError, "model must be a JSON object");
    if (n) m["N"] = *n;
    if (omega0) m["omega0"] = *omega0;
    if (softening) m["softening"] = *softening;
    if (coupling) m["coupling"] = *coupling;
    return m;
  }
};

struct TimeFlags {
  std::vector<double> T;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<int> points;

  void attach(CLI::App* app) {
    app->add_option("--T", T, "Comma-separated total times")->delimiter(',');
    app->add_option("--t-min", t_min, "Smallest T of a log-spaced range");
    app->add_option("--t-max", t_max, "Largest T of a log-spaced range");
    app->add_option("--points", points, "Number of T values in the range");
  }

  bool given() const { return !T.empty() || t_min || t_max || points; }

  /// Writes the time fields into a config document, replacing whatever was there.
  void apply(nlohmann::json& doc) const {
    if (!given()) return;
    for (const char* k : {"T", "t_min", "t_max", "points"}) doc.erase(k);
    if (!T.empty()) doc["T"] = T;
    if (t_min) doc["t_min"] = *t_min;
    if (t_max) doc["t_max"] = *t_max;
    if (points) doc["points"] = *points;
  }
};

std::vector<double> resolve_times(const TimeFlags& flags, const nlohmann::json& doc) {
  nlohmann::json t = nlohmann::json::object();
  for (const char* k : {"T", "t_min", "t_max", "points"}) {
    if (doc.contains(k)) t[k] = doc.at(k);
  }
  flags.apply(t);
  t["model"] = {{"model", "search"}, {"N", 2}};
  return config_from_json(t).T;
}

int sweep_command(const ModelFlags& mf, const TimeFlags& tf, const std::optional<std::string>& schedule,
                  const std::optional<double>& rel_tol, const std::optional<double>& quad_tol,
                  const std::vector<std::string>& outputs, const std::optional<std::string>& format,
                  const std::optional<std::string>& out, const std::optional<int>& jobs) {
  nlohmann::json doc = mf.config_doc();
  if (!mf.model.empty() || !mf.model_file.empty() || mf.n || mf.omega0 || mf.softening || mf.coupling) {
    doc["model"] = mf.model_json(doc);
  }
  tf.apply(doc);
  if (schedule) doc["schedule"] = *schedule;
  if (rel_tol) doc["rel_tol"] = *rel_tol;
  if (quad_tol) doc["quad_tol"] = *quad_tol;
  if (!outputs.empty()) doc["outputs"] = outputs;
  if (format) doc["format"] = *format;
  if (out) doc["out"] = *out;
  if (jobs) doc["jobs"] = *jobs;
  const SweepConfig cfg = config_from_json(doc);
  const auto records = run_sweep(cfg);
  emit(records, cfg.format, cfg.out_path);
  int code = 0;
  for (const auto& r : records) {
    if (r.ok()) continue;
    std::cerr << "T=" << r.T << ": " << r.message << '\n';
    code = kExitNumerical;
  }
  return code;
}

int bounds_command(const ModelFlags& mf, const TimeFlags& tf, int jrs_m, bool finite_difference,
                   const std::string& format, const std::string& out) {
  const nlohmann::json doc = mf.config_doc();
  const ModelSpec spec = model_from_json(mf.model_json(doc));
  const std::vector<double> times = resolve_times(tf, doc);
  BoundOptions opts;
  opts.jrs_m = jrs_m;
  opts.derivatives.force_finite_difference = finite_difference;
  Table t;
  t.columns = {"T",     "h1",     "h2", "h3", "gamma_min", "ground_gap_min", "delta0",       "delta1",
               "Gamma", "R",      "R0", "C2_bound", "tail", "leading_norm", "lower", "upper", "two_level_upper",
               "jrs",   "two_level", "t_dependent", "derivatives"};
  for (double T : times) {
    const BoundReport r = theorem_bounds(*spec.build(T), T, opts);
    t.rows.push_back({r.T, r.norms.h1, r.norms.h2, r.norms.h3, r.gamma_min, r.ground_gap_min, r.delta0, r.delta1,
                      r.Gamma, r.R, r.R0, r.C2_bound, r.tail, r.leading_norm, r.lower, r.upper, r.two_level_upper,
                      r.jrs, r.two_level, r.t_dependent, std::string(to_string(r.norms.method))});
  }
  output_table(t, output_format_from_string(format), out);
  return 0;
}

int simulate_command(const ModelFlags& mf, double T, const std::string& method, const std::string& schedule,
                     double rel_tol, const std::optional<double>& state_tol, double rk_tol,
                     const std::string& state_out, const std::string& format, const std::string& out) {
  const nlohmann::json doc = mf.config_doc();
  const ModelSpec spec = model_from_json(mf.model_json(doc));
  if (!(T >= 0.0)) throw Error(ErrorKind::ValidationError, "--T must be >= 0");
  const ModelPtr model = spec.build(T);
  EvolutionResult r;
  if (method == "adaptive") {
    AdaptiveOptions opts;
    opts.rel_tol = rel_tol;
    opts.state_tol = state_tol;
    r = evolve_adaptive(*model, T, schedule_kind_from_string(schedule), opts);
  } else if (method == "rk") {
    RkOptions opts;
    opts.tol = rk_tol;
    r = evolve_rk(*model, T, opts);
  } else {
    throw Error(ErrorKind::ValidationError, "unknown --method '" + method + "' (expected adaptive or rk)");
  }
  Table t;
  t.columns = {"T", "method", "L_used", "accepted_steps", "rejected_steps", "error", "norm_drift"};
  t.rows.push_back({T, r.method, static_cast<long long>(r.L_used), static_cast<long long>(r.accepted_steps),
                    static_cast<long long>(r.rejected_steps), r.error, r.norm_drift});
  output_table(t, output_format_from_string(format), out);
  if (!state_out.empty()) {
    std::ofstream file(state_out);
    if (!file) throw Error(ErrorKind::IoError, "cannot open '" + state_out + "' for writing");
    std::vector<cplx> amps(r.final_state.data(), r.final_state.data() + r.final_state.size());
    write_complex_csv(file, amps);
  }
  return 0;
}

int phases_command(const ModelFlags& mf, double T, int count, const std::string& format, const std::string& out) {
  const nlohmann::json doc = mf.config_doc();
  const ModelSpec spec = model_from_json(mf.model_json(doc, "toy"));
  if (count < 2) throw Error(ErrorKind::ValidationError, "--count must be >= 2");
  const auto phasors = one_jump_phasors(*spec.build(T), T, count);
  Table t;
  t.columns = {"index", "re", "im"};
  for (std::size_t i = 0; i < phasors.size(); ++i) {
    t.rows.push_back({static_cast<long long>(i), phasors[i].real(), phasors[i].imag()});
  }
  output_table(t, output_format_from_string(format), out);
  const cplx sum = std::accumulate(phasors.begin(), phasors.end(), cplx(0.0));
  std::fprintf(stderr, "|sum| = %.17g, |mean| = %.17g\n", std::abs(sum), std::abs(sum) / count);
  return 0;
}

int lemma1_command(const ModelFlags& mf, const std::vector<int>& labels, const std::vector<double>& times,
                   const std::vector<int>& ls, bool snap, const std::string& format, const std::string& out) {
  const nlohmann::json doc = mf.config_doc();
  const ModelSpec spec = model_from_json(mf.model_json(doc));
  if (spec.t_dependent) throw Error(ErrorKind::ValidationError, "lemma1 needs a model that does not depend on T");
  const ModelPtr model = spec.build(1.0);
  JumpPath path;
  path.labels = labels;
  path.times = {0.0};
  path.times.insert(path.times.end(), times.begin(), times.end());
  Table t;
  t.columns = {"L", "residual", "normalized_residual", "ratio", "snapped"};
  double prev = std::nan("");
  for (int L : ls) {
    const PathProductCheck c = path_product_check(*model, path, L, snap);
    t.rows.push_back({static_cast<long long>(L), c.residual, c.normalized_residual, prev / c.normalized_residual,
                      c.snapped});
    prev = c.normalized_residual;
  }
  output_table(t, output_format_from_string(format), out);
  return 0;
}

int cancel_command(const ModelFlags& mf, int n, const std::string& format, const std::string& out) {
  const nlohmann::json doc = mf.config_doc();
  const ModelSpec spec = model_from_json(mf.model_json(doc));
  if (spec.t_dependent) throw Error(ErrorKind::NotApplicable, "cancellation times need a T-independent model");
  const CancellationTimes c = cancellation_times(*spec.build(1.0), n);
  Table t;
  t.columns = {"n", "T", "kappa"};
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    t.rows.push_back({static_cast<long long>(i + 1), c.times[i], c.kappa});
  }
  output_table(t, output_format_from_string(format), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic error bounds: exact evolution, leading-order terms and rigorous bounds"};
  app.require_subcommand(1);

  ModelFlags mf;
  TimeFlags tf;
  std::string format = "csv";
  std::string out;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format: csv or json")->capture_default_str();
    sub->add_option("--out", out, "Output path (standard output when omitted)");
  };

  auto* sweep = app.add_subcommand("sweep", "Exact error, bounds and leading terms over a list of T");
  mf.attach(sweep);
  tf.attach(sweep);
  std::optional<std::string> sw_schedule, sw_format, sw_out;
  std::optional<double> sw_rel_tol, sw_quad_tol;
  std::optional<int> sw_jobs;
  std::vector<std::string> sw_outputs;
  sweep->add_option("--schedule", sw_schedule, "Step placement: uniform or phi");
  sweep->add_option("--rel-tol", sw_rel_tol, "Relative change accepted between L doublings (default 0.01)");
  sweep->add_option("--quad-tol", sw_quad_tol, "Tolerance for the jump-contribution quadrature (default 1e-8)");
  sweep->add_option("--outputs", sw_outputs, "Columns to fill: error,bounds,first_order,c1,c2,jrs")->delimiter(',');
  sweep->add_option("--format", sw_format, "Output format: csv or json (default csv)");
  sweep->add_option("--out", sw_out, "Output path (standard output when omitted)");
  sweep->add_option("--jobs", sw_jobs, "Worker threads (default 1)");

  auto* bounds = app.add_subcommand("bounds", "Closed-form bounds, timescales and the JRS comparison");
  mf.attach(bounds);
  tf.attach(bounds);
  int jrs_m = 1;
  bool finite_difference = false;
  bounds->add_option("--jrs-m", jrs_m, "Degeneracy m in the JRS bound")->capture_default_str();
  bounds->add_flag("--finite-difference", finite_difference, "Differentiate the model numerically");
  add_output(bounds);

  auto* simulate = app.add_subcommand("simulate", "Evolve the ground state and report the adiabatic error");
  mf.attach(simulate);
  double sim_T = 0.0;
  std::string method = "adaptive", schedule = "uniform", state_out;
  double rel_tol = 0.01, rk_tol = 1e-10;
  std::optional<double> state_tol;
  simulate->add_option("--T", sim_T, "Total time")->required();
  simulate->add_option("--method", method, "adaptive (product formula) or rk")->capture_default_str();
  simulate->add_option("--schedule", schedule, "Step placement for the product formula")->capture_default_str();
  simulate->add_option("--rel-tol", rel_tol, "Relative error change between doublings")->capture_default_str();
  simulate->add_option("--state-tol", state_tol, "Also require ||psi(2L) - psi(L)|| below this");
  simulate->add_option("--rk-tol", rk_tol, "Runge-Kutta local tolerance")->capture_default_str();
  simulate->add_option("--state-out", state_out, "Write the final state as index,re,im CSV");
  add_output(simulate);

  auto* phases = app.add_subcommand("phases", "Phasors exp(-iT int_s^1 (E_1 - E_G)) at evenly spaced jump times");
  mf.attach(phases);
  double ph_T = 1.0;
  int count = 21;
  phases->add_option("--T", ph_T, "Total time")->required();
  phases->add_option("--count", count, "Number of jump times")->capture_default_str();
  add_output(phases);

  auto* lemma1 = app.add_subcommand("lemma1", "Projector product along a jump path against its beta-product form");
  mf.attach(lemma1);
  std::vector<int> labels{0, 1};
  std::vector<double> times{0.5};
  std::vector<int> ls{512, 1024, 2048};
  bool snap = false;
  lemma1->add_option("--path", labels, "Level labels starting at 0 (the ground level)")->delimiter(',');
  lemma1->add_option("--times", times, "Jump times in (0, 1]")->delimiter(',');
  lemma1->add_option("--L", ls, "Numbers of projector blocks")->delimiter(',');
  lemma1->add_flag("--snap", snap, "Round jump times to the nearest grid point");
  add_output(lemma1);

  auto* cancel = app.add_subcommand("cancel", "Times where the leading error term vanishes");
  mf.attach(cancel);
  int n_max = 3;
  cancel->add_option("--n", n_max, "How many times to list")->capture_default_str();
  add_output(cancel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (sweep->parsed()) {
      return sweep_command(mf, tf, sw_schedule, sw_rel_tol, sw_quad_tol, sw_outputs, sw_format, sw_out, sw_jobs);
    }
    if (bounds->parsed()) return bounds_command(mf, tf, jrs_m, finite_difference, format, out);
    if (simulate->parsed()) {
      return simulate_command(mf, sim_T, method, schedule, rel_tol, state_tol, rk_tol, state_out, format, out);
    }
    if (phases->parsed()) return phases_command(mf, ph_T, count, format, out);
    if (lemma1->parsed()) return lemma1_command(mf, labels, times, ls, snap, format, out);
    if (cancel->parsed()) return cancel_command(mf, n_max, format, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
