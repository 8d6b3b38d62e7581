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

#include "adiabound/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "adiabound/bounds.hpp"
#include "adiabound/error.hpp"
#include "adiabound/pathsum.hpp"

namespace adiabound {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kOutputNames = {"error", "bounds", "first_order", "c1", "c2", "jrs"};

bool* output_flag(SweepOutputs& o, const std::string& name) {
  if (name == "error") return &o.error;
  if (name == "bounds") return &o.bounds;
  if (name == "first_order") return &o.first_order;
  if (name == "c1") return &o.c1;
  if (name == "c2") return &o.c2;
  if (name == "jrs") return &o.jrs;
  return nullptr;
}

std::string format_double(double x) {
  if (std::isnan(x)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& field) {
  if (field.empty()) return kNaN;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) throw Error(ErrorKind::ParseError, "bad number '" + field + "'");
  return v;
}

double number(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string text(const nlohmann::json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_string()) throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

// Column accessors shared by the CSV and JSON writers.
std::vector<double*> numeric_fields(SweepRecord& r) {
  return {&r.T,      &r.error_exact, &r.first_order_norm, &r.upper, &r.lower,   &r.two_level_upper, &r.jrs,
          &r.delta0, &r.delta1,      &r.Gamma,            &r.R,     &r.c1_norm, &r.c2_norm,         &r.tail};
}

}  // namespace

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw Error(ErrorKind::ValidationError, "unknown format '" + name + "' (expected csv or json)");
}

std::vector<double> log_range(double t_min, double t_max, int points) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || points < 1) {
    throw Error(ErrorKind::ValidationError, "log range needs 0 < t_min <= t_max and points >= 1");
  }
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    out[i] = points == 1 ? t_min : t_min * std::pow(t_max / t_min, static_cast<double>(i) / (points - 1));
  }
  if (points > 1) out.back() = t_max;
  return out;
}

SweepConfig parse_config(const std::string& text_in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text_in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return config_from_json(doc);
}

SweepConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
  static const std::set<std::string> known = {"model", "T",       "t_min",  "t_max", "points", "schedule",
                                              "rel_tol", "quad_tol", "outputs", "format", "out",    "jobs"};
  std::vector<std::string> problems;
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) problems.push_back("unknown field '" + key + "'");
  }

  SweepConfig cfg;
  if (!doc.contains("model")) throw Error(ErrorKind::ParseError, "missing field 'model'");
  cfg.model_config = doc.at("model");
  cfg.model = model_from_json(cfg.model_config);

  const bool has_list = doc.contains("T");
  const bool has_range = doc.contains("t_min") || doc.contains("t_max") || doc.contains("points");
  if (has_list && has_range) problems.push_back("give either 'T' or 't_min'/'t_max'/'points', not both");
  if (!has_list && !has_range) problems.push_back("no T values ('T' or 't_min'/'t_max'/'points')");
  if (has_list) {
    const auto& list = doc.at("T");
    if (list.is_number()) {
      cfg.T = {list.get<double>()};
    } else if (list.is_array()) {
      for (const auto& v : list) {
        if (!v.is_number()) throw Error(ErrorKind::ParseError, "field 'T' must hold numbers");
        cfg.T.push_back(v.get<double>());
      }
    } else {
      throw Error(ErrorKind::ParseError, "field 'T' must be a number or an array of numbers");
    }
    if (cfg.T.empty()) problems.push_back("'T' is empty");
    for (double t : cfg.T) {
      if (!(t > 0.0) || !std::isfinite(t)) problems.push_back("T value " + format_double(t) + " is not positive");
    }
  }
  if (has_range && !has_list) {
    const double t_min = number(doc, "t_min", kNaN);
    const double t_max = number(doc, "t_max", kNaN);
    const auto& pts = doc.contains("points") ? doc.at("points") : nlohmann::json(1);
    if (!pts.is_number_integer()) throw Error(ErrorKind::ParseError, "field 'points' must be an integer");
    const int points = pts.get<int>();
    bool ok = true;
    if (!(t_min > 0.0)) problems.push_back("'t_min' must be positive"), ok = false;
    if (!(t_max >= t_min)) problems.push_back("'t_max' must be >= 't_min'"), ok = false;
    if (points < 1) problems.push_back("'points' must be >= 1"), ok = false;
    if (ok) cfg.T = log_range(t_min, t_max, points);
  }
  std::sort(cfg.T.begin(), cfg.T.end());
  cfg.T.erase(std::unique(cfg.T.begin(), cfg.T.end()), cfg.T.end());

  const std::string default_schedule = cfg.model.kind == "search" ? "phi" : "uniform";
  try {
    cfg.schedule = schedule_kind_from_string(text(doc, "schedule", default_schedule));
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  cfg.rel_tol = number(doc, "rel_tol", cfg.rel_tol);
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) problems.push_back("'rel_tol' must lie in (0, 1)");
  cfg.quad_tol = number(doc, "quad_tol", cfg.quad_tol);
  if (!(cfg.quad_tol > 0.0 && cfg.quad_tol < 1.0)) problems.push_back("'quad_tol' must lie in (0, 1)");

  if (doc.contains("outputs")) {
    const auto& outs = doc.at("outputs");
    if (!outs.is_array()) throw Error(ErrorKind::ParseError, "field 'outputs' must be an array of names");
    cfg.outputs = SweepOutputs{false, false, false, false, false, false};
    for (const auto& o : outs) {
      if (!o.is_string()) throw Error(ErrorKind::ParseError, "field 'outputs' must be an array of names");
      bool* flag = output_flag(cfg.outputs, o.get<std::string>());
      if (flag) {
        *flag = true;
      } else {
        problems.push_back("unknown output '" + o.get<std::string>() + "'");
      }
    }
  }
  try {
    cfg.format = output_format_from_string(text(doc, "format", "csv"));
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  cfg.out_path = text(doc, "out", "");
  if (doc.contains("jobs")) {
    if (!doc.at("jobs").is_number_integer()) throw Error(ErrorKind::ParseError, "field 'jobs' must be an integer");
    cfg.jobs = doc.at("jobs").get<int>();
    if (cfg.jobs < 1) problems.push_back("'jobs' must be >= 1");
  }

  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorKind::ValidationError, msg);
  }
  return cfg;
}

nlohmann::json config_to_json(const SweepConfig& config) {
  nlohmann::json doc;
  doc["model"] = config.model_config;
  doc["T"] = config.T;
  doc["schedule"] = std::string(to_string(config.schedule));
  doc["rel_tol"] = config.rel_tol;
  doc["quad_tol"] = config.quad_tol;
  nlohmann::json outs = nlohmann::json::array();
  SweepOutputs o = config.outputs;
  for (const auto& name : kOutputNames) {
    if (*output_flag(o, name)) outs.push_back(name);
  }
  doc["outputs"] = outs;
  doc["format"] = std::string(to_string(config.format));
  doc["out"] = config.out_path;
  doc["jobs"] = config.jobs;
  return doc;
}

SweepRecord::SweepRecord()
    : error_exact(kNaN),
      first_order_norm(kNaN),
      upper(kNaN),
      lower(kNaN),
      two_level_upper(kNaN),
      jrs(kNaN),
      delta0(kNaN),
      delta1(kNaN),
      Gamma(kNaN),
      R(kNaN),
      c1_norm(kNaN),
      c2_norm(kNaN),
      tail(kNaN) {}

SweepRecord run_point(const SweepConfig& config, double total_time) {
  SweepRecord rec;
  rec.T = total_time;
  const SweepOutputs& want = config.outputs;
  try {
    const ModelPtr model = config.model.build(total_time);
    if (want.error) {
      AdaptiveOptions opts;
      opts.rel_tol = config.rel_tol;
      const EvolutionResult ev = evolve_adaptive(*model, total_time, config.schedule, opts);
      rec.L_used = ev.L_used;
      rec.error_exact = ev.error;
    }
    if (want.bounds) {
      const BoundReport b = theorem_bounds(*model, total_time);
      rec.first_order_norm = b.leading_norm;
      rec.upper = b.upper;
      rec.lower = b.lower;
      rec.two_level_upper = b.two_level_upper;
      rec.delta0 = b.delta0;
      rec.delta1 = b.delta1;
      rec.Gamma = b.Gamma;
      rec.R = b.R;
      rec.tail = b.tail;
      if (want.jrs) rec.jrs = b.jrs;
    } else {
      if (want.first_order) rec.first_order_norm = first_order_term(*model, total_time).norm;
      if (want.jrs) rec.jrs = jrs_bound(*model, total_time);
    }
    if (want.c1 || want.c2) {
      JumpOptions jo;
      jo.quad_tol = config.quad_tol;
      const auto c = jump_contributions(*model, total_time, want.c2 ? 2 : 1, jo);
      if (want.c1) rec.c1_norm = c[0].norm;
      if (want.c2) rec.c2_norm = c[1].norm;
    }
  } catch (const Error& e) {
    rec.status = std::string(to_string(e.kind()));
    rec.message = e.what();
  } catch (const std::exception& e) {
    rec.status = "InternalError";
    rec.message = e.what();
  }
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  std::vector<double> ts = config.T;
  std::sort(ts.begin(), ts.end());
  std::vector<SweepRecord> out(ts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ts.size(); i = next++) out[i] = run_point(config, ts[i]);
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(1, ts.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "T",      "L_used", "error_exact", "first_order_norm", "upper",   "lower",   "two_level_upper", "jrs",
      "delta0", "delta1", "Gamma",       "R",                "c1_norm", "c2_norm", "tail",            "status"};
  return cols;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (SweepRecord r : records) {
    const auto f = numeric_fields(r);
    out << format_double(*f[0]) << ',' << r.L_used;
    for (std::size_t i = 1; i < f.size(); ++i) out << ',' << format_double(*f[i]);
    out << ',' << r.status << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<SweepRecord>& records) {
  const auto& cols = record_columns();
  out << "[";
  for (std::size_t k = 0; k < records.size(); ++k) {
    SweepRecord r = records[k];
    const auto f = numeric_fields(r);
    out << (k ? ",\n  {" : "\n  {");
    std::size_t fi = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out << (c ? ", " : "") << '"' << cols[c] << "\": ";
      if (cols[c] == "L_used") {
        out << r.L_used;
      } else if (cols[c] == "status") {
        out << nlohmann::json(r.status).dump();
      } else {
        const double v = *f[fi++];
        out << (std::isnan(v) ? std::string("null") : format_double(v));
      }
    }
    if (!r.message.empty()) out << ", \"message\": " << nlohmann::json(r.message).dump();
    out << "}";
  }
  out << (records.empty() ? "]\n" : "\n]\n");
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  const auto& cols = record_columns();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty CSV");
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
  if (line != expected) throw Error(ErrorKind::ParseError, "unexpected CSV header '" + line + "'");
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != cols.size()) {
      throw Error(ErrorKind::ParseError, "CSV row " + std::to_string(out.size() + 1) + " has " +
                                             std::to_string(fields.size()) + " fields");
    }
    SweepRecord r;
    auto f = numeric_fields(r);
    *f[0] = parse_double(fields[0]);
    r.L_used = std::stoll(fields[1]);
    for (std::size_t i = 1; i < f.size(); ++i) *f[i] = parse_double(fields[i + 1]);
    r.status = fields.back();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRecord> records_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error(ErrorKind::ParseError, "records must be a JSON array");
  const auto& cols = record_columns();
  std::vector<SweepRecord> out;
  for (const auto& obj : doc) {
    SweepRecord r;
    auto f = numeric_fields(r);
    std::size_t fi = 0;
    for (const auto& c : cols) {
      if (!obj.contains(c)) throw Error(ErrorKind::ParseError, "record lacks '" + c + "'");
      const auto& v = obj.at(c);
      if (c == "L_used") {
        r.L_used = v.get<long long>();
      } else if (c == "status") {
        r.status = v.get<std::string>();
      } else {
        *f[fi++] = v.is_null() ? kNaN : v.get<double>();
      }
    }
    if (obj.contains("message")) r.message = obj.at("message").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::string& path) {
  auto write = [&](std::ostream& os) {
    if (format == OutputFormat::Csv) {
      write_csv(os, records);
    } else {
      write_json(os, records);
    }
  };
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  write(file);
  file.close();
  if (!file) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace adiabound
