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


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adiabound/models.hpp"
#include "adiabound/propagator.hpp"

namespace adiabound {

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& name);

/// Which columns a sweep fills. Columns left off are written as empty (CSV) or null (JSON).
struct SweepOutputs {
  bool error = true;
  bool bounds = true;
  bool first_order = true;
  bool c1 = false;
  bool c2 = false;
  bool jrs = true;
};

struct SweepConfig {
  nlohmann::json model_config;
  ModelSpec model;
  std::vector<double> T;  // positive, ascending, no repeats
  ScheduleKind schedule = ScheduleKind::Uniform;
  double rel_tol = 0.01;
  double quad_tol = 1e-8;
  SweepOutputs outputs;
  std::string out_path;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  int jobs = 1;
};

/// T_i = t_min (t_max / t_min)^(i / (points - 1)); a single point gives {t_min}.
std::vector<double> log_range(double t_min, double t_max, int points);

/// Reads a JSON sweep description. Errors: ParseError (malformed JSON or a
/// field of the wrong type), ValidationError (all range violations at once).
SweepConfig parse_config(const std::string& text);
SweepConfig config_from_json(const nlohmann::json& doc);
/// Fully resolved form (explicit T list, every default spelled out).
nlohmann::json config_to_json(const SweepConfig& config);

struct SweepRecord {
  double T = 0.0;
  long long L_used = 0;
  double error_exact;
  double first_order_norm;
  double upper;
  double lower;
  double two_level_upper;
  double jrs;
  double delta0;
  double delta1;
  double Gamma;
  double R;
  double c1_norm;
  double c2_norm;
  double tail;
  std::string status = "ok";  // "ok" or the ErrorKind name of the failure
  std::string message;

  SweepRecord();
  bool ok() const { return status == "ok"; }
};

/// One record per T, fields computed in the order error, bounds, first order,
/// jump contributions. A failure keeps the fields computed before it.
SweepRecord run_point(const SweepConfig& config, double total_time);

/// Records come back in ascending T whatever the worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

/// CSV column order.
const std::vector<std::string>& record_columns();

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
void write_json(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);
std::vector<SweepRecord> records_from_json(const nlohmann::json& doc);

/// Writes to `path`, or to standard output when it is empty or "-". Throws IoError.
void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::string& path);

}  // namespace adiabound
