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

#include "adiabound/models.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "adiabound/error.hpp"
#include "adiabound/linalg.hpp"

namespace adiabound {
namespace {

using Jet = std::array<double, 4>;  // value and first three s-derivatives

Jet harmonic_cos(double k, double s, double shift = 0.0) {
  Jet j{};
  double kn = 1.0;
  for (int n = 0; n < 4; ++n) {
    j[n] = kn * std::cos(k * s + shift + n * std::numbers::pi / 2);
    kn *= k;
  }
  return j;
}

Jet harmonic_sin(double k, double s) { return harmonic_cos(k, s, -std::numbers::pi / 2); }

Jet operator*(const Jet& f, const Jet& g) {
  static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Jet out{};
  for (int n = 0; n < 4; ++n) {
    for (int j = 0; j <= n; ++j) out[n] += binom[n][j] * f[j] * g[n - j];
  }
  return out;
}

Jet operator*(double a, Jet f) {
  for (double& x : f) x *= a;
  return f;
}

Jet operator+(Jet f, const Jet& g) {
  for (int n = 0; n < 4; ++n) f[n] += g[n];
  return f;
}

void check_order(int order, int lowest) {
  if (order < lowest || order > 3) {
    throw Error(ErrorKind::ValidationError,
                "derivative order " + std::to_string(order) + " outside supported range");
  }
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  return *it;
}

double number_field(const nlohmann::json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

}  // namespace

double SearchAnalytics::gap(double s) const {
  const double st = std::sin(theta);
  return std::sqrt(std::max(0.0, 1.0 - 4.0 * st * st * s * (1.0 - s)));
}

double SearchAnalytics::gap_dot(double s) const {
  const double st = std::sin(theta);
  return -2.0 * st * st * (1.0 - 2.0 * s) / gap(s);
}

double SearchAnalytics::phi(double s) const {
  return 0.5 * std::atan2(s * std::sin(2.0 * theta), 1.0 - s + s * std::cos(2.0 * theta));
}

double SearchAnalytics::phi_dot(double s) const {
  const double g = gap(s);
  return std::sin(2.0 * theta) / (2.0 * g * g);
}

std::pair<ComplexVector, ComplexVector> SearchAnalytics::eigenvectors(double s) const {
  const double p = phi(s);
  const double st = std::sin(theta);
  ComplexVector ground = (std::sin(theta - p) / st) * psi0 + (std::sin(p) / st) * psi1;
  ComplexVector excited = (std::cos(theta - p) / st) * psi0 - (std::cos(p) / st) * psi1;
  return {ground, excited};
}

SearchModel::SearchModel(int n) {
  if (n < 2) throw Error(ErrorKind::ValidationError, "search model needs N >= 2");
  analytics_.N = n;
  analytics_.theta = std::acos(1.0 / std::sqrt(static_cast<double>(n)));
  analytics_.psi0 = ComplexVector::Constant(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  analytics_.psi1 = ComplexVector::Zero(n);
  analytics_.psi1[0] = 1.0;
  p0_ = analytics_.psi0 * analytics_.psi0.adjoint();
  p1_ = analytics_.psi1 * analytics_.psi1.adjoint();
}

ComplexMatrix SearchModel::evaluate(double s) const {
  const int n = analytics_.N;
  return ComplexMatrix::Identity(n, n) - (1.0 - s) * p0_ - s * p1_;
}

ComplexMatrix SearchModel::derivative(double, int order) const {
  check_order(order, 1);
  if (order == 1) return p0_ - p1_;
  return ComplexMatrix::Zero(analytics_.N, analytics_.N);
}

nlohmann::json SearchModel::parameters() const { return {{"model", "search"}, {"N", analytics_.N}}; }

MarzlinSandersModel::MarzlinSandersModel(double omega0, double total_time, double softening)
    : omega0_(omega0), total_time_(total_time), softening_(softening) {
  if (!(omega0 > 0.0)) throw Error(ErrorKind::ValidationError, "omega0 must be positive");
  if (!(total_time > 0.0)) throw Error(ErrorKind::ValidationError, "Marzlin-Sanders needs T > 0");
  if (!(softening >= 0.0 && softening <= 1.0)) {
    throw Error(ErrorKind::ValidationError, "softening must lie in [0, 1]");
  }
  t_eff_ = std::pow(total_time, softening);
}

double MarzlinSandersModel::time_scale() const { return std::min(1.0, 1.0 / (omega0_ * t_eff_)); }

double MarzlinSandersModel::gap(double s) const {
  const double a = 2.0 * std::numbers::pi * std::sin(omega0_ * s * t_eff_) / t_eff_;
  return std::sqrt(omega0_ * omega0_ + a * a);
}

ComplexMatrix MarzlinSandersModel::derivative(double s, int order) const {
  check_order(order, 0);
  const double two_pi = 2.0 * std::numbers::pi;
  const double k = omega0_ * t_eff_;
  const double amp = two_pi / t_eff_;
  const Jet c = harmonic_cos(two_pi, s);
  const Jet sn = harmonic_sin(two_pi, s);
  const Jet cp = harmonic_cos(k, s);
  const Jet sp = harmonic_sin(k, s);
  const Jet spcp = sp * cp;
  const Jet bx = omega0_ * c + (-amp) * (spcp * sn);
  const Jet by = omega0_ * sn + amp * (spcp * c);
  const Jet bz = amp * (sp * sp);

  const double x = 0.5 * bx[order];
  const double y = 0.5 * by[order];
  const double z = 0.5 * bz[order];
  ComplexMatrix h(2, 2);
  h << cplx(z, 0.0), cplx(x, -y), cplx(x, y), cplx(-z, 0.0);
  return h;
}

nlohmann::json MarzlinSandersModel::parameters() const {
  return {{"model", "marzlin_sanders"}, {"omega0", omega0_}, {"T", total_time_}, {"softening", softening_}};
}

LinearInterpolationModel::LinearInterpolationModel(ComplexMatrix h0, ComplexMatrix h1)
    : h0_(std::move(h0)), h1_(std::move(h1)) {
  if (h0_.rows() != h0_.cols() || h1_.rows() != h1_.cols() || h0_.rows() != h1_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "H0 and H1 must be square and of equal size");
  }
  if (h0_.rows() < 2) throw Error(ErrorKind::DimensionMismatch, "linear model needs N >= 2");
  if (!is_hermitian(h0_)) throw Error(ErrorKind::NonHermitian, "H0 is not Hermitian");
  if (!is_hermitian(h1_)) throw Error(ErrorKind::NonHermitian, "H1 is not Hermitian");
}

ComplexMatrix LinearInterpolationModel::derivative(double, int order) const {
  check_order(order, 1);
  if (order == 1) return h1_ - h0_;
  return ComplexMatrix::Zero(h0_.rows(), h0_.cols());
}

nlohmann::json LinearInterpolationModel::parameters() const {
  return {{"model", "linear"}, {"H0", matrix_to_json(h0_)}, {"H1", matrix_to_json(h1_)}};
}

std::shared_ptr<const SearchModel> search_model(int n) { return std::make_shared<const SearchModel>(n); }

std::shared_ptr<const MarzlinSandersModel> marzlin_sanders_model(double omega0, double total_time,
                                                                 double softening) {
  return std::make_shared<const MarzlinSandersModel>(omega0, total_time, softening);
}

std::shared_ptr<const LinearInterpolationModel> linear_interpolation_model(const ComplexMatrix& h0,
                                                                           const ComplexMatrix& h1) {
  return std::make_shared<const LinearInterpolationModel>(h0, h1);
}

ComplexMatrix matrix_from_json(const nlohmann::json& rows, const std::string& field) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorKind::ParseError, "field '" + field + "' must be a non-empty array of rows");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  field + " row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& e = row[j];
      if (e.is_number()) {
        m(i, j) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw Error(ErrorKind::ParseError, field + "[" + std::to_string(i) + "][" + std::to_string(j) +
                                               "] must be [re, im] or a number");
      }
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelSpec model_from_json(const nlohmann::json& config) {
  if (!config.is_object()) throw Error(ErrorKind::ParseError, "model config must be a JSON object");
  const auto& kind_field = require(config, "model");
  if (!kind_field.is_string()) throw Error(ErrorKind::ParseError, "field 'model' must be a string");

  ModelSpec spec;
  spec.kind = kind_field.get<std::string>();
  spec.config = config;
  if (spec.kind == "search") {
    const auto& n_field = require(config, "N");
    if (!n_field.is_number_integer()) throw Error(ErrorKind::ParseError, "field 'N' must be an integer");
    ModelPtr model = search_model(n_field.get<int>());
    spec.factory = [model](double) { return model; };
  } else if (spec.kind == "marzlin_sanders") {
    const double omega0 = number_field(config, "omega0", 1.0);
    const double softening = number_field(config, "softening", 1.0);
    marzlin_sanders_model(omega0, 1.0, softening);  // validate eagerly
    spec.t_dependent = true;
    spec.factory = [omega0, softening](double t) -> ModelPtr {
      return marzlin_sanders_model(omega0, t, softening);
    };
  } else if (spec.kind == "linear") {
    ModelPtr model = linear_interpolation_model(matrix_from_json(require(config, "H0"), "H0"),
                                                matrix_from_json(require(config, "H1"), "H1"));
    spec.factory = [model](double) { return model; };
  } else if (spec.kind == "toy") {
    // E_G = 0, E_1 = 1 + s; an optional real coupling mixes the two levels.
    const double c = number_field(config, "coupling", 0.0);
    ComplexMatrix h0 = ComplexMatrix::Zero(2, 2);
    h0(0, 1) = h0(1, 0) = c;
    ComplexMatrix h1 = h0;
    h0(1, 1) = 1.0;
    h1(1, 1) = 2.0;
    ModelPtr model = linear_interpolation_model(h0, h1);
    spec.factory = [model](double) { return model; };
  } else {
    throw Error(ErrorKind::UnknownModel,
                "'" + spec.kind + "' (expected search, marzlin_sanders, linear or toy)");
  }
  return spec;
}

ModelSpec load_model(const std::string& text) {
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return model_from_json(config);
}

}  // namespace adiabound
