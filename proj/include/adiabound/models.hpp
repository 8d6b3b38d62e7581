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

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "adiabound/hamiltonian.hpp"

namespace adiabound {

/// Closed forms for H(s) = 1 - (1-s)|psi0><psi0| - s|psi1><psi1| restricted to
/// the plane spanned by psi0 (uniform superposition) and psi1 = |0>.
struct SearchAnalytics {
  int N = 0;
  double theta = 0.0;  // arccos |<psi0|psi1>|
  ComplexVector psi0;
  ComplexVector psi1;

  double gap(double s) const;
  double gap_dot(double s) const;
  double phi(double s) const;
  double phi_dot(double s) const;
  double ground_energy(double s) const { return 0.5 * (1.0 - gap(s)); }
  double excited_energy(double s) const { return 0.5 * (1.0 + gap(s)); }
  /// (|G(s)>, |1(s)>), real and continuous in s.
  std::pair<ComplexVector, ComplexVector> eigenvectors(double s) const;
};

class SearchModel final : public HamiltonianModel {
 public:
  explicit SearchModel(int n);

  int dimension() const override { return analytics_.N; }
  ComplexMatrix evaluate(double s) const override;
  ComplexMatrix derivative(double s, int order) const override;
  bool has_analytic_derivatives() const override { return true; }
  const SearchAnalytics* search_analytics() const override { return &analytics_; }
  std::string name() const override { return "search"; }
  nlohmann::json parameters() const override;

 private:
  SearchAnalytics analytics_;
  ComplexMatrix p0_;
  ComplexMatrix p1_;
};

/// Two-level counterexample, 0.5 * b(s) . sigma. The phase omega0*s*T and the
/// amplitude 2*pi/T both use T_eff = T^softening.
class MarzlinSandersModel final : public HamiltonianModel {
 public:
  MarzlinSandersModel(double omega0, double total_time, double softening = 1.0);

  int dimension() const override { return 2; }
  ComplexMatrix evaluate(double s) const override { return derivative(s, 0); }
  ComplexMatrix derivative(double s, int order) const override;
  bool has_analytic_derivatives() const override { return true; }
  bool t_dependent() const override { return true; }
  double time_scale() const override;
  std::string name() const override { return "marzlin_sanders"; }
  nlohmann::json parameters() const override;

  double effective_time() const { return t_eff_; }
  /// sqrt(omega0^2 + (2 pi sin(omega0 s T_eff) / T_eff)^2).
  double gap(double s) const;

 private:
  double omega0_;
  double total_time_;
  double softening_;
  double t_eff_;
};

class LinearInterpolationModel final : public HamiltonianModel {
 public:
  LinearInterpolationModel(ComplexMatrix h0, ComplexMatrix h1);

  int dimension() const override { return static_cast<int>(h0_.rows()); }
  ComplexMatrix evaluate(double s) const override { return (1.0 - s) * h0_ + s * h1_; }
  ComplexMatrix derivative(double s, int order) const override;
  bool has_analytic_derivatives() const override { return true; }
  std::string name() const override { return "linear"; }
  nlohmann::json parameters() const override;

 private:
  ComplexMatrix h0_;
  ComplexMatrix h1_;
};

/// lambda * H(s).
class ScaledModel final : public HamiltonianModel {
 public:
  ScaledModel(ModelPtr inner, double lambda) : inner_(std::move(inner)), lambda_(lambda) {}

  int dimension() const override { return inner_->dimension(); }
  ComplexMatrix evaluate(double s) const override { return lambda_ * inner_->evaluate(s); }
  ComplexMatrix derivative(double s, int order) const override {
    return lambda_ * inner_->derivative(s, order);
  }
  bool has_analytic_derivatives() const override { return inner_->has_analytic_derivatives(); }
  bool t_dependent() const override { return inner_->t_dependent(); }
  double time_scale() const override { return inner_->time_scale(); }
  std::string name() const override { return inner_->name() + "*scaled"; }

 private:
  ModelPtr inner_;
  double lambda_;
};

/// H(1 - s).
class ReversedModel final : public HamiltonianModel {
 public:
  explicit ReversedModel(ModelPtr inner) : inner_(std::move(inner)) {}

  int dimension() const override { return inner_->dimension(); }
  ComplexMatrix evaluate(double s) const override { return inner_->evaluate(1.0 - s); }
  ComplexMatrix derivative(double s, int order) const override {
    return (order % 2 ? -1.0 : 1.0) * inner_->derivative(1.0 - s, order);
  }
  bool has_analytic_derivatives() const override { return inner_->has_analytic_derivatives(); }
  bool t_dependent() const override { return inner_->t_dependent(); }
  double time_scale() const override { return inner_->time_scale(); }
  std::string name() const override { return inner_->name() + "*reversed"; }

 private:
  ModelPtr inner_;
};

std::shared_ptr<const SearchModel> search_model(int n);
std::shared_ptr<const MarzlinSandersModel> marzlin_sanders_model(double omega0, double total_time,
                                                                 double softening = 1.0);
std::shared_ptr<const LinearInterpolationModel> linear_interpolation_model(const ComplexMatrix& h0,
                                                                           const ComplexMatrix& h1);

/// A parsed model description. Models whose entries depend on T are built per T.
struct ModelSpec {
  std::string kind;
  nlohmann::json config;
  bool t_dependent = false;
  std::function<ModelPtr(double)> factory;

  ModelPtr build(double total_time) const { return factory(total_time); }
};

ModelSpec model_from_json(const nlohmann::json& config);
ModelSpec load_model(const std::string& text);

/// Nested arrays of [re, im] pairs (a bare number is read as a real entry).
ComplexMatrix matrix_from_json(const nlohmann::json& rows, const std::string& field);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

}  // namespace adiabound
