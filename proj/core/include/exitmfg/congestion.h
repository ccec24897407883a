// Copyright 2026 The exitmfg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXITMFG_CONGESTION_H_
#define EXITMFG_CONGESTION_H_

#include <string>

#include "exitmfg/domain.h"
#include "exitmfg/hypotheses.h"
#include "exitmfg/measures.h"

namespace exitmfg {

// Speed as a function of the averaged density s >= 0.
struct Kappa {
  enum class Family { kConstant, kAffineClamped, kExponential };

  Family family = Family::kConstant;
  double a = 1.0;
  double b = 0.0;
  double floor = 0.0;

  static Kappa Constant(double value);
  // max(floor, a - b s).
  static Kappa AffineClamped(double a, double b, double floor);
  // a exp(-b s).
  static Kappa Exponential(double a, double b);

  double operator()(double s) const;
  double Lipschitz() const;
  std::string Describe() const;
};

// Interaction kernel chi(x, y), a function of d(x, y).
struct Chi {
  enum class Family { kConstant, kIndicatorBall, kGaussian };

  Family family = Family::kConstant;
  double amplitude = 1.0;
  double radius = 0.0;
  double sigma = 1.0;

  static Chi Constant(double value);
  static Chi IndicatorBall(double radius, double amplitude = 1.0);
  // amplitude * exp(-d^2 / (2 sigma^2)).
  static Chi Gaussian(double sigma, double amplitude = 1.0);

  double operator()(double distance) const;
  double Sup() const { return amplitude; }
  // Infinite for the indicator ball.
  double Lipschitz() const;
  std::string Describe() const;
};

// Weight eta(y), a function of d(y, Gamma).
struct Eta {
  enum class Family { kConstant, kTaper };

  Family family = Family::kConstant;
  double value = 1.0;
  double rho = 0.0;

  static Eta Constant(double value);
  // value * min(1, d(y, Gamma) / rho).
  static Eta Taper(double value, double rho);

  double operator()(double distance_to_target) const;
  double Sup() const { return value; }
  std::string Describe() const;
};

struct LipschitzEstimate {
  double value = 0.0;
  // False when the kernel is not Lipschitz in the continuum and `value` is a
  // grid-scale surrogate.
  bool certified = true;
  std::string warning;
};

// K(mu, x) = kappa( sum_i w_i chi(x, x_i) eta(x_i) ).
class CongestionKernel {
 public:
  // Throws HypothesisError when kappa is not positive on [0, M].
  CongestionKernel(Kappa kappa, Chi chi, Eta eta);

  const Kappa& kappa() const { return kappa_; }
  const Chi& chi() const { return chi_; }
  const Eta& eta() const { return eta_; }

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  // M = sup chi * sup eta.
  double density_bound() const { return density_bound_; }

  // True when K does not depend on the measure.
  bool IsConstant() const;
  // True when chi is outside the Lipschitz families the theory covers.
  bool OutsideHypothesisCoverage() const;

  double AveragedDensity(const SpatialDomain& domain,
                         const ParticleMeasure& mu, const Point& x) const;
  // Requires unit mass within 1e-12.
  double EvalSpeed(const SpatialDomain& domain, const ParticleMeasure& mu,
                   const Point& x) const;
  double EvalSpeed(const SpatialDomain& domain, const ParticleMeasure& mu,
                   NodeId x) const;

  // Bound on |K(mu, x1) - K(mu, x2)| / d(x1, x2) on the R-ball. The indicator
  // ball gets the surrogate Lip(kappa) * sup chi * sup eta / resolution.
  LipschitzEstimate EstimateLipschitz(double radius, double resolution) const;

  // Bound on the error of evaluating on the node histogram of mu instead of
  // mu itself.
  double BinningErrorBound(double resolution) const;

  std::string Describe() const;

 private:
  Kappa kappa_;
  Chi chi_;
  Eta eta_;
  double density_bound_ = 0.0;
  double k_min_ = 0.0;
  double k_max_ = 0.0;
};

// L_g * k_max < 1.
bool CheckSmallness(const CongestionKernel& kernel, const ExitCost& cost);

// Checks on the kernel: positive bounds, spatial regularity and smallness.
HypothesisReport ValidateKernel(const CongestionKernel& kernel,
                                const ExitCost& cost, double resolution);

}  // namespace exitmfg

#endif  // EXITMFG_CONGESTION_H_
