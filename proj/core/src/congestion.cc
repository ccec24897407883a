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

#include "exitmfg/congestion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw PreconditionError(std::string(what) + " must be finite");
  }
}

std::string Format(const char* fmt, double a, double b = 0.0,
                   double c = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

}  // namespace

Kappa Kappa::Constant(double value) {
  RequireFinite(value, "kappa value");
  Kappa k;
  k.family = Family::kConstant;
  k.a = value;
  return k;
}

Kappa Kappa::AffineClamped(double a, double b, double floor) {
  RequireFinite(a, "kappa intercept");
  RequireFinite(b, "kappa slope");
  RequireFinite(floor, "kappa floor");
  if (b < 0.0) throw PreconditionError("kappa must be nonincreasing (b >= 0)");
  Kappa k;
  k.family = Family::kAffineClamped;
  k.a = a;
  k.b = b;
  k.floor = floor;
  return k;
}

Kappa Kappa::Exponential(double a, double b) {
  RequireFinite(a, "kappa scale");
  RequireFinite(b, "kappa rate");
  if (b < 0.0) throw PreconditionError("kappa must be nonincreasing (b >= 0)");
  Kappa k;
  k.family = Family::kExponential;
  k.a = a;
  k.b = b;
  return k;
}

double Kappa::operator()(double s) const {
  switch (family) {
    case Family::kConstant:
      return a;
    case Family::kAffineClamped:
      return std::max(floor, a - b * s);
    case Family::kExponential:
      return a * std::exp(-b * s);
  }
  return a;
}

double Kappa::Lipschitz() const {
  switch (family) {
    case Family::kConstant:
      return 0.0;
    case Family::kAffineClamped:
      return b;
    case Family::kExponential:
      return std::abs(a) * b;
  }
  return 0.0;
}

std::string Kappa::Describe() const {
  switch (family) {
    case Family::kConstant:
      return Format("constant %.6g", a);
    case Family::kAffineClamped:
      return Format("max(%.6g, %.6g - %.6g s)", floor, a, b);
    case Family::kExponential:
      return Format("%.6g exp(-%.6g s)", a, b);
  }
  return "";
}

Chi Chi::Constant(double value) {
  RequireFinite(value, "chi value");
  if (value < 0.0) throw PreconditionError("chi must be nonnegative");
  Chi c;
  c.family = Family::kConstant;
  c.amplitude = value;
  return c;
}

Chi Chi::IndicatorBall(double radius, double amplitude) {
  RequireFinite(radius, "chi radius");
  RequireFinite(amplitude, "chi amplitude");
  if (radius < 0.0 || amplitude < 0.0) {
    throw PreconditionError("indicator radius and amplitude must be >= 0");
  }
  Chi c;
  c.family = Family::kIndicatorBall;
  c.radius = radius;
  c.amplitude = amplitude;
  return c;
}

Chi Chi::Gaussian(double sigma, double amplitude) {
  RequireFinite(sigma, "chi width");
  RequireFinite(amplitude, "chi amplitude");
  if (!(sigma > 0.0) || amplitude < 0.0) {
    throw PreconditionError("Gaussian width must be > 0, amplitude >= 0");
  }
  Chi c;
  c.family = Family::kGaussian;
  c.sigma = sigma;
  c.amplitude = amplitude;
  return c;
}

double Chi::operator()(double distance) const {
  switch (family) {
    case Family::kConstant:
      return amplitude;
    case Family::kIndicatorBall:
      return distance <= radius * (1.0 + 1e-12) ? amplitude : 0.0;
    case Family::kGaussian:
      return amplitude *
             std::exp(-distance * distance / (2.0 * sigma * sigma));
  }
  return 0.0;
}

double Chi::Lipschitz() const {
  switch (family) {
    case Family::kConstant:
      return 0.0;
    case Family::kIndicatorBall:
      return amplitude > 0.0 ? kInf : 0.0;
    case Family::kGaussian:
      return amplitude * std::exp(-0.5) / sigma;
  }
  return 0.0;
}

std::string Chi::Describe() const {
  switch (family) {
    case Family::kConstant:
      return Format("constant %.6g", amplitude);
    case Family::kIndicatorBall:
      return Format("%.6g * indicator(d <= %.6g)", amplitude, radius);
    case Family::kGaussian:
      return Format("%.6g * gaussian(sigma = %.6g)", amplitude, sigma);
  }
  return "";
}

Eta Eta::Constant(double value) {
  RequireFinite(value, "eta value");
  if (value < 0.0) throw PreconditionError("eta must be nonnegative");
  Eta e;
  e.family = Family::kConstant;
  e.value = value;
  return e;
}

Eta Eta::Taper(double value, double rho) {
  RequireFinite(value, "eta value");
  RequireFinite(rho, "eta taper width");
  if (value < 0.0 || !(rho > 0.0)) {
    throw PreconditionError("eta taper needs value >= 0 and rho > 0");
  }
  Eta e;
  e.family = Family::kTaper;
  e.value = value;
  e.rho = rho;
  return e;
}

double Eta::operator()(double distance_to_target) const {
  if (family == Family::kConstant) return value;
  return value * std::min(1.0, distance_to_target / rho);
}

std::string Eta::Describe() const {
  if (family == Family::kConstant) return Format("constant %.6g", value);
  return Format("%.6g * min(1, d(y, target) / %.6g)", value, rho);
}

CongestionKernel::CongestionKernel(Kappa kappa, Chi chi, Eta eta)
    : kappa_(kappa), chi_(chi), eta_(eta) {
  density_bound_ = chi_.Sup() * eta_.Sup();
  const double at_zero = kappa_(0.0);
  const double at_bound = kappa_(density_bound_);
  k_min_ = std::min(at_zero, at_bound);
  k_max_ = std::max(at_zero, at_bound);
  if (!std::isfinite(k_max_) || !(k_min_ > 0.0)) {
    throw HypothesisError(
        "kappa must stay positive on [0, M] (M = " +
        Format("%.6g", density_bound_) + ", min kappa = " +
        Format("%.6g", k_min_) + ")");
  }
}

bool CongestionKernel::IsConstant() const {
  return kappa_.family == Kappa::Family::kConstant || chi_.amplitude == 0.0 ||
         eta_.value == 0.0 || kappa_.Lipschitz() == 0.0;
}

bool CongestionKernel::OutsideHypothesisCoverage() const {
  return chi_.family == Chi::Family::kIndicatorBall && !IsConstant();
}

double CongestionKernel::AveragedDensity(const SpatialDomain& domain,
                                         const ParticleMeasure& mu,
                                         const Point& x) const {
  double sum = 0.0;
  double carry = 0.0;
  for (const Atom& a : mu.atoms()) {
    double term = a.weight;
    if (chi_.family != Chi::Family::kConstant) {
      term *= chi_(domain.Distance(x, a.location));
    } else {
      term *= chi_.amplitude;
    }
    if (eta_.family != Eta::Family::kConstant) {
      term *= eta_(domain.DistanceToTarget(a.location));
    } else {
      term *= eta_.value;
    }
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term
                                             : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double CongestionKernel::EvalSpeed(const SpatialDomain& domain,
                                   const ParticleMeasure& mu,
                                   const Point& x) const {
  mu.RequireNormalized("congestion measure");
  if (IsConstant()) return kappa_(0.0);
  const double s = AveragedDensity(domain, mu, x);
  return std::clamp(kappa_(s), k_min_, k_max_);
}

double CongestionKernel::EvalSpeed(const SpatialDomain& domain,
                                   const ParticleMeasure& mu,
                                   NodeId x) const {
  return EvalSpeed(domain, mu, Point::At(x));
}

LipschitzEstimate CongestionKernel::EstimateLipschitz(
    double /*radius*/, double resolution) const {
  LipschitzEstimate est;
  if (IsConstant()) return est;
  if (chi_.family == Chi::Family::kIndicatorBall) {
    est.value = kappa_.Lipschitz() * chi_.Sup() * eta_.Sup() / resolution;
    est.certified = false;
    est.warning =
        "indicator interaction kernel is not Lipschitz in the continuum; "
        "value is a grid-scale surrogate";
    return est;
  }
  est.value = kappa_.Lipschitz() * chi_.Lipschitz() * eta_.Sup();
  return est;
}

double CongestionKernel::BinningErrorBound(double resolution) const {
  if (IsConstant()) return 0.0;
  const double eta_lip =
      eta_.family == Eta::Family::kTaper ? eta_.value / eta_.rho : 0.0;
  return kappa_.Lipschitz() *
         (chi_.Lipschitz() * eta_.Sup() + chi_.Sup() * eta_lip) * 0.5 *
         resolution;
}

std::string CongestionKernel::Describe() const {
  return "kappa = " + kappa_.Describe() + "; chi = " + chi_.Describe() +
         "; eta = " + eta_.Describe();
}

bool CheckSmallness(const CongestionKernel& kernel, const ExitCost& cost) {
  return cost.lipschitz() * kernel.k_max() < 1.0;
}

HypothesisReport ValidateKernel(const CongestionKernel& kernel,
                                const ExitCost& cost, double resolution) {
  HypothesisReport report;
  {
    Check c{"H8", kernel.k_min() > 0.0 && kernel.k_max() >= kernel.k_min(),
            kernel.k_min(), 0.0, ""};
    c.detail = Format("k_min = %.6g, k_max = %.6g, M = %.6g", kernel.k_min(),
                      kernel.k_max(), kernel.density_bound());
    if (kernel.OutsideHypothesisCoverage()) {
      c.detail += "; outside hypothesis coverage (indicator kernel)";
    }
    report.Add(c);
  }
  {
    const LipschitzEstimate est = kernel.EstimateLipschitz(0.0, resolution);
    Check c{"H9", std::isfinite(est.value), est.value, 0.0, ""};
    c.detail = est.certified ? Format("L_R = %.6g", est.value)
                             : est.warning;
    report.Add(c);
  }
  {
    const double product = cost.lipschitz() * kernel.k_max();
    Check c{"H10", product < 1.0, product, 1.0, ""};
    c.detail = Format("L_g * k_max = %.6g", product);
    report.Add(c);
  }
  return report;
}

}  // namespace exitmfg
