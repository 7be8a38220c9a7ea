#include "romassim/multiphysics/coupling.hpp"

#include <cmath>
#include <vector>

#include "romassim/error.hpp"

namespace romassim::multiphysics {

CouplingKind parse_coupling_kind(const std::string& name) {
  if (name == "logarithmic") return CouplingKind::LogarithmicANL;
  if (name == "sqrt") return CouplingKind::SqrtSigmaA1;
  if (name == "sin") return CouplingKind::SinDiffusion;
  if (name == "tanh") return CouplingKind::TanhAbsorption;
  if (name == "linear") return CouplingKind::Linear;
  throw Error(ErrorCode::Config, "unknown coupling kind '" + name + "'");
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::LogarithmicANL: return "logarithmic";
    case CouplingKind::SqrtSigmaA1: return "sqrt";
    case CouplingKind::SinDiffusion: return "sin";
    case CouplingKind::TanhAbsorption: return "tanh";
    case CouplingKind::Linear: return "linear";
  }
  return "linear";
}

CouplingLaw CouplingLaw::constant(double value) { return linear(0.0, value); }

CouplingLaw CouplingLaw::linear(double slope, double intercept) {
  CouplingLaw law;
  law.kind = CouplingKind::Linear;
  law.slope = slope;
  law.intercept = intercept;
  return law;
}

CouplingLaw CouplingLaw::nonlinear(CouplingKind kind, double reference, double gamma, double t_ref) {
  if (!(t_ref > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "reference temperature must be positive");
  CouplingLaw law;
  law.kind = kind;
  law.reference = reference;
  law.gamma = gamma;
  law.t_ref = t_ref;
  return law;
}

double coupling_eval_scaled(const CouplingLaw& law, double t, double scale) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  const double rel = (t - law.t_ref) / law.t_ref;
  switch (law.kind) {
    case CouplingKind::LogarithmicANL:
      if (t == law.t_ref) return scale * law.reference;
      return scale * law.reference + law.gamma * std::log(t / law.t_ref);
    case CouplingKind::SqrtSigmaA1:
      return scale * law.reference * (1.0 + law.gamma * (std::sqrt(t) - std::sqrt(law.t_ref)));
    case CouplingKind::SinDiffusion:
      return scale * law.reference * (1.0 + law.gamma * std::sin(2.75 * rel));
    case CouplingKind::TanhAbsorption:
      return scale * law.reference * (1.0 + law.gamma * std::tanh(2.0 * rel));
    case CouplingKind::Linear:
      return scale * (law.slope * t + law.intercept);
  }
  return 0.0;
}

double coupling_eval(const CouplingLaw& law, double t) { return coupling_eval_scaled(law, t, 1.0); }

CouplingLaw fit_linear_coupling(const CouplingLaw& law, double t_lo, double t_hi, std::size_t n_samples) {
  if (!(t_hi > t_lo)) throw Error(ErrorCode::DegenerateRange, "fit range is empty");
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "at least two samples are needed");
  if (law.kind == CouplingKind::Linear) return law;
  // Centered normal equations keep the 2x2 solve well conditioned.
  const double n = static_cast<double>(n_samples);
  double mean_t = 0.0, mean_f = 0.0;
  std::vector<double> ts(n_samples), fs(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    ts[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    fs[i] = coupling_eval(law, ts[i]);
    mean_t += ts[i];
    mean_f += fs[i];
  }
  mean_t /= n;
  mean_f /= n;
  double stt = 0.0, stf = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    stt += (ts[i] - mean_t) * (ts[i] - mean_t);
    stf += (ts[i] - mean_t) * (fs[i] - mean_f);
  }
  const double slope = stf / stt;
  return CouplingLaw::linear(slope, mean_f - slope * mean_t);
}

}  // namespace romassim::multiphysics
