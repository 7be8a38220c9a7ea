#pragma once

#include <string>

namespace romassim::multiphysics {

enum class CouplingKind { LogarithmicANL, SqrtSigmaA1, SinDiffusion, TanhAbsorption, Linear };

CouplingKind parse_coupling_kind(const std::string& name);
std::string to_string(CouplingKind kind);

/// Temperature dependence of one material quantity.
///   LogarithmicANL  ref + gamma ln(T/T_ref)
///   SqrtSigmaA1     ref [1 + gamma (sqrt(T) - sqrt(T_ref))]
///   SinDiffusion    ref [1 + gamma sin(2.75 (T - T_ref)/T_ref)]
///   TanhAbsorption  ref [1 + gamma tanh(2 (T - T_ref)/T_ref)]
///   Linear          slope T + intercept
struct CouplingLaw {
  CouplingKind kind = CouplingKind::Linear;
  double t_ref = 600.0;
  double reference = 0.0;
  double gamma = 0.0;
  double slope = 0.0;
  double intercept = 0.0;

  static CouplingLaw constant(double value);
  static CouplingLaw linear(double slope, double intercept);
  static CouplingLaw nonlinear(CouplingKind kind, double reference, double gamma, double t_ref = 600.0);
};

double coupling_eval(const CouplingLaw& law, double temperature);

/// Evaluation with the reference value scaled by `scale` (used by the
/// transient schedules, which act on the reference cross section).
double coupling_eval_scaled(const CouplingLaw& law, double temperature, double scale);

/// Least-squares line through n_samples uniform samples of `law` on [t_lo, t_hi].
CouplingLaw fit_linear_coupling(const CouplingLaw& law, double t_lo, double t_hi, std::size_t n_samples);

}  // namespace romassim::multiphysics
