#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ecs/coherent.hpp"

namespace ecs {

// Photon loss on one mode for time t at rate kappa. With eta = e^{-kappa t},
// |a><b| -> <b|a>^{1-eta} |sqrt(eta) a><sqrt(eta) b|, the overlap power
// evaluated through its exponent.
DensityHybrid damp(const DensityHybrid& rho, std::size_t mode, double kappa, double t);

DensityHybrid damp_all(const DensityHybrid& rho, double kappa, double t);

// Reference variant using the serial kernel.
DensityHybrid damp_serial(const DensityHybrid& rho, std::size_t mode, double kappa, double t);

// <psi|rho|psi> from branch overlaps; psi must be normalized.
double damped_fidelity(const DensityHybrid& rho, const HybridState& psi);

// psi with every mode amplitude multiplied by factor (no renormalization).
HybridState rescale_amplitudes(const HybridState& psi, double factor);

struct TimescaleParams {
  double atomicLifetime = 30e-3;   // T_at (s)
  double cavityLifetime = 1e-3;    // T_r (s)
  double transitTime = 1e-4;       // s
  double qualityFactor = 3e8;
  double transitionFrequency = 51e9;  // Hz

  void validate() const;  // all positive, else std::invalid_argument
};

struct TimescaleReport {
  double transitOverAtomic = 0.0;
  double transitOverCavity = 0.0;
  double kappaTransit = 0.0;         // kappa * transit with kappa = 1/T_r
  double cavityLifetimeFromQ = 0.0;  // Q / (2 pi nu0)
  double threshold = 0.15;
  bool pass = false;                 // both ratios below threshold
};

TimescaleReport timescale_report(const TimescaleParams& p);

}  // namespace ecs
