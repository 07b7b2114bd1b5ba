#include "ecs/decoherence.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ecs/errors.hpp"
#include "ecs/kernels.hpp"

namespace ecs {

namespace {

template <class Kernel>
DensityHybrid damp_with(const DensityHybrid& rho, std::size_t mode, double kappa, double t, Kernel kernel) {
  if (mode >= rho.nModes)
    throw IndexError("damp: mode " + std::to_string(mode) + " out of range (" + std::to_string(rho.nModes) + " modes)");
  if (kappa < 0.0 || t < 0.0) throw std::invalid_argument("damp: kappa and t must be non-negative");
  const double eta = std::exp(-kappa * t);
  DensityHybrid out = rho;
  std::vector<cplx> amps;
  amps.reserve(rho.kets.size());
  for (const auto& k : rho.kets) amps.push_back(k.modes[mode].value());
  kernel(out.coeffs, amps, eta);
  const double shrink = std::sqrt(eta);
  for (auto& k : out.kets) k.modes[mode] = k.modes[mode] * cplx{shrink, 0.0};
  return out;
}

}  // namespace

DensityHybrid damp(const DensityHybrid& rho, std::size_t mode, double kappa, double t) {
  return damp_with(rho, mode, kappa, t, [](auto& c, const auto& a, double eta) {
    kernels::omp::damp_coefficients(c, a, eta);
  });
}

DensityHybrid damp_serial(const DensityHybrid& rho, std::size_t mode, double kappa, double t) {
  return damp_with(rho, mode, kappa, t, [](auto& c, const auto& a, double eta) {
    kernels::serial::damp_coefficients(c, a, eta);
  });
}

DensityHybrid damp_all(const DensityHybrid& rho, double kappa, double t) {
  DensityHybrid out = rho;
  for (std::size_t m = 0; m < rho.nModes; ++m) out = damp(out, m, kappa, t);
  return out;
}

double damped_fidelity(const DensityHybrid& rho, const HybridState& psi) {
  if (psi.atoms() != rho.nAtoms || psi.modes() != rho.nModes) throw ShapeError("damped_fidelity: shape mismatch");
  // v_k = <psi|ket_k>
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rho.kets.size()));
  for (std::size_t k = 0; k < rho.kets.size(); ++k)
    for (const auto& b : psi.branches())
      v(static_cast<Eigen::Index>(k)) += std::conj(b.coeff) * ket_overlap(b.ket(), rho.kets[k]);
  const cplx f = v.transpose() * rho.coeffs * v.conjugate();
  return f.real();
}

HybridState rescale_amplitudes(const HybridState& psi, double factor) {
  auto branches = psi.branches();
  for (auto& b : branches)
    for (auto& a : b.modes) a = a * cplx{factor, 0.0};
  return HybridState(psi.atoms(), psi.modes(), std::move(branches));
}

void TimescaleParams::validate() const {
  if (!(atomicLifetime > 0.0 && cavityLifetime > 0.0 && transitTime > 0.0 && qualityFactor > 0.0 &&
        transitionFrequency > 0.0))
    throw std::invalid_argument("timescale parameters must all be positive");
}

TimescaleReport timescale_report(const TimescaleParams& p) {
  p.validate();
  TimescaleReport r;
  r.transitOverAtomic = p.transitTime / p.atomicLifetime;
  r.transitOverCavity = p.transitTime / p.cavityLifetime;
  r.kappaTransit = p.transitTime / p.cavityLifetime;
  r.cavityLifetimeFromQ = p.qualityFactor / (2.0 * std::numbers::pi * p.transitionFrequency);
  r.pass = r.transitOverAtomic < r.threshold && r.transitOverCavity < r.threshold;
  return r;
}

}  // namespace ecs
