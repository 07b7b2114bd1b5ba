#pragma once

// Exact Jaynes-Cummings evolution in a truncated Fock basis, plus a
// fixed-step Lindblad integrator for single-mode amplitude damping. Both
// serve as oracles for the coherent-state algebra.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ecs/coherent.hpp"
#include "ecs/kernels.hpp"
#include "ecs/protocol.hpp"

namespace ecs {

// Interaction-picture propagator U_I(t) = e^{iH0 t} e^{-iHt} of
// H = w a^dag a + w0 sz/2 + g(a^dag s- + a s+), split into the 2x2 blocks on
// {|e,n>, |g,n+1>} for n = 0..cutoff and the scalar |g,0> phase.
struct JCBlockPropagator {
  double coupling = 0.0;
  double detuning = 0.0;
  double duration = 0.0;
  std::size_t cutoff = 0;
  std::vector<kernels::Block2> blocks;
  cplx groundPhase{1.0, 0.0};
};

JCBlockPropagator jc_interaction_propagator(double coupling, double detuning, double duration, std::size_t cutoff);

// Lab-frame block exp(-i M t) with M = [[d/2, g sqrt(n+1)], [g sqrt(n+1), -d/2]]
// (the common w(n + 1/2) phase dropped). Forms a one-parameter group in t.
kernels::Block2 jc_lab_block(double coupling, double detuning, double duration, std::size_t n);

// Applies `prop` to the (atom, mode) factor; other factors untouched.
// Throws ShapeError if the propagator cutoff is below the vector's.
FockVector jc_evolve(const FockVector& v, std::size_t atom, std::size_t mode, const JCBlockPropagator& prop);

// e^{-i theta a^dag a sz} on (atom, mode) in the Fock basis.
FockVector dispersive_phase(const FockVector& v, std::size_t atom, std::size_t mode, const Angle& theta);

// The Ramsey pi/2 map applied in the Fock basis.
FockVector ramsey(const FockVector& v, std::size_t atom);

double norm2(const FockVector& v);
cplx inner(const FockVector& a, const FockVector& b);
double mean_photon_number(const FockVector& v, std::size_t mode);

// Probability mass on the atomic basis word (all atoms), relative to ||v||^2.
double outcome_probability(const FockVector& v, const AtomWord& word);

struct CompensatedFidelity {
  double raw = 0.0;          // |<ref|v>|^2
  double compensated = 0.0;  // max over a relative e/g phase of the atom
};

// (|<ref_e|v_e>| + |<ref_g|v_g>|)^2 and |<ref|v>|^2, where _e/_g are the
// projections onto the atom's excited and ground sectors.
CompensatedFidelity phase_compensated_fidelity(const FockVector& v, const FockVector& ref, std::size_t atom);

// Exact JC replay of a protocol's transit section, compared against the
// dispersive prediction.
struct DispersiveValidation {
  double detuningRatio = 0.0;
  double raw = 0.0;
  double compensated = 0.0;
  std::size_t cutoff = 0;
  double tailBound = 0.0;
  std::size_t compensatedAtom = 0;
};

// Runs `p` up to its first transit, converts to Fock space (cutoff from
// tailEps), replays the section from the first to the last transit with
// exact JC propagators (g = 1, delta = ratio, t = theta / lambda) and Fock
// Ramsey maps, and compares with the analytic state after the last transit.
// Throws ValidationError if the section contains injections or measurements.
DispersiveValidation validate_dispersive(const Program& p, double detuningRatio, double tailEps = kDefaultTailEpsilon);

// Dense single-mode density matrix of a DensityHybrid with no atoms.
Eigen::MatrixXcd density_to_fock(const DensityHybrid& rho, std::size_t cutoff);

// Classical RK4 with `steps` fixed steps for
//   d rho/dt = kappa (a rho a^dag - {a^dag a, rho}/2).
// Throws std::invalid_argument for non-Hermitian input.
Eigen::MatrixXcd lindblad_damp_oracle(const Eigen::MatrixXcd& rho, double kappa, double t, std::size_t steps);

struct LindbladRun {
  Eigen::MatrixXcd rho;
  std::size_t steps = 0;
  double lastChange = 0.0;
};

// Doubles the step count from `initialSteps` until successive outputs differ
// entrywise by less than tol.
LindbladRun lindblad_damp_converged(const Eigen::MatrixXcd& rho, double kappa, double t, double tol = 1e-8,
                                    std::size_t initialSteps = 16);

}  // namespace ecs
