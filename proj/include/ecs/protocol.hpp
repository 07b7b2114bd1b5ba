#pragma once

// Protocol steps (injection, dispersive transit, Ramsey pulses, atomic
// detection) on HybridStates, plus the GHZ and W cavity protocols built
// from them.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecs/angle.hpp"
#include "ecs/coherent.hpp"

namespace ecs {

// Dispersive coupling parameters (angular frequencies in rad/s, time in s).
class DispersiveParams {
 public:
  // Throws std::invalid_argument when detuning == 0.
  DispersiveParams(double coupling, double detuning, double transitTime);

  // Parameters with detuning = ratio * coupling and lambda * tau = theta.
  static DispersiveParams for_phase(double coupling, double detuningRatio, double theta);

  double coupling() const { return g_; }
  double detuning() const { return delta_; }
  double lambda() const { return g_ * g_ / delta_; }
  double transit_time() const { return tau_; }
  double theta() const { return lambda() * tau_; }
  bool dispersive() const;  // |delta / g| >= 10

 private:
  double g_;
  double delta_;
  double tau_;
};

// D(gamma) on `mode` of every branch: alpha -> alpha + gamma, coefficient
// times exp((gamma conj(alpha) - conj(gamma) alpha) / 2).
HybridState inject(const HybridState& s, std::size_t mode, CoherentAmplitude gamma);

// e-branches: alpha -> alpha e^{-i theta}; g-branches: alpha -> alpha e^{+i theta}.
HybridState dispersive_transit(const HybridState& s, std::size_t atom, std::size_t mode, const Angle& theta);

// |e> -> (|e> + |g>)/sqrt2, |g> -> (|g> - |e>)/sqrt2 on one atom. Not pruned.
HybridState ramsey(const HybridState& s, std::size_t atom);

struct Measurement {
  double probability = 0.0;
  HybridState post;  // normalized, measured atom removed
};

// Throws ZeroNormError when the outcome has probability below 1e-24.
Measurement measure(const HybridState& s, std::size_t atom, char outcome);

// Projects several atoms at once onto `outcome` (one letter per listed atom)
// and removes them. Returns the unnormalized projection.
HybridState project_atoms(const HybridState& s, const std::vector<std::size_t>& atoms, const AtomWord& outcome);

// Atomic register: a superposition of basis words, the field in vacuum.
HybridState atomic_register(std::size_t nModes, const std::vector<std::pair<AtomWord, cplx>>& terms);

// n-atom W register sum_i w_i |g..e_i..g>, normalized. Empty weights means equal.
std::vector<std::pair<AtomWord, cplx>> w_register_terms(std::size_t n, const std::vector<cplx>& weights = {});

// c(|beta..beta> +/- |-beta..-beta>), normalized.
HybridState reference_ghz(std::size_t n, CoherentAmplitude beta, int sign);

// sum_i s_i b_i |beta..(-beta at slot i)..beta>, normalized. Empty weights means equal.
HybridState reference_w(std::size_t n, CoherentAmplitude beta, const std::vector<int>& signs,
                        const std::vector<cplx>& weights = {});

// Sign pattern s_i = (-1)^{#e(word) - [word_i == e]} of the W reference
// selected by detecting `word` after the final Ramsey pulses.
std::vector<int> w_outcome_signs(const AtomWord& word);

// Class label shared by a W outcome and its complement, e.g. "+--" for egg/gee.
std::string w_group_label(const AtomWord& word);

// ------------------------------------------------------------------ programs

struct InjectStep {
  std::size_t mode = 0;
  CoherentAmplitude gamma;
};

struct TransitStep {
  std::size_t atom = 0;
  std::size_t mode = 0;
  std::variant<Angle, DispersiveParams> phase;

  Angle theta() const;
};

struct RamseyStep {
  std::size_t atom = 0;
};

// outcome == nullopt means "tabulate": all outcomes of the final block.
struct MeasureStep {
  std::size_t atom = 0;
  std::optional<char> outcome;
};

using Step = std::variant<InjectStep, TransitStep, RamseyStep, MeasureStep>;

enum class ReferenceKind { None, GhzParity, WSignGroup };

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::None;
  CoherentAmplitude beta;
  std::vector<cplx> weights;  // W only
};

// Atom indices in steps refer to the initial register; measured atoms leave
// the state but keep their index.
struct Program {
  HybridState initial;
  std::vector<Step> steps;
  ReferenceSpec reference;
};

// Checks index ranges, that measured atoms are not used afterwards and that
// tabulating measurements form the final block. Throws ValidationError
// naming the offending step.
void validate(const Program& p);

struct OutcomeRecord {
  double probability = 0.0;
  std::optional<HybridState> post;   // absent for impossible outcomes
  std::optional<double> fidelity;    // to the selected reference, if any
  std::string group;
};

struct ProtocolResult {
  std::map<AtomWord, OutcomeRecord> outcomes;
  HybridState preMeasurement;     // state before the tabulated block
  double conditionalProbability = 1.0;  // product over forced outcomes
  std::vector<std::size_t> tabulatedAtoms;
};

ProtocolResult execute(const Program& p);

Program ghz_program(std::size_t n, CoherentAmplitude alpha, const Angle& theta);
Program w_program(std::size_t n, CoherentAmplitude alpha, const Angle& theta, const std::vector<cplx>& weights = {});

ProtocolResult run_ghz(std::size_t n, CoherentAmplitude alpha, const Angle& theta);
ProtocolResult run_w(std::size_t n, CoherentAmplitude alpha, const Angle& theta, const std::vector<cplx>& weights = {});

// Probability-completeness and normalization checks; throws ToleranceError.
void check_result(const ProtocolResult& r, double tol = 1e-12);

}  // namespace ecs
