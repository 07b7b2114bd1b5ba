#pragma once

// Entanglement of states whose modes all sit on {|beta>, |-beta>}.
//
// Each mode's span is mapped isometrically onto the orthonormal cat basis
// |+-> = (|beta> +- |-beta>) / sqrt(2 (1 +- e^{-2|beta|^2})), so
//   |beta>  = c+ |+> + c- |->,   |-beta> = c+ |+> - c- |->,
//   c+- = sqrt((1 +- e^{-2|beta|^2}) / 2).
// Atoms are carried along as qubits (bit 1 = e). Qubit order: atoms first,
// then modes; the first qubit is the most significant bit.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecs/coherent.hpp"

namespace ecs {

struct QubitizedState {
  std::size_t nAtoms = 0;
  std::size_t nModes = 0;
  Eigen::VectorXcd amplitudes;  // 2^(nAtoms + nModes)
  CoherentAmplitude betaRef;

  std::size_t qubits() const { return nAtoms + nModes; }
};

// Throws AmplitudeOffGrid if some mode amplitude is neither +beta nor -beta (1e-10).
QubitizedState qubitize(const HybridState& s, CoherentAmplitude beta);

// Reduced density matrix on the listed qubits (in the listed order).
Eigen::MatrixXcd reduced_density(const QubitizedState& q, const std::vector<std::size_t>& subset);

// Von Neumann entropy (bits) of the reduction to `subset`. Eigenvalues in
// [-1e-12, 0] count as zero.
double reduced_entropy(const QubitizedState& q, const std::vector<std::size_t>& subset);

// Sum of |negative eigenvalues| of the partial transpose over `bipartition`.
double negativity(const QubitizedState& q, const std::vector<std::size_t>& bipartition);

// Standard n-qubit GHZ (|0..0> + |1..1>)/sqrt2 as a QubitizedState of modes.
QubitizedState qubit_ghz(std::size_t n);

enum class EcsFamily { GhzPlus, GhzMinus, WSigned };

EcsFamily parse_family(const std::string& name);  // "ghz-plus", "ghz-minus", "w"
std::string family_name(EcsFamily f);

// Field state of the family at amplitude beta (W uses `signs`, all + if empty).
HybridState family_state(EcsFamily f, std::size_t n, CoherentAmplitude beta, const std::vector<int>& signs = {});

struct SweepRow {
  double beta = 0.0;
  std::string bipartition;  // e.g. "0|12"
  double entropy = 0.0;
  double negativity = 0.0;
};

struct SweepTable {
  EcsFamily family = EcsFamily::GhzPlus;
  std::size_t n = 0;
  std::vector<SweepRow> rows;
  // Per bipartition: whether entropy / negativity stay constant within 1e-6.
  std::vector<std::string> bipartitions;
  std::vector<bool> entropyConstant;
  std::vector<bool> negativityConstant;
};

// Bipartitions S|rest with 1 <= |S| <= n/2 (complements not repeated).
std::vector<std::vector<std::size_t>> mode_bipartitions(std::size_t n);

SweepTable entanglement_sweep(EcsFamily family, std::size_t n, const std::vector<double>& betaGrid,
                              const std::vector<int>& signs = {});

}  // namespace ecs
