#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference in `serial` and an OpenMP version in `omp`. The two must agree
// bit-for-bit (no reductions cross thread boundaries), and the public module
// functions call the OpenMP one.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ecs/coherent.hpp"

namespace ecs::kernels {

// 2x2 block acting on (|e,n>, |g,n+1>), row-major {u00, u01, u10, u11}.
using Block2 = std::array<cplx, 4>;

struct FockLayout {
  std::size_t nAtoms = 0;
  std::size_t nModes = 0;
  std::size_t cutoff = 0;
};

namespace serial {

// out(k,l) = <rows_k|cols_l>.
void gram_fill(std::span<const Ket> rows, std::span<const Ket> cols, Eigen::MatrixXcd& out);

// Accumulates the truncated-Fock image of `branches` into `out`.
void fock_expand(std::span<const Branch> branches, FockLayout layout, std::span<cplx> out);

// blocks[n] for n = 0..cutoff; the |e,cutoff> row drops the coupling to the
// truncated |g,cutoff+1>. `groundPhase` multiplies |g,0>.
void jc_apply(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
              std::span<const Block2> blocks, cplx groundPhase);

// |e,n> -> e^{-i theta n}, |g,n> -> e^{+i theta n} on (atom, mode).
void dispersive_phase(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
                      cplx phasor);

// Applies the 2x2 unitary {u_ee, u_eg, u_ge, u_gg} to one atom.
void atom_unitary(std::span<cplx> amps, FockLayout layout, std::size_t atom, const Block2& u);

// Amplitude-damping update of the coefficient matrix for one mode, given the
// per-ket amplitude on that mode and eta = e^{-kappa t}.
void damp_coefficients(Eigen::MatrixXcd& coeffs, std::span<const cplx> modeAmps, double eta);

}  // namespace serial

namespace omp {

void gram_fill(std::span<const Ket> rows, std::span<const Ket> cols, Eigen::MatrixXcd& out);
void fock_expand(std::span<const Branch> branches, FockLayout layout, std::span<cplx> out);
void jc_apply(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
              std::span<const Block2> blocks, cplx groundPhase);
void dispersive_phase(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
                      cplx phasor);
void atom_unitary(std::span<cplx> amps, FockLayout layout, std::size_t atom, const Block2& u);
void damp_coefficients(Eigen::MatrixXcd& coeffs, std::span<const cplx> modeAmps, double eta);

}  // namespace omp

int max_threads();

}  // namespace ecs::kernels
