#pragma once

// Exact algebra of superpositions of multimode coherent states.
//
// A HybridState is a finite sum of branches c_k |w_k> (x) |a_k1>...|a_kM>,
// where w_k is a word over the atomic levels {e, g}. Branches are not
// orthogonal; every norm, probability and fidelity goes through the Gram
// matrix of coherent-state overlaps
//
//   <a|b> = exp(-(|a|^2 + |b|^2)/2 + conj(a) b).
//
// Overlaps of multimode kets are formed by summing the per-mode exponents and
// exponentiating once.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ecs {

using cplx = std::complex<double>;

inline constexpr double kPruneTolerance = 1e-12;
inline constexpr double kZeroNormTolerance = 1e-24;
inline constexpr double kDefaultTailEpsilon = 1e-10;

// Complex coherent amplitude alpha; always finite.
class CoherentAmplitude {
 public:
  constexpr CoherentAmplitude() = default;
  CoherentAmplitude(cplx value);  // NOLINT(google-explicit-constructor)
  CoherentAmplitude(double re, double im = 0.0) : CoherentAmplitude(cplx{re, im}) {}

  cplx value() const { return value_; }
  double norm() const { return std::norm(value_); }  // |alpha|^2

  CoherentAmplitude operator-() const { return CoherentAmplitude(-value_); }
  friend CoherentAmplitude operator*(CoherentAmplitude a, cplx z) { return {a.value_ * z}; }
  friend CoherentAmplitude operator+(CoherentAmplitude a, CoherentAmplitude b) { return {a.value_ + b.value_}; }
  friend bool operator==(const CoherentAmplitude&, const CoherentAmplitude&) = default;

 private:
  cplx value_{};
};

// Atomic basis word, one letter per atom from {'e', 'g'}.
using AtomWord = std::string;

bool is_atom_word(std::string_view word);

// A branch without its coefficient: atomic basis word plus mode amplitudes.
struct Ket {
  AtomWord atomWord;
  std::vector<CoherentAmplitude> modes;

  friend bool operator==(const Ket&, const Ket&) = default;
};

struct Branch {
  AtomWord atomWord;
  cplx coeff{1.0, 0.0};
  std::vector<CoherentAmplitude> modes;

  Ket ket() const { return {atomWord, modes}; }
};

class HybridState {
 public:
  HybridState() = default;
  // Throws ShapeError if any branch disagrees with (nAtoms, nModes) or
  // carries a letter outside {e, g}.
  HybridState(std::size_t nAtoms, std::size_t nModes, std::vector<Branch> branches);

  // |w> (x) |0...0> with coefficient 1.
  static HybridState vacuum(std::size_t nModes, AtomWord atoms = {});

  std::size_t atoms() const { return nAtoms_; }
  std::size_t modes() const { return nModes_; }
  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }

 private:
  std::size_t nAtoms_ = 0;
  std::size_t nModes_ = 0;
  std::vector<Branch> branches_;
};

// Mixed state sum_{k,l} C_kl |ket_k><ket_l| over coherent-product kets.
struct DensityHybrid {
  std::size_t nAtoms = 0;
  std::size_t nModes = 0;
  std::vector<Ket> kets;
  Eigen::MatrixXcd coeffs;  // square, conjugate-symmetric
};

// Dense truncated-Fock amplitudes over (atoms) x (photon numbers per mode).
//
// Layout: index = atomIndex * (cutoff+1)^nModes + fieldIndex. In atomIndex the
// first atom is the most significant bit and bit value 1 means 'e'. In
// fieldIndex the first mode is the most significant digit (base cutoff+1).
struct FockVector {
  std::size_t nAtoms = 0;
  std::size_t nModes = 0;
  std::size_t cutoff = 0;
  std::vector<cplx> amplitudes;
  double tailBound = 0.0;

  std::size_t field_dim() const;
  std::size_t mode_stride(std::size_t mode) const;
  std::size_t atom_stride(std::size_t atom) const;
  std::size_t photons(std::size_t index, std::size_t mode) const;
  bool excited(std::size_t index, std::size_t atom) const;
};

std::size_t fock_dimension(std::size_t nAtoms, std::size_t nModes, std::size_t cutoff);

// <alpha|beta>
cplx overlap(CoherentAmplitude alpha, CoherentAmplitude beta);

// log <alpha|beta>, returned as the exponent itself.
cplx overlap_exponent(CoherentAmplitude alpha, CoherentAmplitude beta);

// <k1|k2> without coefficients; 0 when the atomic words differ.
cplx ket_overlap(const Ket& k1, const Ket& k2);

// conj(c1) c2 <ket1|ket2>.
cplx branch_overlap(const Branch& b1, const Branch& b2);

// G_kl = <ket_k|ket_l> over the branches of s (coefficients stripped).
Eigen::MatrixXcd gram(const HybridState& s);

// Cross-Gram <a_k|b_l> between the kets of two states of the same shape.
Eigen::MatrixXcd cross_gram(const HybridState& a, const HybridState& b);

Eigen::VectorXcd coefficients(const HybridState& s);

double norm2(const HybridState& s);

// <a|b>
cplx inner(const HybridState& a, const HybridState& b);

// Throws ZeroNormError when norm2 <= kZeroNormTolerance.
HybridState normalize(const HybridState& s);

HybridState scale(const HybridState& s, cplx factor);

// |<a|b>|^2 / (norm2(a) norm2(b)), clamped to [0, 1].
double fidelity_pure(const HybridState& a, const HybridState& b);

// Merge branches whose atom words match and whose mode amplitudes agree
// componentwise within tol; drop merged branches with |coeff| < tol.
HybridState prune(const HybridState& s, double tol = kPruneTolerance);

DensityHybrid to_density(const HybridState& s);

// Gram matrix of the kets of a density operator.
Eigen::MatrixXcd gram(const DensityHybrid& rho);

// Tr(rho) = sum_kl C_kl <ket_l|ket_k>.
cplx trace(const DensityHybrid& rho);

// Eigenvalues of the operator rho (nonzero part), ascending, computed from
// G^{1/2} C G^{1/2} with G the ket Gram matrix.
Eigen::VectorXd density_eigenvalues(const DensityHybrid& rho);

struct CoherentFock {
  std::vector<cplx> amplitudes;  // n = 0..cutoff
  double tailBound = 0.0;        // probability mass beyond cutoff
};

// a_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) by the recurrence a_{n+1} = a_n alpha / sqrt(n+1).
CoherentFock coherent_fock(CoherentAmplitude alpha, std::size_t cutoff);

// Poisson tail mass beyond `cutoff` for mean |alpha|^2.
double poisson_tail(double meanPhotons, std::size_t cutoff);

// Smallest cutoff N with poisson_tail(|alpha|^2, N) < eps.
std::size_t cutoff_for(double maxAbsAlpha, double eps = kDefaultTailEpsilon);

double max_amplitude(const HybridState& s);

// Truncated-Fock image of s. tailBound is (sum_k |c_k| sqrt(sum_m t_km))^2,
// which bounds norm2(s) - ||v||^2 since the truncation error is orthogonal
// to the retained subspace.
FockVector hybrid_to_fock(const HybridState& s, std::size_t cutoff);

}  // namespace ecs
