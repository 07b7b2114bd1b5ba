#include "ecs/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecs/errors.hpp"
#include "ecs/kernels.hpp"

namespace ecs {

CoherentAmplitude::CoherentAmplitude(cplx value) : value_(value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw std::invalid_argument("coherent amplitude must be finite");
}

bool is_atom_word(std::string_view word) {
  return std::all_of(word.begin(), word.end(), [](char c) { return c == 'e' || c == 'g'; });
}

HybridState::HybridState(std::size_t nAtoms, std::size_t nModes, std::vector<Branch> branches)
    : nAtoms_(nAtoms), nModes_(nModes), branches_(std::move(branches)) {
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const auto& b = branches_[k];
    if (b.atomWord.size() != nAtoms || b.modes.size() != nModes)
      throw ShapeError("branch " + std::to_string(k) + " has shape (" + std::to_string(b.atomWord.size()) +
                       ", " + std::to_string(b.modes.size()) + "), expected (" + std::to_string(nAtoms) + ", " +
                       std::to_string(nModes) + ")");
    if (!is_atom_word(b.atomWord)) throw ShapeError("branch " + std::to_string(k) + ": atom word must be over {e, g}");
    if (!std::isfinite(b.coeff.real()) || !std::isfinite(b.coeff.imag()))
      throw ShapeError("branch " + std::to_string(k) + ": non-finite coefficient");
  }
}

HybridState HybridState::vacuum(std::size_t nModes, AtomWord atoms) {
  const std::size_t nAtoms = atoms.size();
  return HybridState(nAtoms, nModes, {Branch{std::move(atoms), {1.0, 0.0}, std::vector<CoherentAmplitude>(nModes)}});
}

std::size_t fock_dimension(std::size_t nAtoms, std::size_t nModes, std::size_t cutoff) {
  std::size_t d = std::size_t{1} << nAtoms;
  for (std::size_t m = 0; m < nModes; ++m) d *= cutoff + 1;
  return d;
}

std::size_t FockVector::field_dim() const { return fock_dimension(0, nModes, cutoff); }

std::size_t FockVector::mode_stride(std::size_t mode) const {
  std::size_t s = 1;
  for (std::size_t m = mode + 1; m < nModes; ++m) s *= cutoff + 1;
  return s;
}

std::size_t FockVector::atom_stride(std::size_t atom) const {
  return field_dim() * (std::size_t{1} << (nAtoms - 1 - atom));
}

std::size_t FockVector::photons(std::size_t index, std::size_t mode) const {
  return (index / mode_stride(mode)) % (cutoff + 1);
}

bool FockVector::excited(std::size_t index, std::size_t atom) const { return (index / atom_stride(atom)) % 2 == 1; }

cplx overlap_exponent(CoherentAmplitude alpha, CoherentAmplitude beta) {
  const cplx a = alpha.value();
  const cplx b = beta.value();
  return -0.5 * (std::norm(a) + std::norm(b)) + std::conj(a) * b;
}

cplx overlap(CoherentAmplitude alpha, CoherentAmplitude beta) { return std::exp(overlap_exponent(alpha, beta)); }

cplx ket_overlap(const Ket& k1, const Ket& k2) {
  if (k1.atomWord.size() != k2.atomWord.size() || k1.modes.size() != k2.modes.size())
    throw ShapeError("ket_overlap: shape mismatch");
  if (k1.atomWord != k2.atomWord) return {0.0, 0.0};
  cplx exponent{0.0, 0.0};
  for (std::size_t m = 0; m < k1.modes.size(); ++m) exponent += overlap_exponent(k1.modes[m], k2.modes[m]);
  return std::exp(exponent);
}

cplx branch_overlap(const Branch& b1, const Branch& b2) {
  return std::conj(b1.coeff) * b2.coeff * ket_overlap(b1.ket(), b2.ket());
}

namespace {

std::vector<Ket> kets_of(const HybridState& s) {
  std::vector<Ket> kets;
  kets.reserve(s.size());
  for (const auto& b : s.branches()) kets.push_back(b.ket());
  return kets;
}

void require_same_shape(const HybridState& a, const HybridState& b, const char* what) {
  if (a.atoms() != b.atoms() || a.modes() != b.modes()) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace

Eigen::MatrixXcd gram(const HybridState& s) {
  const auto kets = kets_of(s);
  Eigen::MatrixXcd g;
  kernels::omp::gram_fill(kets, kets, g);
  return g;
}

Eigen::MatrixXcd cross_gram(const HybridState& a, const HybridState& b) {
  require_same_shape(a, b, "cross_gram");
  const auto ka = kets_of(a);
  const auto kb = kets_of(b);
  Eigen::MatrixXcd g;
  kernels::omp::gram_fill(ka, kb, g);
  return g;
}

Eigen::VectorXcd coefficients(const HybridState& s) {
  Eigen::VectorXcd c(static_cast<Eigen::Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) c(static_cast<Eigen::Index>(k)) = s.branches()[k].coeff;
  return c;
}

double norm2(const HybridState& s) {
  const Eigen::VectorXcd c = coefficients(s);
  const cplx v = c.dot(gram(s) * c);  // Eigen's dot conjugates the left operand
  return std::max(v.real(), 0.0);
}

cplx inner(const HybridState& a, const HybridState& b) {
  return coefficients(a).dot(cross_gram(a, b) * coefficients(b));
}

HybridState scale(const HybridState& s, cplx factor) {
  auto branches = s.branches();
  for (auto& b : branches) b.coeff *= factor;
  return HybridState(s.atoms(), s.modes(), std::move(branches));
}

HybridState normalize(const HybridState& s) {
  const double n2 = norm2(s);
  if (!(n2 > kZeroNormTolerance))
    throw ZeroNormError("cannot normalize a state with squared norm " + std::to_string(n2));
  return scale(s, 1.0 / std::sqrt(n2));
}

double fidelity_pure(const HybridState& a, const HybridState& b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (!(na > kZeroNormTolerance) || !(nb > kZeroNormTolerance))
    throw ZeroNormError("fidelity_pure: zero-norm operand");
  const double f = std::norm(inner(a, b)) / (na * nb);
  return std::clamp(f, 0.0, 1.0);
}

HybridState prune(const HybridState& s, double tol) {
  std::vector<Branch> merged;
  for (const auto& b : s.branches()) {
    auto same = [&](const Branch& m) {
      if (m.atomWord != b.atomWord) return false;
      for (std::size_t i = 0; i < b.modes.size(); ++i) {
        const cplx d = m.modes[i].value() - b.modes[i].value();
        if (std::abs(d.real()) > tol || std::abs(d.imag()) > tol) return false;
      }
      return true;
    };
    auto it = std::find_if(merged.begin(), merged.end(), same);
    if (it == merged.end())
      merged.push_back(b);
    else
      it->coeff += b.coeff;
  }
  std::erase_if(merged, [tol](const Branch& b) { return std::abs(b.coeff) < tol; });
  return HybridState(s.atoms(), s.modes(), std::move(merged));
}

DensityHybrid to_density(const HybridState& s) {
  DensityHybrid rho;
  rho.nAtoms = s.atoms();
  rho.nModes = s.modes();
  rho.kets = kets_of(s);
  const Eigen::VectorXcd c = coefficients(s);
  rho.coeffs = c * c.adjoint();
  return rho;
}

Eigen::MatrixXcd gram(const DensityHybrid& rho) {
  Eigen::MatrixXcd g;
  kernels::omp::gram_fill(rho.kets, rho.kets, g);
  return g;
}

cplx trace(const DensityHybrid& rho) {
  // sum_kl C_kl G_lk
  return (rho.coeffs.array() * gram(rho).transpose().array()).sum();
}

Eigen::VectorXd density_eigenvalues(const DensityHybrid& rho) {
  const Eigen::MatrixXcd g = gram(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gs(g);
  const Eigen::VectorXd d = gs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd root = gs.eigenvectors() * d.asDiagonal() * gs.eigenvectors().adjoint();
  Eigen::MatrixXcd m = root * rho.coeffs * root;
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double poisson_tail(double meanPhotons, std::size_t cutoff) {
  if (meanPhotons == 0.0) return 0.0;
  // p_n by recurrence in the log domain for the first term, then summed forward.
  double logp = -meanPhotons;
  for (std::size_t n = 1; n <= cutoff + 1; ++n) logp += std::log(meanPhotons) - std::log(static_cast<double>(n));
  double term = std::exp(logp);
  double tail = 0.0;
  for (std::size_t n = cutoff + 1; n < cutoff + 100000; ++n) {
    tail += term;
    term *= meanPhotons / static_cast<double>(n + 1);
    if (static_cast<double>(n) > meanPhotons && term <= tail * 1e-18) break;
    if (term == 0.0 && tail == 0.0 && static_cast<double>(n) > meanPhotons) break;
  }
  return tail;
}

CoherentFock coherent_fock(CoherentAmplitude alpha, std::size_t cutoff) {
  CoherentFock out;
  out.amplitudes.resize(cutoff + 1);
  const cplx a = alpha.value();
  cplx an = std::exp(-0.5 * std::norm(a));
  for (std::size_t n = 0; n <= cutoff; ++n) {
    out.amplitudes[n] = an;
    an *= a / std::sqrt(static_cast<double>(n + 1));
  }
  out.tailBound = poisson_tail(std::norm(a), cutoff);
  return out;
}

std::size_t cutoff_for(double maxAbsAlpha, double eps) {
  const double mean = maxAbsAlpha * maxAbsAlpha;
  std::size_t n = 0;
  while (poisson_tail(mean, n) >= eps) ++n;
  return n;
}

double max_amplitude(const HybridState& s) {
  double m = 0.0;
  for (const auto& b : s.branches())
    for (const auto& a : b.modes) m = std::max(m, std::abs(a.value()));
  return m;
}

FockVector hybrid_to_fock(const HybridState& s, std::size_t cutoff) {
  FockVector v;
  v.nAtoms = s.atoms();
  v.nModes = s.modes();
  v.cutoff = cutoff;
  v.amplitudes.assign(fock_dimension(v.nAtoms, v.nModes, cutoff), cplx{});
  kernels::omp::fock_expand(s.branches(), {v.nAtoms, v.nModes, cutoff}, v.amplitudes);
  double bound = 0.0;
  for (const auto& b : s.branches()) {
    double modeTail = 0.0;
    for (const auto& a : b.modes) modeTail += poisson_tail(a.norm(), cutoff);
    bound += std::abs(b.coeff) * std::sqrt(modeTail);
  }
  v.tailBound = bound * bound;
  return v;
}

}  // namespace ecs
