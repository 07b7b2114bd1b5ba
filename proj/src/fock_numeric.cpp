#include "ecs/fock_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ecs/errors.hpp"

namespace ecs {

kernels::Block2 jc_lab_block(double coupling, double detuning, double duration, std::size_t n) {
  const double G = coupling * std::sqrt(static_cast<double>(n + 1));
  const double omega = std::sqrt(detuning * detuning + 4.0 * G * G);
  const double half = 0.5 * omega * duration;
  const double c = std::cos(half);
  // sin(half) / (omega/2), with the omega -> 0 limit t
  const double s = omega == 0.0 ? duration : 2.0 * std::sin(half) / omega;
  const cplx i{0.0, 1.0};
  return {cplx{c, 0.0} - i * s * 0.5 * detuning, -i * s * G, -i * s * G, cplx{c, 0.0} + i * s * 0.5 * detuning};
}

JCBlockPropagator jc_interaction_propagator(double coupling, double detuning, double duration, std::size_t cutoff) {
  if (cutoff < 1) throw std::invalid_argument("jc_interaction_propagator: cutoff must be >= 1");
  if (duration < 0.0) throw std::invalid_argument("jc_interaction_propagator: duration must be >= 0");
  JCBlockPropagator p;
  p.coupling = coupling;
  p.detuning = detuning;
  p.duration = duration;
  p.cutoff = cutoff;
  const cplx up = std::polar(1.0, 0.5 * detuning * duration);
  const cplx down = std::conj(up);
  p.blocks.reserve(cutoff + 1);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    auto b = jc_lab_block(coupling, detuning, duration, n);
    // e^{+i H0 t} restricted to the block: e^{+i d t/2} on |e,n>, e^{-i d t/2} on |g,n+1>.
    b[0] *= up;
    b[1] *= up;
    b[2] *= down;
    b[3] *= down;
    p.blocks.push_back(b);
  }
  // |g,0> is an eigenstate of both H and H0 with the same energy.
  p.groundPhase = {1.0, 0.0};
  return p;
}

namespace {

void check_fock_indices(const FockVector& v, std::size_t atom, std::size_t mode, const char* op) {
  if (atom >= v.nAtoms) throw ShapeError(std::string(op) + ": atom index out of range");
  if (mode >= v.nModes) throw ShapeError(std::string(op) + ": mode index out of range");
}

kernels::FockLayout layout_of(const FockVector& v) { return {v.nAtoms, v.nModes, v.cutoff}; }

}  // namespace

FockVector jc_evolve(const FockVector& v, std::size_t atom, std::size_t mode, const JCBlockPropagator& prop) {
  check_fock_indices(v, atom, mode, "jc_evolve");
  if (prop.cutoff < v.cutoff) throw ShapeError("jc_evolve: propagator cutoff below vector cutoff");
  FockVector out = v;
  kernels::omp::jc_apply(out.amplitudes, layout_of(v), atom, mode,
                         std::span<const kernels::Block2>(prop.blocks.data(), v.cutoff + 1), prop.groundPhase);
  return out;
}

FockVector dispersive_phase(const FockVector& v, std::size_t atom, std::size_t mode, const Angle& theta) {
  check_fock_indices(v, atom, mode, "dispersive_phase");
  FockVector out = v;
  kernels::omp::dispersive_phase(out.amplitudes, layout_of(v), atom, mode, theta.phasor());
  return out;
}

FockVector ramsey(const FockVector& v, std::size_t atom) {
  if (atom >= v.nAtoms) throw ShapeError("ramsey: atom index out of range");
  constexpr double r = 0.70710678118654752440;
  FockVector out = v;
  kernels::omp::atom_unitary(out.amplitudes, layout_of(v), atom, {cplx{r}, cplx{-r}, cplx{r}, cplx{r}});
  return out;
}

double norm2(const FockVector& v) {
  double s = 0.0;
  for (const auto& a : v.amplitudes) s += std::norm(a);
  return s;
}

cplx inner(const FockVector& a, const FockVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size() || a.nAtoms != b.nAtoms || a.nModes != b.nModes)
    throw ShapeError("inner: Fock vectors differ in shape");
  cplx s{};
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

double mean_photon_number(const FockVector& v, std::size_t mode) {
  if (mode >= v.nModes) throw ShapeError("mean_photon_number: mode out of range");
  double s = 0.0;
  for (std::size_t i = 0; i < v.amplitudes.size(); ++i)
    s += static_cast<double>(v.photons(i, mode)) * std::norm(v.amplitudes[i]);
  return s / norm2(v);
}

double outcome_probability(const FockVector& v, const AtomWord& word) {
  if (word.size() != v.nAtoms) throw ShapeError("outcome_probability: word length must equal atom count");
  std::size_t atomIndex = 0;
  for (char c : word) atomIndex = (atomIndex << 1) | (c == 'e' ? 1u : 0u);
  const std::size_t field = v.field_dim();
  double s = 0.0;
  for (std::size_t f = 0; f < field; ++f) s += std::norm(v.amplitudes[atomIndex * field + f]);
  return s / norm2(v);
}

CompensatedFidelity phase_compensated_fidelity(const FockVector& v, const FockVector& ref, std::size_t atom) {
  if (v.amplitudes.size() != ref.amplitudes.size() || atom >= v.nAtoms)
    throw ShapeError("phase_compensated_fidelity: shape mismatch");
  cplx full{}, excited{}, ground{};
  for (std::size_t i = 0; i < v.amplitudes.size(); ++i) {
    const cplx term = std::conj(ref.amplitudes[i]) * v.amplitudes[i];
    full += term;
    (v.excited(i, atom) ? excited : ground) += term;
  }
  const double comp = std::abs(excited) + std::abs(ground);
  return {std::norm(full), comp * comp};
}

DispersiveValidation validate_dispersive(const Program& p, double detuningRatio, double tailEps) {
  validate(p);
  std::size_t first = p.steps.size();
  std::size_t last = 0;
  for (std::size_t k = 0; k < p.steps.size(); ++k) {
    if (std::holds_alternative<TransitStep>(p.steps[k])) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == p.steps.size()) throw ValidationError("dispersive validation: program has no transit step");
  for (std::size_t k = 0; k <= last; ++k) {
    if (std::holds_alternative<MeasureStep>(p.steps[k]))
      throw ValidationError("dispersive validation: measurement before the last transit");
    if (k > first && std::holds_alternative<InjectStep>(p.steps[k]))
      throw ValidationError("dispersive validation: injection inside the transit section");
  }

  Program prefix{p.initial, {p.steps.begin(), p.steps.begin() + static_cast<std::ptrdiff_t>(first)}, {}};
  Program upto{p.initial, {p.steps.begin(), p.steps.begin() + static_cast<std::ptrdiff_t>(last + 1)}, {}};
  const HybridState start = execute(prefix).preMeasurement;
  const HybridState predicted = execute(upto).preMeasurement;

  DispersiveValidation out;
  out.detuningRatio = detuningRatio;
  out.cutoff = std::max<std::size_t>(1, cutoff_for(std::max(max_amplitude(start), max_amplitude(predicted)), tailEps));
  out.compensatedAtom = std::get<TransitStep>(p.steps[first]).atom;

  FockVector v = hybrid_to_fock(start, out.cutoff);
  for (std::size_t k = first; k <= last; ++k) {
    if (const auto* t = std::get_if<TransitStep>(&p.steps[k])) {
      DispersiveParams dp = std::holds_alternative<DispersiveParams>(t->phase)
                                ? std::get<DispersiveParams>(t->phase)
                                : DispersiveParams::for_phase(1.0, detuningRatio, t->theta().value());
      if (dp.transit_time() < 0.0) dp = DispersiveParams(dp.coupling(), -dp.detuning(), -dp.transit_time());
      const auto prop = jc_interaction_propagator(dp.coupling(), dp.detuning(), dp.transit_time(), out.cutoff);
      v = jc_evolve(v, t->atom, t->mode, prop);
    } else if (const auto* r = std::get_if<RamseyStep>(&p.steps[k])) {
      v = ramsey(v, r->atom);
    }
  }
  const FockVector ref = hybrid_to_fock(predicted, out.cutoff);
  const auto f = phase_compensated_fidelity(v, ref, out.compensatedAtom);
  out.raw = f.raw;
  out.compensated = f.compensated;
  out.tailBound = v.tailBound + ref.tailBound;
  return out;
}

Eigen::MatrixXcd density_to_fock(const DensityHybrid& rho, std::size_t cutoff) {
  if (rho.nAtoms != 0 || rho.nModes != 1) throw ShapeError("density_to_fock: expects a single mode without atoms");
  const auto d = static_cast<Eigen::Index>(cutoff + 1);
  std::vector<Eigen::VectorXcd> cols;
  for (const auto& k : rho.kets) {
    const auto cf = coherent_fock(k.modes[0], cutoff);
    cols.emplace_back(Eigen::Map<const Eigen::VectorXcd>(cf.amplitudes.data(), d));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (std::size_t l = 0; l < cols.size(); ++l)
      m += rho.coeffs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * cols[k] * cols[l].adjoint();
  return m;
}

namespace {

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, double kappa) {
  const Eigen::Index d = rho.rows();
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      cplx jump{};
      if (m + 1 < d && n + 1 < d) jump = std::sqrt(static_cast<double>((m + 1) * (n + 1))) * rho(m + 1, n + 1);
      out(m, n) = kappa * (jump - 0.5 * static_cast<double>(m + n) * rho(m, n));
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd lindblad_damp_oracle(const Eigen::MatrixXcd& rho, double kappa, double t, std::size_t steps) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("lindblad_damp_oracle: density matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("lindblad_damp_oracle: density matrix is not Hermitian");
  if (steps == 0) throw std::invalid_argument("lindblad_damp_oracle: steps must be positive");
  const double h = t / static_cast<double>(steps);
  Eigen::MatrixXcd r = rho;
  for (std::size_t s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd k1 = lindblad_rhs(r, kappa);
    const Eigen::MatrixXcd k2 = lindblad_rhs(r + 0.5 * h * k1, kappa);
    const Eigen::MatrixXcd k3 = lindblad_rhs(r + 0.5 * h * k2, kappa);
    const Eigen::MatrixXcd k4 = lindblad_rhs(r + h * k3, kappa);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

LindbladRun lindblad_damp_converged(const Eigen::MatrixXcd& rho, double kappa, double t, double tol,
                                    std::size_t initialSteps) {
  std::size_t steps = std::max<std::size_t>(1, initialSteps);
  Eigen::MatrixXcd prev = lindblad_damp_oracle(rho, kappa, t, steps);
  for (int round = 0; round < 20; ++round) {
    steps *= 2;
    Eigen::MatrixXcd cur = lindblad_damp_oracle(rho, kappa, t, steps);
    const double change = (cur - prev).cwiseAbs().maxCoeff();
    if (change < tol) return {std::move(cur), steps, change};
    prev = std::move(cur);
  }
  throw ToleranceError("lindblad_damp_converged: no convergence");
}

}  // namespace ecs
