#include "ecs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ecs/errors.hpp"
#include "ecs/protocol.hpp"

namespace ecs {

namespace {

constexpr double kGridTolerance = 1e-10;
constexpr double kEigenClip = 1e-12;

bool near(cplx a, cplx b) { return std::abs(a - b) <= kGridTolerance; }

// Splits full-register indices into (subset index, rest index).
struct Split {
  std::vector<std::size_t> subset;
  std::vector<std::size_t> rest;
  std::size_t nq;

  std::pair<std::size_t, std::size_t> operator()(std::size_t idx) const {
    auto bit = [&](std::size_t q) { return (idx >> (nq - 1 - q)) & 1U; };
    std::size_t a = 0, b = 0;
    for (std::size_t q : subset) a = (a << 1) | bit(q);
    for (std::size_t q : rest) b = (b << 1) | bit(q);
    return {a, b};
  }
};

Split make_split(std::size_t nq, const std::vector<std::size_t>& subset) {
  Split s{subset, {}, nq};
  for (std::size_t q : subset)
    if (q >= nq) throw IndexError("qubit index " + std::to_string(q) + " out of range");
  for (std::size_t q = 0; q < nq; ++q)
    if (std::find(subset.begin(), subset.end(), q) == subset.end()) s.rest.push_back(q);
  if (s.rest.size() + subset.size() != nq) throw std::invalid_argument("repeated qubit index in subset");
  return s;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::string label_of(const std::vector<std::size_t>& subset, std::size_t n) {
  std::string a, b;
  for (std::size_t q = 0; q < n; ++q) {
    const bool in = std::find(subset.begin(), subset.end(), q) != subset.end();
    (in ? a : b) += std::to_string(q);
  }
  return a + "|" + b;
}

}  // namespace

QubitizedState qubitize(const HybridState& s, CoherentAmplitude beta) {
  const std::size_t nq = s.atoms() + s.modes();
  if (nq > 24) throw std::invalid_argument("qubitize: register too large");
  const double y = std::exp(-2.0 * beta.norm());
  const double cPlus = std::sqrt(0.5 * (1.0 + y));
  const double cMinus = std::sqrt(0.5 * (1.0 - y));
  QubitizedState q;
  q.nAtoms = s.atoms();
  q.nModes = s.modes();
  q.betaRef = beta;
  q.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << nq));
  const std::size_t modeStates = std::size_t{1} << s.modes();
  for (const auto& b : s.branches()) {
    std::size_t atomBits = 0;
    for (char c : b.atomWord) atomBits = (atomBits << 1) | (c == 'e' ? 1u : 0u);
    std::vector<int> sign(s.modes());
    for (std::size_t m = 0; m < s.modes(); ++m) {
      const cplx a = b.modes[m].value();
      if (near(a, beta.value()))
        sign[m] = 1;
      else if (near(a, -beta.value()))
        sign[m] = -1;
      else
        throw AmplitudeOffGrid("qubitize: mode " + std::to_string(m) + " amplitude is neither +beta nor -beta");
    }
    for (std::size_t pattern = 0; pattern < modeStates; ++pattern) {
      cplx amp = b.coeff;
      for (std::size_t m = 0; m < s.modes(); ++m) {
        const bool odd = (pattern >> (s.modes() - 1 - m)) & 1U;
        amp *= odd ? cMinus * sign[m] : cPlus;
      }
      q.amplitudes(static_cast<Eigen::Index>((atomBits << s.modes()) | pattern)) += amp;
    }
  }
  return q;
}

Eigen::MatrixXcd reduced_density(const QubitizedState& q, const std::vector<std::size_t>& subset) {
  const Split split = make_split(q.qubits(), subset);
  const auto da = static_cast<Eigen::Index>(std::size_t{1} << split.subset.size());
  const auto db = static_cast<Eigen::Index>(std::size_t{1} << split.rest.size());
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(da, db);
  for (Eigen::Index i = 0; i < q.amplitudes.size(); ++i) {
    auto [a, b] = split(static_cast<std::size_t>(i));
    psi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = q.amplitudes(i);
  }
  return psi * psi.adjoint();
}

double reduced_entropy(const QubitizedState& q, const std::vector<std::size_t>& subset) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(reduced_density(q, subset));
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double p = ev(i) < kEigenClip && ev(i) > -kEigenClip ? 0.0 : std::max(ev(i), 0.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

double negativity(const QubitizedState& q, const std::vector<std::size_t>& bipartition) {
  const std::size_t nq = q.qubits();
  make_split(nq, bipartition);  // validates indices
  const auto dim = q.amplitudes.size();
  const Eigen::MatrixXcd rho = q.amplitudes * q.amplitudes.adjoint();
  // Transpose the subset bits: element (i, j) moves to (i', j') with the
  // subset bits of i and j exchanged.
  std::size_t mask = 0;
  for (std::size_t b : bipartition) mask |= std::size_t{1} << (nq - 1 - b);
  Eigen::MatrixXcd pt(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const std::size_t ti = (ui & ~mask) | (uj & mask);
      const std::size_t tj = (uj & ~mask) | (ui & mask);
      pt(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(tj)) = rho(i, j);
    }
  }
  const Eigen::VectorXd ev = hermitian_eigenvalues(pt);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < -kEigenClip) neg -= ev(i);
  return neg;
}

QubitizedState qubit_ghz(std::size_t n) {
  QubitizedState q;
  q.nModes = n;
  q.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
  q.amplitudes(0) = M_SQRT1_2;
  q.amplitudes(q.amplitudes.size() - 1) = M_SQRT1_2;
  return q;
}

EcsFamily parse_family(const std::string& name) {
  if (name == "ghz-plus" || name == "ghz+") return EcsFamily::GhzPlus;
  if (name == "ghz-minus" || name == "ghz-") return EcsFamily::GhzMinus;
  if (name == "w" || name == "w-signed") return EcsFamily::WSigned;
  throw ValidationError("unknown state family '" + name + "'");
}

std::string family_name(EcsFamily f) {
  switch (f) {
    case EcsFamily::GhzPlus: return "ghz-plus";
    case EcsFamily::GhzMinus: return "ghz-minus";
    case EcsFamily::WSigned: return "w";
  }
  return {};
}

HybridState family_state(EcsFamily f, std::size_t n, CoherentAmplitude beta, const std::vector<int>& signs) {
  switch (f) {
    case EcsFamily::GhzPlus: return reference_ghz(n, beta, 1);
    case EcsFamily::GhzMinus: return reference_ghz(n, beta, -1);
    case EcsFamily::WSigned: return reference_w(n, beta, signs.empty() ? std::vector<int>(n, 1) : signs);
  }
  throw std::invalid_argument("family_state: bad family");
}

std::vector<std::vector<std::size_t>> mode_bipartitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  if (n < 2) return out;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t q = 0; q < n; ++q)
      if ((mask >> q) & 1U) s.push_back(q);
    if (2 * s.size() > n) continue;
    // For an even split keep the side containing mode 0.
    if (2 * s.size() == n && s.front() != 0) continue;
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

SweepTable entanglement_sweep(EcsFamily family, std::size_t n, const std::vector<double>& betaGrid,
                              const std::vector<int>& signs) {
  SweepTable t;
  t.family = family;
  t.n = n;
  const auto cuts = mode_bipartitions(n);
  std::vector<double> eMin(cuts.size(), 1e300), eMax(cuts.size(), -1e300);
  std::vector<double> nMin(cuts.size(), 1e300), nMax(cuts.size(), -1e300);
  for (double beta : betaGrid) {
    const HybridState psi = family_state(family, n, beta, signs);
    const QubitizedState q = qubitize(psi, beta);
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      SweepRow row{beta, label_of(cuts[c], n), reduced_entropy(q, cuts[c]), negativity(q, cuts[c])};
      eMin[c] = std::min(eMin[c], row.entropy);
      eMax[c] = std::max(eMax[c], row.entropy);
      nMin[c] = std::min(nMin[c], row.negativity);
      nMax[c] = std::max(nMax[c], row.negativity);
      t.rows.push_back(std::move(row));
    }
  }
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    t.bipartitions.push_back(label_of(cuts[c], n));
    t.entropyConstant.push_back(eMax[c] - eMin[c] <= 1e-6);
    t.negativityConstant.push_back(nMax[c] - nMin[c] <= 1e-6);
  }
  return t;
}

}  // namespace ecs
