#include "ecs/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ecs::kernels {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

struct Strides {
  std::size_t field;      // (cutoff+1)^nModes
  std::size_t mode;       // stride of the selected mode digit
  std::size_t atom;       // stride of the selected atom bit
  std::size_t total;
};

Strides strides(FockLayout l, std::size_t atom, std::size_t mode) {
  Strides s{};
  s.field = ipow(l.cutoff + 1, l.nModes);
  s.mode = l.nModes == 0 ? 1 : ipow(l.cutoff + 1, l.nModes - 1 - mode);
  s.atom = l.nAtoms == 0 ? s.field : s.field * (std::size_t{1} << (l.nAtoms - 1 - atom));
  s.total = s.field << l.nAtoms;
  return s;
}

std::size_t atom_index(const AtomWord& word) {
  std::size_t idx = 0;
  for (char c : word) idx = (idx << 1) | (c == 'e' ? 1u : 0u);
  return idx;
}

std::vector<cplx> powers(cplx z, std::size_t count) {
  std::vector<cplx> p(count);
  cplx acc{1.0, 0.0};
  for (std::size_t n = 0; n < count; ++n) {
    p[n] = acc;
    acc *= z;
  }
  return p;
}

struct ExpandedBranch {
  std::size_t atomOffset;
  cplx coeff;
  std::vector<std::vector<cplx>> perMode;
};

std::vector<ExpandedBranch> expand_branches(std::span<const Branch> branches, FockLayout layout) {
  const std::size_t field = ipow(layout.cutoff + 1, layout.nModes);
  std::vector<ExpandedBranch> out;
  out.reserve(branches.size());
  for (const auto& b : branches) {
    ExpandedBranch e{atom_index(b.atomWord) * field, b.coeff, {}};
    for (const auto& a : b.modes) e.perMode.push_back(coherent_fock(a, layout.cutoff).amplitudes);
    out.push_back(std::move(e));
  }
  return out;
}

inline cplx damp_factor(cplx ak, cplx al, double eta) {
  return std::exp((1.0 - eta) * (std::conj(al) * ak - 0.5 * (std::norm(ak) + std::norm(al))));
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------- serial

namespace serial {

void gram_fill(std::span<const Ket> rows, std::span<const Ket> cols, Eigen::MatrixXcd& out) {
  out.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t l = 0; l < cols.size(); ++l)
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = ket_overlap(rows[k], cols[l]);
}

void fock_expand(std::span<const Branch> branches, FockLayout layout, std::span<cplx> out) {
  const std::size_t field = ipow(layout.cutoff + 1, layout.nModes);
  const auto expanded = expand_branches(branches, layout);
  for (const auto& b : expanded) {
    for (std::size_t f = 0; f < field; ++f) {
      cplx amp = b.coeff;
      std::size_t rem = f;
      std::size_t stride = field;
      for (std::size_t m = 0; m < layout.nModes; ++m) {
        stride /= layout.cutoff + 1;
        amp *= b.perMode[m][rem / stride];
        rem %= stride;
      }
      out[b.atomOffset + f] += amp;
    }
  }
}

void jc_apply(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
              std::span<const Block2> blocks, cplx groundPhase) {
  const auto s = strides(layout, atom, mode);
  for (std::size_t idx = 0; idx < s.total; ++idx) {
    const bool excited = (idx / s.atom) % 2 == 1;
    const std::size_t n = (idx / s.mode) % (layout.cutoff + 1);
    if (excited) {
      const Block2& u = blocks[n];
      if (n < layout.cutoff) {
        const std::size_t partner = idx - s.atom + s.mode;
        const cplx e = amps[idx];
        const cplx g = amps[partner];
        amps[idx] = u[0] * e + u[1] * g;
        amps[partner] = u[2] * e + u[3] * g;
      } else {
        amps[idx] *= u[0];
      }
    } else if (n == 0) {
      amps[idx] *= groundPhase;
    }
  }
}

void dispersive_phase(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
                      cplx phasor) {
  const auto s = strides(layout, atom, mode);
  for (std::size_t idx = 0; idx < s.total; ++idx) {
    const bool excited = (idx / s.atom) % 2 == 1;
    const std::size_t n = (idx / s.mode) % (layout.cutoff + 1);
    cplx z{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) z *= excited ? std::conj(phasor) : phasor;
    amps[idx] *= z;
  }
}

void atom_unitary(std::span<cplx> amps, FockLayout layout, std::size_t atom, const Block2& u) {
  const auto s = strides(layout, atom, 0);
  for (std::size_t idx = 0; idx < s.total; ++idx) {
    if ((idx / s.atom) % 2 == 1) continue;
    const std::size_t gIdx = idx;
    const std::size_t eIdx = idx + s.atom;
    const cplx e = amps[eIdx];
    const cplx g = amps[gIdx];
    amps[eIdx] = u[0] * e + u[1] * g;
    amps[gIdx] = u[2] * e + u[3] * g;
  }
}

void damp_coefficients(Eigen::MatrixXcd& coeffs, std::span<const cplx> modeAmps, double eta) {
  for (Eigen::Index k = 0; k < coeffs.rows(); ++k)
    for (Eigen::Index l = 0; l < coeffs.cols(); ++l)
      coeffs(k, l) *= damp_factor(modeAmps[static_cast<std::size_t>(k)], modeAmps[static_cast<std::size_t>(l)], eta);
}

}  // namespace serial

// ---------------------------------------------------------------- omp

namespace omp {

void gram_fill(std::span<const Ket> rows, std::span<const Ket> cols, Eigen::MatrixXcd& out) {
  const auto nr = static_cast<std::ptrdiff_t>(rows.size());
  const auto nc = static_cast<std::ptrdiff_t>(cols.size());
  out.resize(nr, nc);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t k = 0; k < nr; ++k)
    for (std::ptrdiff_t l = 0; l < nc; ++l) out(k, l) = ket_overlap(rows[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(l)]);
}

void fock_expand(std::span<const Branch> branches, FockLayout layout, std::span<cplx> out) {
  const std::size_t field = ipow(layout.cutoff + 1, layout.nModes);
  const auto expanded = expand_branches(branches, layout);
  const std::size_t base = layout.cutoff + 1;
  const auto nf = static_cast<std::ptrdiff_t>(field);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t fi = 0; fi < nf; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    std::array<std::size_t, 16> digits{};
    std::vector<std::size_t> wide;
    std::size_t* d = digits.data();
    if (layout.nModes > digits.size()) {
      wide.resize(layout.nModes);
      d = wide.data();
    }
    std::size_t rem = f;
    for (std::size_t m = layout.nModes; m-- > 0;) {
      d[m] = rem % base;
      rem /= base;
    }
    for (const auto& b : expanded) {
      cplx amp = b.coeff;
      for (std::size_t m = 0; m < layout.nModes; ++m) amp *= b.perMode[m][d[m]];
      out[b.atomOffset + f] += amp;
    }
  }
}

void jc_apply(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
              std::span<const Block2> blocks, cplx groundPhase) {
  const auto s = strides(layout, atom, mode);
  const std::size_t base = layout.cutoff + 1;
  const std::size_t atomLow = s.atom / s.field;  // 2^{nAtoms-1-atom}
  const std::size_t atomRest = std::size_t{1} << (layout.nAtoms - 1);
  const std::size_t fieldRest = s.field / base;
  const auto count = static_cast<std::ptrdiff_t>(atomRest * fieldRest);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < count; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const std::size_t ar = r / fieldRest;
    const std::size_t fr = r % fieldRest;
    const std::size_t atomPart = (ar / atomLow) * 2 * atomLow + (ar % atomLow);
    const std::size_t fieldPart = (fr / s.mode) * base * s.mode + (fr % s.mode);
    const std::size_t gBase = atomPart * s.field + fieldPart;
    const std::size_t eBase = gBase + s.atom;
    for (std::size_t n = 0; n < layout.cutoff; ++n) {
      const Block2& u = blocks[n];
      cplx& e = amps[eBase + n * s.mode];
      cplx& g = amps[gBase + (n + 1) * s.mode];
      const cplx e0 = e;
      const cplx g0 = g;
      e = u[0] * e0 + u[1] * g0;
      g = u[2] * e0 + u[3] * g0;
    }
    amps[eBase + layout.cutoff * s.mode] *= blocks[layout.cutoff][0];
    amps[gBase] *= groundPhase;
  }
}

void dispersive_phase(std::span<cplx> amps, FockLayout layout, std::size_t atom, std::size_t mode,
                      cplx phasor) {
  const auto s = strides(layout, atom, mode);
  const auto up = powers(phasor, layout.cutoff + 1);
  const auto down = powers(std::conj(phasor), layout.cutoff + 1);
  const auto total = static_cast<std::ptrdiff_t>(s.total);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const bool excited = (idx / s.atom) % 2 == 1;
    const std::size_t n = (idx / s.mode) % (layout.cutoff + 1);
    amps[idx] *= excited ? down[n] : up[n];
  }
}

void atom_unitary(std::span<cplx> amps, FockLayout layout, std::size_t atom, const Block2& u) {
  const auto s = strides(layout, atom, 0);
  const auto half = static_cast<std::ptrdiff_t>(s.total / 2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < half; ++i) {
    const auto r = static_cast<std::size_t>(i);
    const std::size_t gIdx = (r / s.atom) * 2 * s.atom + (r % s.atom);
    const std::size_t eIdx = gIdx + s.atom;
    const cplx e = amps[eIdx];
    const cplx g = amps[gIdx];
    amps[eIdx] = u[0] * e + u[1] * g;
    amps[gIdx] = u[2] * e + u[3] * g;
  }
}

void damp_coefficients(Eigen::MatrixXcd& coeffs, std::span<const cplx> modeAmps, double eta) {
  const auto n = static_cast<std::ptrdiff_t>(coeffs.rows());
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    for (std::ptrdiff_t l = 0; l < n; ++l)
      coeffs(k, l) *= damp_factor(modeAmps[static_cast<std::size_t>(k)], modeAmps[static_cast<std::size_t>(l)], eta);
}

}  // namespace omp

}  // namespace ecs::kernels
