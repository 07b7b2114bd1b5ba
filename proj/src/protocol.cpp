#include "ecs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ecs/errors.hpp"

namespace ecs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_atom(const HybridState& s, std::size_t atom, const char* op) {
  if (atom >= s.atoms())
    throw IndexError(std::string(op) + ": atom " + std::to_string(atom) + " out of range (" +
                     std::to_string(s.atoms()) + " atoms)");
}

void check_mode(const HybridState& s, std::size_t mode, const char* op) {
  if (mode >= s.modes())
    throw IndexError(std::string(op) + ": mode " + std::to_string(mode) + " out of range (" +
                     std::to_string(s.modes()) + " modes)");
}

}  // namespace

DispersiveParams::DispersiveParams(double coupling, double detuning, double transitTime)
    : g_(coupling), delta_(detuning), tau_(transitTime) {
  if (detuning == 0.0) throw std::invalid_argument("dispersive parameters need a nonzero detuning");
  if (!std::isfinite(coupling) || !std::isfinite(detuning) || !std::isfinite(transitTime))
    throw std::invalid_argument("dispersive parameters must be finite");
}

DispersiveParams DispersiveParams::for_phase(double coupling, double detuningRatio, double theta) {
  const double delta = detuningRatio * coupling;
  const double lambda = coupling * coupling / delta;
  return {coupling, delta, theta / lambda};
}

bool DispersiveParams::dispersive() const { return std::abs(delta_ / g_) >= 10.0; }

HybridState inject(const HybridState& s, std::size_t mode, CoherentAmplitude gamma) {
  check_mode(s, mode, "inject");
  const cplx y = gamma.value();
  auto branches = s.branches();
  for (auto& b : branches) {
    const cplx a = b.modes[mode].value();
    b.coeff *= std::exp(0.5 * (y * std::conj(a) - std::conj(y) * a));
    b.modes[mode] = CoherentAmplitude(a + y);
  }
  return HybridState(s.atoms(), s.modes(), std::move(branches));
}

HybridState dispersive_transit(const HybridState& s, std::size_t atom, std::size_t mode, const Angle& theta) {
  check_atom(s, atom, "dispersive_transit");
  check_mode(s, mode, "dispersive_transit");
  const cplx forward = theta.phasor();
  const cplx backward = std::conj(forward);
  auto branches = s.branches();
  for (auto& b : branches) b.modes[mode] = b.modes[mode] * (b.atomWord[atom] == 'e' ? backward : forward);
  return HybridState(s.atoms(), s.modes(), std::move(branches));
}

HybridState ramsey(const HybridState& s, std::size_t atom) {
  check_atom(s, atom, "ramsey");
  std::vector<Branch> out;
  out.reserve(2 * s.size());
  for (const auto& b : s.branches()) {
    Branch e = b;
    Branch g = b;
    e.atomWord[atom] = 'e';
    g.atomWord[atom] = 'g';
    if (b.atomWord[atom] == 'e') {
      e.coeff = b.coeff * kInvSqrt2;
      g.coeff = b.coeff * kInvSqrt2;
    } else {
      g.coeff = b.coeff * kInvSqrt2;
      e.coeff = -b.coeff * kInvSqrt2;
    }
    out.push_back(std::move(e));
    out.push_back(std::move(g));
  }
  return HybridState(s.atoms(), s.modes(), std::move(out));
}

HybridState project_atoms(const HybridState& s, const std::vector<std::size_t>& atoms, const AtomWord& outcome) {
  if (atoms.size() != outcome.size()) throw ShapeError("project_atoms: outcome length mismatch");
  for (std::size_t a : atoms) check_atom(s, a, "measure");
  if (!is_atom_word(outcome)) throw std::invalid_argument("measurement outcome must be 'e' or 'g'");
  std::vector<std::size_t> order = atoms;
  std::sort(order.begin(), order.end(), std::greater<>());
  if (std::adjacent_find(order.begin(), order.end()) != order.end())
    throw std::invalid_argument("project_atoms: repeated atom");
  std::vector<Branch> kept;
  for (const auto& b : s.branches()) {
    bool match = true;
    for (std::size_t i = 0; i < atoms.size(); ++i) match = match && b.atomWord[atoms[i]] == outcome[i];
    if (!match) continue;
    Branch r = b;
    for (std::size_t a : order) r.atomWord.erase(a, 1);
    kept.push_back(std::move(r));
  }
  return HybridState(s.atoms() - atoms.size(), s.modes(), std::move(kept));
}

Measurement measure(const HybridState& s, std::size_t atom, char outcome) {
  const HybridState projected = project_atoms(s, {atom}, AtomWord(1, outcome));
  const double p = norm2(projected) / norm2(s);
  if (!(p >= kZeroNormTolerance))
    throw ZeroNormError(std::string("outcome '") + outcome + "' on atom " + std::to_string(atom) +
                        " has probability " + std::to_string(p));
  return {p, normalize(projected)};
}

HybridState atomic_register(std::size_t nModes, const std::vector<std::pair<AtomWord, cplx>>& terms) {
  if (terms.empty()) throw std::invalid_argument("atomic register needs at least one term");
  std::vector<Branch> branches;
  for (const auto& [word, c] : terms) branches.push_back({word, c, std::vector<CoherentAmplitude>(nModes)});
  return HybridState(terms.front().first.size(), nModes, std::move(branches));
}

std::vector<std::pair<AtomWord, cplx>> w_register_terms(std::size_t n, const std::vector<cplx>& weights) {
  if (n == 0) throw std::invalid_argument("W register needs at least one atom");
  if (!weights.empty() && weights.size() != n) throw ShapeError("W weights must have one entry per atom");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weights.empty() ? 1.0 : std::norm(weights[i]);
  if (!(total > 0.0)) throw ZeroNormError("W weights are all zero");
  std::vector<std::pair<AtomWord, cplx>> terms;
  for (std::size_t i = 0; i < n; ++i) {
    AtomWord w(n, 'g');
    w[i] = 'e';
    terms.emplace_back(std::move(w), (weights.empty() ? cplx{1.0, 0.0} : weights[i]) / std::sqrt(total));
  }
  return terms;
}

HybridState reference_ghz(std::size_t n, CoherentAmplitude beta, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("reference_ghz: sign must be +1 or -1");
  std::vector<Branch> b;
  b.push_back({"", {1.0, 0.0}, std::vector<CoherentAmplitude>(n, beta)});
  b.push_back({"", {static_cast<double>(sign), 0.0}, std::vector<CoherentAmplitude>(n, -beta)});
  return normalize(HybridState(0, n, std::move(b)));
}

HybridState reference_w(std::size_t n, CoherentAmplitude beta, const std::vector<int>& signs,
                        const std::vector<cplx>& weights) {
  if (signs.size() != n) throw ShapeError("reference_w: need one sign per mode");
  if (!weights.empty() && weights.size() != n) throw ShapeError("reference_w: need one weight per mode");
  std::vector<Branch> b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<CoherentAmplitude> modes(n, beta);
    modes[i] = -beta;
    const cplx w = weights.empty() ? cplx{1.0, 0.0} : weights[i];
    b.push_back({"", w * static_cast<double>(signs[i]), std::move(modes)});
  }
  return normalize(prune(HybridState(0, n, std::move(b))));
}

std::vector<int> w_outcome_signs(const AtomWord& word) {
  const auto excited = static_cast<int>(std::count(word.begin(), word.end(), 'e'));
  std::vector<int> s;
  for (char c : word) s.push_back(((excited - (c == 'e' ? 1 : 0)) % 2 == 0) ? 1 : -1);
  return s;
}

std::string w_group_label(const AtomWord& word) {
  auto s = w_outcome_signs(word);
  const int flip = s.empty() ? 1 : s.front();
  std::string label;
  for (int v : s) label.push_back(v * flip > 0 ? '+' : '-');
  return label;
}

// ------------------------------------------------------------------ programs

Angle TransitStep::theta() const {
  if (const auto* a = std::get_if<Angle>(&phase)) return *a;
  return Angle::radians(std::get<DispersiveParams>(phase).theta());
}

namespace {

std::string step_name(const Step& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, InjectStep>) return "inject";
        if constexpr (std::is_same_v<T, TransitStep>) return "transit";
        if constexpr (std::is_same_v<T, RamseyStep>) return "ramsey";
        return "measure";
      },
      s);
}

}  // namespace

void validate(const Program& p) {
  const std::size_t nAtoms = p.initial.atoms();
  const std::size_t nModes = p.initial.modes();
  std::vector<bool> measured(nAtoms, false);
  bool tabulating = false;
  for (std::size_t k = 0; k < p.steps.size(); ++k) {
    const Step& step = p.steps[k];
    const std::string where = "step " + std::to_string(k) + " (" + step_name(step) + "): ";
    auto need_atom = [&](std::size_t a) {
      if (a >= nAtoms) throw ValidationError(where + "atom " + std::to_string(a) + " out of range");
      if (measured[a]) throw ValidationError(where + "atom " + std::to_string(a) + " was already measured");
    };
    auto need_mode = [&](std::size_t m) {
      if (m >= nModes) throw ValidationError(where + "mode " + std::to_string(m) + " out of range");
    };
    const auto* meas = std::get_if<MeasureStep>(&step);
    if (tabulating && (meas == nullptr || meas->outcome.has_value()))
      throw ValidationError(where + "tabulating measurements must form the final block");
    if (const auto* s = std::get_if<InjectStep>(&step)) need_mode(s->mode);
    if (const auto* s = std::get_if<TransitStep>(&step)) {
      need_atom(s->atom);
      need_mode(s->mode);
    }
    if (const auto* s = std::get_if<RamseyStep>(&step)) need_atom(s->atom);
    if (meas != nullptr) {
      need_atom(meas->atom);
      if (meas->outcome && *meas->outcome != 'e' && *meas->outcome != 'g')
        throw ValidationError(where + "outcome must be 'e', 'g' or tabulate");
      measured[meas->atom] = true;
      if (!meas->outcome) tabulating = true;
    }
  }
}

namespace {

std::optional<HybridState> reference_for(const ReferenceSpec& ref, const AtomWord& word, std::size_t nModes) {
  try {
    switch (ref.kind) {
      case ReferenceKind::GhzParity: {
        const auto excited = std::count(word.begin(), word.end(), 'e');
        return reference_ghz(nModes, ref.beta, excited % 2 == 0 ? 1 : -1);
      }
      case ReferenceKind::WSignGroup:
        if (word.size() != nModes) return std::nullopt;
        return reference_w(nModes, ref.beta, w_outcome_signs(word), ref.weights);
      case ReferenceKind::None:
        break;
    }
  } catch (const ZeroNormError&) {
  }
  return std::nullopt;
}

std::string group_for(const ReferenceSpec& ref, const AtomWord& word) {
  switch (ref.kind) {
    case ReferenceKind::GhzParity:
      return std::count(word.begin(), word.end(), 'e') % 2 == 0 ? "+" : "-";
    case ReferenceKind::WSignGroup:
      return w_group_label(word);
    case ReferenceKind::None:
      break;
  }
  return {};
}

}  // namespace

ProtocolResult execute(const Program& p) {
  validate(p);
  ProtocolResult result;
  HybridState state = p.initial;
  // Current position of each original atom inside the state's atom word.
  std::vector<std::size_t> pos(p.initial.atoms());
  for (std::size_t a = 0; a < pos.size(); ++a) pos[a] = a;
  auto remove_atom = [&pos](std::size_t atom) {
    const std::size_t gone = pos[atom];
    for (auto& q : pos)
      if (q != static_cast<std::size_t>(-1) && q > gone) --q;
    pos[atom] = static_cast<std::size_t>(-1);
  };

  std::size_t k = 0;
  for (; k < p.steps.size(); ++k) {
    const Step& step = p.steps[k];
    if (const auto* s = std::get_if<InjectStep>(&step)) {
      state = inject(state, s->mode, s->gamma);
    } else if (const auto* s = std::get_if<TransitStep>(&step)) {
      state = dispersive_transit(state, pos[s->atom], s->mode, s->theta());
    } else if (const auto* s = std::get_if<RamseyStep>(&step)) {
      state = prune(ramsey(state, pos[s->atom]));
    } else {
      const auto& m = std::get<MeasureStep>(step);
      if (!m.outcome) break;
      auto r = measure(state, pos[m.atom], *m.outcome);
      result.conditionalProbability *= r.probability;
      state = std::move(r.post);
      remove_atom(m.atom);
    }
  }

  result.preMeasurement = state;
  std::vector<std::size_t> positions;
  for (; k < p.steps.size(); ++k) {
    const auto& m = std::get<MeasureStep>(p.steps[k]);
    result.tabulatedAtoms.push_back(m.atom);
    positions.push_back(pos[m.atom]);
  }

  const std::size_t nOut = std::size_t{1} << positions.size();
  std::vector<AtomWord> words(nOut);
  for (std::size_t i = 0; i < nOut; ++i) {
    AtomWord w(positions.size(), 'g');
    for (std::size_t j = 0; j < positions.size(); ++j)
      if ((i >> (positions.size() - 1 - j)) & 1U) w[j] = 'e';
    words[i] = std::move(w);
  }
  const double total = norm2(state);
  if (!(total > kZeroNormTolerance)) throw ZeroNormError("protocol state has zero norm before measurement");

  std::vector<OutcomeRecord> records(nOut);
  const auto count = static_cast<std::ptrdiff_t>(nOut);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& word = words[static_cast<std::size_t>(i)];
    OutcomeRecord& rec = records[static_cast<std::size_t>(i)];
    const HybridState projected = project_atoms(state, positions, word);
    const double n2 = norm2(projected);
    rec.probability = n2 / total;
    rec.group = group_for(p.reference, word);
    if (rec.probability >= kZeroNormTolerance) {
      rec.post = scale(projected, 1.0 / std::sqrt(n2));
      if (rec.post->atoms() == 0) {
        if (auto ref = reference_for(p.reference, word, state.modes())) rec.fidelity = fidelity_pure(*rec.post, *ref);
      }
    }
  }
  for (std::size_t i = 0; i < nOut; ++i) result.outcomes.emplace(words[i], std::move(records[i]));
  return result;
}

Program ghz_program(std::size_t n, CoherentAmplitude alpha, const Angle& theta) {
  if (n < 1) throw std::invalid_argument("GHZ protocol needs n >= 1");
  Program p;
  // Laser excitation to |e>; the first Ramsey zone then gives (|e> + |g>)/sqrt2.
  p.initial = atomic_register(n, {{"e", {1.0, 0.0}}});
  for (std::size_t m = 0; m < n; ++m) p.steps.emplace_back(InjectStep{m, alpha});
  p.steps.emplace_back(RamseyStep{0});
  for (std::size_t m = 0; m < n; ++m) p.steps.emplace_back(TransitStep{0, m, theta});
  p.steps.emplace_back(RamseyStep{0});
  p.steps.emplace_back(MeasureStep{0, std::nullopt});
  p.reference = {ReferenceKind::GhzParity, alpha * std::conj(theta.phasor()), {}};
  return p;
}

Program w_program(std::size_t n, CoherentAmplitude alpha, const Angle& theta, const std::vector<cplx>& weights) {
  if (n < 2) throw std::invalid_argument("W protocol needs n >= 2");
  Program p;
  p.initial = atomic_register(n, w_register_terms(n, weights));
  for (std::size_t m = 0; m < n; ++m) p.steps.emplace_back(InjectStep{m, alpha});
  for (std::size_t i = 0; i < n; ++i) p.steps.emplace_back(TransitStep{i, i, theta});
  for (std::size_t i = 0; i < n; ++i) p.steps.emplace_back(RamseyStep{i});
  for (std::size_t i = 0; i < n; ++i) p.steps.emplace_back(MeasureStep{i, std::nullopt});
  // Atom i leaves alpha e^{-i theta} in cavity i and alpha e^{+i theta}
  // elsewhere; the reference puts -beta at slot i, so beta = alpha e^{+i theta}
  // (exact at theta = pi/2).
  p.reference = {ReferenceKind::WSignGroup, alpha * theta.phasor(), weights};
  return p;
}

ProtocolResult run_ghz(std::size_t n, CoherentAmplitude alpha, const Angle& theta) {
  return execute(ghz_program(n, alpha, theta));
}

ProtocolResult run_w(std::size_t n, CoherentAmplitude alpha, const Angle& theta, const std::vector<cplx>& weights) {
  return execute(w_program(n, alpha, theta, weights));
}

void check_result(const ProtocolResult& r, double tol) {
  double sum = 0.0;
  for (const auto& [word, rec] : r.outcomes) {
    if (rec.probability < -tol || rec.probability > 1.0 + tol)
      throw ToleranceError("probability of '" + word + "' outside [0, 1]");
    sum += rec.probability;
    if (rec.post && std::abs(norm2(*rec.post) - 1.0) > tol)
      throw ToleranceError("post-measurement state for '" + word + "' is not normalized");
  }
  if (std::abs(sum - 1.0) > tol) throw ToleranceError("outcome probabilities sum to " + std::to_string(sum));
}

}  // namespace ecs
