// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
// Reference values come from closed forms or the independent oracles in
// oracles.hpp, never from the library's own numerics.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecs/analysis.hpp"
#include "ecs/cli/commands.hpp"
#include "ecs/coherent.hpp"
#include "ecs/decoherence.hpp"
#include "ecs/fock_numeric.hpp"
#include "ecs/protocol.hpp"
#include "oracles.hpp"

using namespace ecs;

namespace {

const Angle kHalfPi = Angle::pi_fraction(1, 2);
constexpr double kPi = std::numbers::pi;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      detail << what;
      ok = false;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": got " << got << " want " << want << " tol " << tol;
      expect(false, s.str());
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string word_of(std::size_t bits, std::size_t n) {
  std::string w;
  for (std::size_t i = 0; i < n; ++i) w.push_back((bits >> (n - 1 - i)) & 1U ? 'e' : 'g');
  return w;
}

double round_sig(double x, int digits) {
  const double p = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(x)))));
  return std::round(x * p) / p;
}

// ---------------------------------------------------------------------------

void ghz_three_modes(Check& c, std::ostringstream& info) {
  const auto t0 = std::chrono::steady_clock::now();
  for (cplx a : {cplx{0.5, 0}, cplx{1, 0}, cplx{2, 0}, cplx{1, 1}}) {
    const auto r = run_ghz(3, a, kHalfPi);
    const double pg = 0.5 * (1.0 + std::exp(-6.0 * std::norm(a)));
    c.near(r.outcomes.at("g").probability, pg, 1e-12, "P(g)");
    for (const auto& [w, rec] : r.outcomes) c.expect(rec.fidelity && *rec.fidelity >= 1.0 - 1e-12, "fidelity " + w);
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, "runtime");
  info << "runtime " << dt << " s";
}

void w_three_modes(Check& c, std::ostringstream& info) {
  const auto t0 = std::chrono::steady_clock::now();
  for (double a : {0.5, 1.0, 1.5}) {
    const auto r = run_w(3, a, kHalfPi);
    const double y = std::exp(-4.0 * a * a);
    const std::size_t N = cutoff_for(a, 1e-12);
    oracle::FockSim sim(3, 3, N);
    const double s = 1.0 / std::sqrt(3.0);
    sim.set_product({{"egg", s}, {"geg", s}, {"gge", s}}, {a, a, a});
    for (std::size_t i = 0; i < 3; ++i) sim.transit(i, i, kPi / 2);
    for (std::size_t i = 0; i < 3; ++i) sim.ramsey(i);
    for (std::size_t bits = 0; bits < 8; ++bits) {
      const auto w = word_of(bits, 3);
      const auto& rec = r.outcomes.at(w);
      const bool uniform = w == "ggg" || w == "eee";
      c.near(rec.probability, uniform ? (1 + 2 * y) / 8 : (3 - 2 * y) / 24, 1e-10, "closed form " + w);
      c.near(rec.probability, sim.probability(w), 1e-8, "Fock oracle " + w);
      c.expect(rec.fidelity && *rec.fidelity >= 1.0 - 1e-12, "fidelity " + w);
    }
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 5.0, "runtime");
  info << "runtime " << dt << " s";
}

void bracket_norm(Check& c, std::ostringstream& info) {
  const CoherentAmplitude beta(0.0, -1.0);
  const std::vector<CoherentAmplitude> bp(3, beta), bm(3, -beta);
  const HybridState bracket(1, 3, {{"g", 1.0, bp}, {"g", 1.0, bm}, {"e", 1.0, bp}, {"e", -1.0, bm}});
  const double n2 = norm2(bracket);
  c.near(n2, 4.0, 1e-12, "bracket norm^2");
  // The simulated pre-measurement state equals bracket / 2 up to a phase.
  const auto pre = prune(run_ghz(3, 1.0, kHalfPi).preMeasurement);
  c.near(std::abs(inner(scale(bracket, 0.5), pre)), 1.0, 1e-12, "overlap with simulated state");
  info << "norm^2 " << n2 << ", normalization 1/2";
}

void dispersive(Check& c, std::ostringstream& info) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto program = ghz_program(3, 1.0, kHalfPi);
  double prev = -1.0;
  info.precision(6);
  for (double ratio : {10.0, 20.0, 50.0, 100.0}) {
    const auto v = validate_dispersive(program, ratio);
    c.expect(v.compensated > prev, "compensated fidelity not increasing at ratio " + std::to_string(ratio));
    if (ratio == 50.0) c.expect(v.compensated >= 0.99, "compensated fidelity below 0.99 at ratio 50");
    prev = v.compensated;
    info << "r=" << ratio << " raw " << v.raw << " comp " << v.compensated << "; ";
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 30.0, "runtime");
  info << "runtime " << dt << " s";
}

void damping(Check& c, std::ostringstream& info) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nb(1, 3);
  std::uniform_real_distribution<double> mag(0.0, 2.5), ph(0.0, 2 * kPi);
  const std::size_t N = 45;
  const double kts[3] = {0.01, 0.1, 0.5};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Branch> b;
    const int k = nb(rng);
    for (int i = 0; i < k; ++i)
      b.push_back({"", oracle::random_cplx(rng, 1.0), {CoherentAmplitude(std::polar(mag(rng), ph(rng)))}});
    const auto psi = normalize(HybridState(0, 1, b));
    const auto rho = to_density(psi);
    const double kt = kts[trial % 3];

    // Oracle: dense Fock matrix from the closed-form amplitudes, RK4 in time.
    auto to_fock = [&](const DensityHybrid& d) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N + 1, N + 1);
      for (std::size_t i = 0; i < d.kets.size(); ++i) {
        const auto vi = oracle::coherent(d.kets[i].modes[0].value(), N);
        for (std::size_t j = 0; j < d.kets.size(); ++j) {
          const auto vj = oracle::coherent(d.kets[j].modes[0].value(), N);
          for (std::size_t p = 0; p <= N; ++p)
            for (std::size_t q = 0; q <= N; ++q) m(p, q) += d.coeffs(i, j) * vi[p] * std::conj(vj[q]);
        }
      }
      return m;
    };
    const Eigen::MatrixXcd numeric = oracle::lindblad_rk4(to_fock(rho), 1.0, kt, 2000);
    const auto analytic = damp(rho, 0, 1.0, kt);
    const double err = (to_fock(analytic) - numeric).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    c.expect(err <= 1e-6, "Lindblad mismatch in trial " + std::to_string(trial));
    c.near(trace(analytic).real(), 1.0, 1e-12, "trace");
    const auto split = damp(damp(rho, 0, 1.0, 0.4 * kt), 0, 1.0, 0.6 * kt);
    c.expect((split.coeffs - analytic.coeffs).cwiseAbs().maxCoeff() <= 1e-12, "semigroup coefficients");
    for (std::size_t i = 0; i < split.kets.size(); ++i)
      c.expect(std::abs(split.kets[i].modes[0].value() - analytic.kets[i].modes[0].value()) <= 1e-12,
               "semigroup amplitudes");
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 60.0, "runtime");
  info << "max |analytic - Lindblad| " << worst << ", runtime " << dt << " s";
}

void timescales(Check& c, std::ostringstream& info) {
  const auto r = timescale_report(TimescaleParams{});
  c.expect(round_sig(r.transitOverAtomic, 2) == 3.3e-3, "transit / atomic lifetime");
  c.expect(round_sig(r.transitOverCavity, 2) == 0.1, "transit / cavity lifetime");
  c.expect(round_sig(r.cavityLifetimeFromQ, 2) == 0.94e-3, "cavity lifetime from Q");
  c.expect(r.pass, "ratios below threshold");
  info << r.transitOverAtomic << ", " << r.transitOverCavity << ", " << r.cavityLifetimeFromQ * 1e3 << " ms";
}

// Mode-0 entropy of the GHZ- family in the cat basis; see the README note.
double ghz_minus_entropy(std::size_t n, double beta) {
  const double x = std::exp(-2 * beta * beta), y = std::pow(x, static_cast<double>(n - 1));
  const double p = (1 + x) * (1 - y), q = (1 - x) * (1 + y);
  const double a = p / (p + q), b = q / (p + q);
  return -a * std::log2(a) - b * std::log2(b);
}

void entanglement(Check& c, std::ostringstream& info) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> bit(0, 1), count(1, 6);
  for (int i = 0; i < 100; ++i) {
    const CoherentAmplitude beta(oracle::random_cplx(rng, 1.5));
    auto make = [&] {
      std::vector<Branch> b;
      const int k = count(rng);
      for (int j = 0; j < k; ++j) {
        Branch br;
        br.coeff = oracle::random_cplx(rng, 1.0);
        for (int m = 0; m < 3; ++m) br.modes.push_back(bit(rng) ? beta : -beta);
        b.push_back(std::move(br));
      }
      return HybridState(0, 3, b);
    };
    const auto a = make(), b = make();
    std::vector<cplx> ca, cb;
    std::vector<std::vector<cplx>> ma, mb;
    for (const auto& br : a.branches()) {
      ca.push_back(br.coeff);
      ma.push_back({br.modes[0].value(), br.modes[1].value(), br.modes[2].value()});
    }
    for (const auto& br : b.branches()) {
      cb.push_back(br.coeff);
      mb.push_back({br.modes[0].value(), br.modes[1].value(), br.modes[2].value()});
    }
    cplx want{};
    for (std::size_t p = 0; p < ca.size(); ++p)
      for (std::size_t q = 0; q < cb.size(); ++q) want += std::conj(ca[p]) * cb[q] * oracle::multi_overlap(ma[p], mb[q]);
    const cplx got = qubitize(a, beta).amplitudes.dot(qubitize(b, beta).amplitudes);
    c.expect(std::abs(got - want) <= 1e-12, "qubitized inner product " + std::to_string(i));
  }

  for (double beta : {0.3, 1.0, 2.0})
    c.near(reduced_entropy(qubitize(reference_ghz(2, beta, -1), beta), {0}), 1.0, 1e-10, "GHZ- n=2 entropy");
  // For n >= 3 the one-bit value only holds asymptotically; check the closed form instead.
  for (double beta : {0.3, 1.0, 2.0})
    c.near(reduced_entropy(qubitize(reference_ghz(3, beta, -1), beta), {0}), ghz_minus_entropy(3, beta), 1e-10,
           "GHZ- n=3 entropy vs closed form");

  const double s3 = reduced_entropy(qubitize(reference_ghz(3, 3.0, +1), 3.0), {0});
  c.near(s3, 1.0, 1e-3, "GHZ+ entropy at beta=3");
  const double neg = negativity(qubitize(reference_ghz(3, 5.0, +1), 5.0), {0});
  c.near(neg, 0.5, 1e-10, "GHZ+ negativity at beta=5");
  info << "GHZ+ S(beta=3) " << s3 << ", N(beta=5) " << neg;
  info << "\n      NOTE: GHZ- mode entropy is exactly 1 bit for every beta only at n=2; at n=3, beta=1 it is "
       << ghz_minus_entropy(3, 1.0);
}

void generalization(Check& c, std::ostringstream& info) {
  for (std::size_t n : {2U, 4U, 5U}) {
    for (double a : {0.6, 1.0}) {
      const auto g = run_ghz(n, a, kHalfPi);
      c.near(norm2(g.preMeasurement), 1.0, 1e-12, "GHZ unitarity n=" + std::to_string(n));
      double sum = 0.0;
      for (const auto& [w, rec] : g.outcomes) {
        sum += rec.probability;
        c.expect(rec.fidelity && *rec.fidelity >= 1.0 - 1e-12, "GHZ fidelity " + w);
      }
      c.near(sum, 1.0, 1e-12, "GHZ completeness");
      c.near(g.outcomes.at("g").probability, 0.5 * (1 + std::exp(-2.0 * static_cast<double>(n) * a * a)), 1e-12,
             "GHZ P(g) n=" + std::to_string(n));

      const auto w = run_w(n, a, kHalfPi);
      c.near(norm2(w.preMeasurement), 1.0, 1e-12, "W unitarity n=" + std::to_string(n));
      c.expect(w.outcomes.size() == (std::size_t{1} << n), "W outcome count");
      sum = 0.0;
      for (const auto& [word, rec] : w.outcomes) {
        sum += rec.probability;
        c.expect(rec.fidelity && *rec.fidelity >= 1.0 - 1e-12, "W fidelity " + word);
      }
      c.near(sum, 1.0, 1e-12, "W completeness");
    }
  }
  info << "n = 2, 4, 5";
}

void determinism(Check& c, std::ostringstream& info) {
  const std::string specs = ECS_SPECS_DIR;
  const std::vector<std::vector<std::string>> commands{
      {"run-ghz", "--entanglement", "--kappa", "1000", "--storage-time", "1e-4"},
      {"run-w", "--alpha", "0.7", "--sample", "--seed", "3"},
      {"run-spec", specs + "/ghz3.spec"},
      {"run-spec", specs + "/w3.spec"},
      {"validate-dispersive", "--ratios", "10,50"},
      {"decohere"},
      {"sweep-entanglement", "--family", "w"},
      {"timescales"}};
  auto invoke = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::make_pair(code, out.str());
  };
  for (const auto& cmd : commands) {
    const auto a = invoke(cmd), b = invoke(cmd);
    c.expect(a.first == 0, cmd[0] + " exit code");
    c.expect(a.second == b.second, cmd[0] + " output differs between runs");
  }
  c.expect(invoke({"run-spec", specs + "/ghz3.spec"}).second == invoke({"run-ghz"}).second, "spec vs run-ghz");
  info << commands.size() << " commands";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&, std::ostringstream&)>>> criteria{
      {"GHZ ECS, 3 modes: unit fidelity for alpha in {0.5, 1, 2, 1+i}", ghz_three_modes},
      {"W ECS, 3 modes: closed forms, Fock oracle, unit fidelity", w_three_modes},
      {"GHZ pre-measurement bracket has norm^2 4", bracket_norm},
      {"Dispersive limit: compensated fidelity increases, >= 0.99 at ratio 50", dispersive},
      {"Analytic damping matches Lindblad integration", damping},
      {"Timescale ratios", timescales},
      {"Qubitization and entanglement measures", entanglement},
      {"Generalization to n = 2, 4, 5", generalization},
      {"Deterministic CLI output", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    std::ostringstream info;
    info.precision(4);
    try {
      criteria[i].second(c, info);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (!c.ok) ++failures;
    std::printf("%s %zu  %s  [%s]%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), info.str().c_str(),
                c.ok ? "" : "\n      ", c.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
