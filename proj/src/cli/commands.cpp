#include "ecs/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ecs/analysis.hpp"
#include "ecs/cli/protocol_spec.hpp"
#include "ecs/decoherence.hpp"
#include "ecs/errors.hpp"
#include "ecs/fock_numeric.hpp"
#include "ecs/serialize.hpp"

namespace ecs::cli {

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw ValidationError("empty complex number");
  if (s.front() == '[') {
    try {
      return complex_from_json(Json::parse(s));
    } catch (const Json::exception&) {
      throw ValidationError("cannot parse complex number '" + text + "'");
    }
  }
  auto to_double = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse complex number '" + text + "'");
    }
    if (used != part.size() || !std::isfinite(v)) throw ValidationError("cannot parse complex number '" + text + "'");
    return v;
  };
  const char last = s.back();
  if (last != 'i' && last != 'j') {
    if (s == "+" || s == "-") throw ValidationError("cannot parse complex number '" + text + "'");
    return {to_double(s), 0.0};
  }
  s.pop_back();
  // Split before the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(s)};
  return {to_double(s.substr(0, split)), to_double(s.substr(split))};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
    if (used != item.size()) throw ValidationError("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

namespace {

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> s;
  for (char c : text) {
    if (c == '+') s.push_back(1);
    else if (c == '-') s.push_back(-1);
    else if (c != ',' && c != ' ') throw ValidationError("signs must be a string of '+' and '-'");
  }
  return s;
}

Json tool_json() { return Json{{"name", kToolName}, {"version", kToolVersion}}; }

void emit(const Json& report, const std::string& outPath, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (outPath.empty()) {
    out << text;
    return;
  }
  std::ofstream f(outPath, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file '" + outPath + "'");
  f << text;
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open table file '" + path + "'");
  f << header << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << "\n";
  }
}

struct RunOptions {
  bool validateFock = false;
  double detuningRatio = 50.0;
  double tailEps = kDefaultTailEpsilon;
  bool entanglement = false;
  bool sample = false;
  std::uint64_t seed = 0;
  bool timing = false;
  std::string out;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_flag("--validate-fock", o.validateFock, "Replay the transits with the exact Jaynes-Cummings propagator");
  cmd->add_option("--detuning-ratio", o.detuningRatio, "delta/g used for the exact replay");
  cmd->add_option("--tail-eps", o.tailEps, "Fock truncation tail bound");
  cmd->add_flag("--entanglement", o.entanglement, "Add entropies and negativities of the outcome states");
  cmd->add_flag("--sample", o.sample, "Sample one outcome with --seed");
  cmd->add_option("--seed", o.seed, "Seed for --sample");
  cmd->add_flag("--timing", o.timing, "Add wall-clock time (makes the report non-reproducible)");
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
}

HybridState rescale_modes(const HybridState& psi, const std::vector<std::size_t>& modes, double factor) {
  auto branches = psi.branches();
  for (auto& b : branches)
    for (std::size_t m : modes) b.modes[m] = b.modes[m] * cplx{factor, 0.0};
  return HybridState(psi.atoms(), psi.modes(), std::move(branches));
}

Json decoherence_block(const ProtocolResult& r, const DampingSpec& d, std::size_t nModes) {
  std::vector<std::size_t> modes = d.modes;
  if (modes.empty())
    for (std::size_t m = 0; m < nModes; ++m) modes.push_back(m);
  const double eta = std::exp(-d.kappa * d.t);
  Json j{{"kappa", d.kappa}, {"t", d.t}, {"eta", eta}, {"modes", modes}};
  Json outcomes;
  for (const auto& [word, rec] : r.outcomes) {
    if (!rec.post) continue;
    DensityHybrid rho = to_density(*rec.post);
    for (std::size_t m : modes) rho = damp(rho, m, d.kappa, d.t);
    const HybridState ideal = normalize(rescale_modes(*rec.post, modes, std::sqrt(eta)));
    Json o;
    o["trace"] = trace(rho).real();
    o["fidelityToRescaledIdeal"] = damped_fidelity(rho, ideal);
    o["fidelityToUndamped"] = damped_fidelity(rho, *rec.post);
    outcomes[word.empty() ? "-" : word] = o;
  }
  j["outcomes"] = outcomes;
  return j;
}

Json entanglement_block(const ProtocolResult& r, const ReferenceSpec& ref) {
  Json j;
  for (const auto& [word, rec] : r.outcomes) {
    if (!rec.post || rec.post->atoms() != 0 || rec.post->size() == 0) continue;
    const CoherentAmplitude beta =
        ref.kind != ReferenceKind::None ? ref.beta : rec.post->branches().front().modes.front();
    Json o;
    try {
      const QubitizedState q = qubitize(*rec.post, beta);
      Json cuts = Json::array();
      for (const auto& cut : mode_bipartitions(rec.post->modes())) {
        std::string label;
        for (std::size_t m : cut) label += std::to_string(m);
        cuts.push_back(Json{{"subset", label}, {"entropyBits", reduced_entropy(q, cut)}, {"negativity", negativity(q, cut)}});
      }
      o["beta"] = complex_to_json(beta.value());
      o["cuts"] = cuts;
    } catch (const AmplitudeOffGrid& e) {
      o["error"] = e.what();
    }
    j[word.empty() ? "-" : word] = o;
  }
  return j;
}

Json run_report(const ProtocolSpec& spec, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Program program = to_program(spec);
  const ProtocolResult result = execute(program);
  check_result(result);
  Json report;
  report["tool"] = tool_json();
  report["spec"] = spec_to_json(spec);
  report["result"] = result_to_json(result);
  if (o.validateFock) {
    Json v = validation_to_json(validate_dispersive(program, o.detuningRatio, o.tailEps));
    v["dispersiveRegime"] = std::abs(o.detuningRatio) >= 10.0;
    report["fockValidation"] = v;
  }
  if (spec.damping) report["decoherence"] = decoherence_block(result, *spec.damping, spec.nModes);
  if (o.entanglement) report["entanglement"] = entanglement_block(result, spec.reference);
  if (o.sample) {
    std::mt19937_64 rng(o.seed);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    std::string picked;
    for (const auto& [word, rec] : result.outcomes) {
      picked = word;
      acc += rec.probability;
      if (u < acc) break;
    }
    report["sample"] = Json{{"seed", o.seed}, {"outcome", picked.empty() ? "-" : picked}};
  }
  if (o.timing)
    report["wallClockSeconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entangled coherent states in dispersive cavity QED", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // run-ghz / run-w
  std::size_t n = 3;
  std::string alphaText = "1";
  std::string thetaText = "pi/2";
  double kappa = 0.0;
  double storage = 0.0;
  RunOptions ro;
  std::vector<std::string> weightTexts;

  auto* ghz = app.add_subcommand("run-ghz", "GHZ-type protocol: one atom through n cavities");
  ghz->add_option("--n", n, "Number of cavities")->check(CLI::PositiveNumber);
  ghz->add_option("--alpha", alphaText, "Injected coherent amplitude, e.g. 2 or 1+1i");
  ghz->add_option("--theta", thetaText, "Dispersive phase lambda*tau, e.g. pi/2");
  ghz->add_option("--kappa", kappa, "Cavity damping rate (1/s) during storage");
  ghz->add_option("--storage-time", storage, "Storage time (s) after preparation");
  add_run_options(ghz, ro);

  auto* w = app.add_subcommand("run-w", "W-type protocol: n atoms in a W state, one per cavity");
  w->add_option("--n", n, "Number of atoms and cavities")->check(CLI::Range(2, 12));
  w->add_option("--alpha", alphaText, "Injected coherent amplitude");
  w->add_option("--theta", thetaText, "Dispersive phase lambda*tau");
  w->add_option("--weight", weightTexts, "W-register weight per atom (repeat n times)");
  w->add_option("--kappa", kappa, "Cavity damping rate (1/s) during storage");
  w->add_option("--storage-time", storage, "Storage time (s) after preparation");
  add_run_options(w, ro);

  std::string specPath;
  auto* rs = app.add_subcommand("run-spec", "Run a protocol description file");
  rs->add_option("path", specPath, "Protocol spec (JSON)")->required();
  add_run_options(rs, ro);

  // validate-dispersive
  std::string ratiosText = "10,20,50,100";
  std::string family = "ghz";
  std::string csvPath;
  std::string outPath;
  double tailEps = kDefaultTailEpsilon;
  auto* vd = app.add_subcommand("validate-dispersive", "Exact Jaynes-Cummings replay vs the dispersive prediction");
  vd->add_option("--ratios", ratiosText, "Comma-separated delta/g values");
  vd->add_option("--alpha", alphaText, "Injected amplitude");
  vd->add_option("--n", n, "Number of cavities")->check(CLI::PositiveNumber);
  vd->add_option("--protocol", family, "ghz or w")->check(CLI::IsMember({"ghz", "w"}));
  vd->add_option("--tail-eps", tailEps, "Fock truncation tail bound");
  vd->add_option("--csv", csvPath, "Also write the table as CSV");
  vd->add_option("--out", outPath, "Write the summary here instead of stdout");

  // decohere
  std::string alphaList = "0.5,1,2";
  std::string stateFamily = "ghz-plus";
  std::string signsText;
  double dt = 1e-4;
  double dk = 1e3;
  auto* dc = app.add_subcommand("decohere", "Cavity damping of ideal entangled coherent states");
  dc->add_option("--family", stateFamily, "ghz-plus, ghz-minus or w");
  dc->add_option("--n", n, "Number of modes")->check(CLI::PositiveNumber);
  dc->add_option("--alpha", alphaList, "Comma-separated real amplitudes");
  dc->add_option("--kappa", dk, "Damping rate (1/s)");
  dc->add_option("--t", dt, "Damping time (s)");
  dc->add_option("--signs", signsText, "W signs, e.g. +-+");
  dc->add_option("--csv", csvPath, "Also write the table as CSV");
  dc->add_option("--out", outPath, "Write the summary here instead of stdout");

  // sweep-entanglement
  std::string betaList = "0.3,0.5,1,1.5,2,3";
  auto* se = app.add_subcommand("sweep-entanglement", "Entropies and negativities over a beta grid");
  se->add_option("--family", stateFamily, "ghz-plus, ghz-minus or w");
  se->add_option("--n", n, "Number of modes")->check(CLI::Range(2, 10));
  se->add_option("--beta", betaList, "Comma-separated real amplitudes");
  se->add_option("--signs", signsText, "W signs, e.g. +-+");
  se->add_option("--csv", csvPath, "Also write the table as CSV");
  se->add_option("--out", outPath, "Write the summary here instead of stdout");

  // timescales
  TimescaleParams tp;
  auto* ts = app.add_subcommand("timescales", "Transit time against atomic and cavity lifetimes");
  ts->add_option("--t-at", tp.atomicLifetime, "Atomic radiative lifetime (s)");
  ts->add_option("--t-r", tp.cavityLifetime, "Cavity lifetime (s)");
  ts->add_option("--transit", tp.transitTime, "Atom transit time (s)");
  ts->add_option("--q", tp.qualityFactor, "Cavity quality factor");
  ts->add_option("--nu0", tp.transitionFrequency, "Transition frequency (Hz)");
  ts->add_option("--out", outPath, "Write the report here instead of stdout");

  std::vector<std::string> argvStore{kToolName};
  argvStore.insert(argvStore.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argvStore) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    if (*ghz || *w) {
      const CoherentAmplitude alpha(parse_complex(alphaText));
      const Angle theta = Angle::parse(thetaText);
      ProtocolSpec spec;
      if (*ghz) {
        spec = ghz_spec(n, alpha, theta);
      } else {
        std::vector<cplx> weights;
        for (const auto& t : weightTexts) weights.push_back(parse_complex(t));
        if (!weights.empty() && weights.size() != n) throw ValidationError("--weight must be given once per atom");
        spec = w_spec(n, alpha, theta, weights);
      }
      if (kappa != 0.0 || storage != 0.0) {
        if (kappa < 0.0 || storage < 0.0) throw ValidationError("--kappa and --storage-time must be non-negative");
        spec.damping = DampingSpec{kappa, storage, {}};
      }
      emit(run_report(spec, ro), ro.out, out);
    } else if (*rs) {
      const ProtocolSpec spec = parse_spec_text(read_file(specPath));
      emit(run_report(spec, ro), ro.out, out);
    } else if (*vd) {
      const CoherentAmplitude alpha(parse_complex(alphaText));
      const auto ratios = parse_list(ratiosText);
      const Program p = family == "ghz" ? ghz_program(n, alpha, Angle::pi_fraction(1, 2))
                                        : w_program(n, alpha, Angle::pi_fraction(1, 2));
      Json rows = Json::array();
      std::vector<std::vector<std::string>> table;
      std::vector<double> comp;
      double at50 = -1.0;
      for (double r : ratios) {
        const auto v = validate_dispersive(p, r, tailEps);
        rows.push_back(validation_to_json(v));
        table.push_back({format_number(r), format_number(v.raw), format_number(v.compensated),
                         std::to_string(v.cutoff), format_number(v.tailBound)});
        comp.push_back(v.compensated);
        if (r == 50.0) at50 = v.compensated;
      }
      bool monotone = true;
      for (std::size_t i = 1; i < comp.size(); ++i) monotone = monotone && comp[i] > comp[i - 1];
      Json summary;
      summary["tool"] = tool_json();
      summary["protocol"] = family;
      summary["n"] = n;
      summary["alpha"] = complex_to_json(alpha.value());
      summary["theta"] = "pi/2";
      summary["rows"] = rows;
      summary["compensatedIncreasing"] = monotone;
      if (at50 >= 0.0) summary["compensatedAtRatio50"] = at50;
      write_csv(csvPath, "ratio,raw_fidelity,compensated_fidelity,cutoff,tail_bound", table);
      emit(summary, outPath, out);
    } else if (*dc) {
      const EcsFamily fam = parse_family(stateFamily);
      const auto alphas = parse_list(alphaList);
      const auto signs = parse_signs(signsText);
      const double eta = std::exp(-dk * dt);
      Json rows = Json::array();
      std::vector<std::vector<std::string>> table;
      std::vector<double> fid;
      for (double a : alphas) {
        const HybridState psi = family_state(fam, n, a, signs);
        const DensityHybrid rho = damp_all(to_density(psi), dk, dt);
        const HybridState ideal = normalize(rescale_amplitudes(psi, std::sqrt(eta)));
        const double fr = damped_fidelity(rho, ideal);
        const double fu = damped_fidelity(rho, psi);
        const double tr = trace(rho).real();
        rows.push_back(Json{{"alpha", a}, {"eta", eta}, {"fidelityToRescaledIdeal", fr}, {"fidelityToUndamped", fu}, {"trace", tr}});
        table.push_back({format_number(a), format_number(eta), format_number(fr), format_number(fu), format_number(tr)});
        fid.push_back(fr);
      }
      bool decreasing = true;
      for (std::size_t i = 1; i < fid.size(); ++i) decreasing = decreasing && fid[i] <= fid[i - 1];
      Json summary;
      summary["tool"] = tool_json();
      summary["family"] = family_name(fam);
      summary["n"] = n;
      summary["kappa"] = dk;
      summary["t"] = dt;
      summary["rows"] = rows;
      summary["fidelityNonIncreasingInAlpha"] = decreasing;
      write_csv(csvPath, "alpha,eta,fidelity_rescaled,fidelity_undamped,trace", table);
      emit(summary, outPath, out);
    } else if (*se) {
      const EcsFamily fam = parse_family(stateFamily);
      const auto betas = parse_list(betaList);
      const auto signs = parse_signs(signsText);
      const SweepTable t = entanglement_sweep(fam, n, betas, signs);
      Json rows = Json::array();
      std::vector<std::vector<std::string>> table;
      for (const auto& r : t.rows) {
        rows.push_back(Json{{"beta", r.beta}, {"bipartition", r.bipartition}, {"entropyBits", r.entropy}, {"negativity", r.negativity}});
        table.push_back({format_number(r.beta), r.bipartition, format_number(r.entropy), format_number(r.negativity)});
      }
      Json constant = Json::array();
      for (std::size_t c = 0; c < t.bipartitions.size(); ++c)
        constant.push_back(Json{{"bipartition", t.bipartitions[c]},
                                {"entropyConstant", static_cast<bool>(t.entropyConstant[c])},
                                {"negativityConstant", static_cast<bool>(t.negativityConstant[c])}});
      Json summary;
      summary["tool"] = tool_json();
      summary["family"] = family_name(fam);
      summary["n"] = n;
      summary["rows"] = rows;
      summary["constantAcrossGrid"] = constant;
      write_csv(csvPath, "beta,bipartition,entropy,negativity", table);
      emit(summary, outPath, out);
    } else if (*ts) {
      Json report = timescales_to_json(tp, timescale_report(tp));
      report["tool"] = tool_json();
      emit(report, outPath, out);
    }
  } catch (const ZeroNormError& e) {
    err << "impossible outcome: " << e.what() << "\n";
    return kImpossibleOutcome;
  } catch (const ToleranceError& e) {
    err << "tolerance failure: " << e.what() << "\n";
    return kToleranceFailure;
  } catch (const std::invalid_argument& e) {
    // ValidationError, ShapeError, AmplitudeOffGrid and bad numeric input.
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kOk;
}

}  // namespace ecs::cli
