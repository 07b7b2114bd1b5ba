#include "ecs/serialize.hpp"

#include <cstdio>

#include "ecs/errors.hpp"

namespace ecs {

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex numbers must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

Json modes_to_json(const std::vector<CoherentAmplitude>& modes) {
  Json arr = Json::array();
  for (const auto& a : modes) arr.push_back(complex_to_json(a.value()));
  return arr;
}

std::vector<CoherentAmplitude> modes_from_json(const Json& j) {
  std::vector<CoherentAmplitude> out;
  for (const auto& a : j) out.emplace_back(complex_from_json(a));
  return out;
}

}  // namespace

Json state_to_json(const HybridState& s) {
  Json j;
  j["nAtoms"] = s.atoms();
  j["nModes"] = s.modes();
  Json branches = Json::array();
  for (const auto& b : s.branches()) {
    Json jb;
    jb["atomWord"] = b.atomWord;
    jb["coeff"] = complex_to_json(b.coeff);
    jb["modes"] = modes_to_json(b.modes);
    branches.push_back(std::move(jb));
  }
  j["branches"] = std::move(branches);
  return j;
}

HybridState state_from_json(const Json& j) {
  try {
    std::vector<Branch> branches;
    for (const auto& jb : j.at("branches"))
      branches.push_back({jb.at("atomWord").get<std::string>(), complex_from_json(jb.at("coeff")),
                          modes_from_json(jb.at("modes"))});
    return HybridState(j.at("nAtoms").get<std::size_t>(), j.at("nModes").get<std::size_t>(), std::move(branches));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed state: ") + e.what());
  }
}

Json density_to_json(const DensityHybrid& rho) {
  Json j;
  j["nAtoms"] = rho.nAtoms;
  j["nModes"] = rho.nModes;
  Json kets = Json::array();
  for (const auto& k : rho.kets) kets.push_back(Json{{"atomWord", k.atomWord}, {"modes", modes_to_json(k.modes)}});
  j["kets"] = std::move(kets);
  Json m = Json::array();
  for (Eigen::Index r = 0; r < rho.coeffs.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < rho.coeffs.cols(); ++c) row.push_back(complex_to_json(rho.coeffs(r, c)));
    m.push_back(std::move(row));
  }
  j["coeffMatrix"] = std::move(m);
  return j;
}

DensityHybrid density_from_json(const Json& j) {
  try {
    DensityHybrid rho;
    rho.nAtoms = j.at("nAtoms").get<std::size_t>();
    rho.nModes = j.at("nModes").get<std::size_t>();
    for (const auto& k : j.at("kets")) rho.kets.push_back({k.at("atomWord").get<std::string>(), modes_from_json(k.at("modes"))});
    const auto n = static_cast<Eigen::Index>(rho.kets.size());
    rho.coeffs.resize(n, n);
    const auto& m = j.at("coeffMatrix");
    if (m.size() != rho.kets.size()) throw ValidationError("coeffMatrix must be square over the kets");
    for (Eigen::Index r = 0; r < n; ++r) {
      if (m[static_cast<std::size_t>(r)].size() != rho.kets.size()) throw ValidationError("coeffMatrix row length");
      for (Eigen::Index c = 0; c < n; ++c)
        rho.coeffs(r, c) = complex_from_json(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return rho;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed density: ") + e.what());
  }
}

Json result_to_json(const ProtocolResult& r) {
  Json j;
  j["conditionalProbability"] = r.conditionalProbability;
  j["tabulatedAtoms"] = r.tabulatedAtoms;
  j["preMeasurement"] = state_to_json(r.preMeasurement);
  Json outcomes;
  double sum = 0.0;
  for (const auto& [word, rec] : r.outcomes) {
    Json o;
    o["probability"] = rec.probability;
    if (!rec.group.empty()) o["group"] = rec.group;
    o["fidelity"] = rec.fidelity ? Json(*rec.fidelity) : Json(nullptr);
    o["state"] = rec.post ? state_to_json(*rec.post) : Json(nullptr);
    outcomes[word.empty() ? "-" : word] = std::move(o);
    sum += rec.probability;
  }
  j["outcomes"] = std::move(outcomes);
  j["probabilitySum"] = sum;
  return j;
}

Json validation_to_json(const DispersiveValidation& v) {
  Json j;
  j["detuningRatio"] = v.detuningRatio;
  j["rawFidelity"] = v.raw;
  j["compensatedFidelity"] = v.compensated;
  j["compensatedAtom"] = v.compensatedAtom;
  j["cutoff"] = v.cutoff;
  j["tailBound"] = v.tailBound;
  return j;
}

Json timescales_to_json(const TimescaleParams& p, const TimescaleReport& r) {
  Json j;
  j["inputs"] = Json{{"atomicLifetime", p.atomicLifetime},
                     {"cavityLifetime", p.cavityLifetime},
                     {"transitTime", p.transitTime},
                     {"qualityFactor", p.qualityFactor},
                     {"transitionFrequency", p.transitionFrequency}};
  j["transitOverAtomicLifetime"] = r.transitOverAtomic;
  j["transitOverCavityLifetime"] = r.transitOverCavity;
  j["kappaTimesTransit"] = r.kappaTransit;
  j["cavityLifetimeFromQ"] = r.cavityLifetimeFromQ;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  return j;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace ecs
