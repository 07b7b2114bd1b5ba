#pragma once

// Structured-text (JSON) forms of states and results. Complex numbers are
// [re, im] pairs; keys keep insertion order so output is byte-stable.

#include <string>

#include <json.hpp>

#include "ecs/coherent.hpp"
#include "ecs/decoherence.hpp"
#include "ecs/fock_numeric.hpp"
#include "ecs/protocol.hpp"

namespace ecs {

using Json = nlohmann::ordered_json;

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j);  // [re, im] or a bare real number

Json state_to_json(const HybridState& s);
HybridState state_from_json(const Json& j);

Json density_to_json(const DensityHybrid& rho);
DensityHybrid density_from_json(const Json& j);

Json result_to_json(const ProtocolResult& r);
Json validation_to_json(const DispersiveValidation& v);
Json timescales_to_json(const TimescaleParams& p, const TimescaleReport& r);

// 17 significant digits, the format used in tables.
std::string format_number(double x);

}  // namespace ecs
