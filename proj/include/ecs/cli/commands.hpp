#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ecs/coherent.hpp"

namespace ecs::cli {

inline constexpr const char* kToolName = "ecs-sim";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kValidation = 2,
  kImpossibleOutcome = 3,
  kToleranceFailure = 4,
};

// "2", "-2i", "1+1i", "0.5-0.25j", "i", "[1, 2]".
cplx parse_complex(const std::string& text);

// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text);

// Entry point shared by the executable and the tests. args[0] is the
// subcommand (no program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecs::cli
