#pragma once

#include <string_view>

namespace cntmf {

inline constexpr std::string_view kToolName = "cntmf";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Version of every structured file this tool reads or writes (models,
// assessments, ledgers, priors, override sets).
inline constexpr int kSchemaVersion = 1;

}  // namespace cntmf
