#pragma once

namespace eventrec {

inline constexpr const char* kToolName = "eventrec";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace eventrec
