#pragma once

namespace esr {

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace esr
