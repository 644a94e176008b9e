#pragma once

namespace talbot {

inline constexpr const char* version = "0.1.0";

}  // namespace talbot
