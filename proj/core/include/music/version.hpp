#pragma once

namespace music {

inline constexpr const char* kVersion = "0.1.0";

} // namespace music
