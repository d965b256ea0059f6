#pragma once

namespace milda {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace milda
