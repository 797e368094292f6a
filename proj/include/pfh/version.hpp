#pragma once

namespace pfh {

inline constexpr const char* version = "0.1.0";

} // namespace pfh
