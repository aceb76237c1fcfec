#pragma once

namespace mmdkit {

inline constexpr const char* version = "0.1.0";

}  // namespace mmdkit
