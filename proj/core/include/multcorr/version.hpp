#pragma once

namespace multcorr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace multcorr
