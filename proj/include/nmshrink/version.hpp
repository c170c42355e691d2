#pragma once

#define NMSHRINK_VERSION_MAJOR 0
#define NMSHRINK_VERSION_MINOR 1
#define NMSHRINK_VERSION_PATCH 0

namespace nmshrink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nmshrink
