#pragma once

namespace ocucb {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace ocucb
