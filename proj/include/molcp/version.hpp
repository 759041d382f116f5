#pragma once

namespace molcp {
inline constexpr const char* kVersion = "0.1.0";
}
