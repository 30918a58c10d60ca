#pragma once

namespace hoikit {
inline constexpr const char* kVersion = "0.1.0";
}
