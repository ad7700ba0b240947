#pragma once

namespace unargmax {
inline constexpr const char* kToolVersion = "0.1.0";
}
