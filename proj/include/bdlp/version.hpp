#pragma once

namespace bdlp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bdlp
