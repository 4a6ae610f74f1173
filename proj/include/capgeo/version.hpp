#pragma once

namespace capgeo {
inline constexpr const char* kVersion = "1.0.0";
}
