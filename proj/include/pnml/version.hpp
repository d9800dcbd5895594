#pragma once

namespace pnml {
inline constexpr const char* kVersion = "0.1.0";
}
