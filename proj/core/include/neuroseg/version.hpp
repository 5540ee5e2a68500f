#pragma once

namespace neuroseg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace neuroseg
