#pragma once

namespace wfp {

inline constexpr const char* kVersion = "wfp-lab 0.1.0";
inline constexpr unsigned kFileFormatVersion = 1;

} // namespace wfp
