#pragma once

namespace hessianlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolkitName = "hessianlab";

}  // namespace hessianlab
