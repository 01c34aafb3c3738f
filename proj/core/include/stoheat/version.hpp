#pragma once

namespace stoheat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stoheat
