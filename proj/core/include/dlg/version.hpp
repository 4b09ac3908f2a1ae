#pragma once

#include <string_view>

#ifndef DLG_VERSION
#define DLG_VERSION "unknown"
#endif

namespace dlg {

inline constexpr std::string_view kVersion = DLG_VERSION;

}  // namespace dlg
