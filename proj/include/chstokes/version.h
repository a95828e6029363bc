// chstokes: version string embedded in run metadata and snapshot headers.
#pragma once

namespace chst {

inline constexpr const char* kVersionString = "chstokes 0.1.0";

}  // namespace chst
