#pragma once

namespace sbp {

/// Library version, "major.minor.patch".
const char* version();

}  // namespace sbp
