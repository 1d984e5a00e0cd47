#include "sbp/version.hpp"

namespace sbp {

const char* version() { return SBP_VERSION; }

}  // namespace sbp
