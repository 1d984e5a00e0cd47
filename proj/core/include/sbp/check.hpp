#pragma once

#include <string_view>

namespace sbp {

enum class CheckStatus { pass, fail, not_applicable };

constexpr std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not-applicable";
  }
  return "unknown";
}

}  // namespace sbp
