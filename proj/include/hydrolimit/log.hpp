#pragma once

#include <string_view>

namespace hydrolimit {

/// Warnings go to stderr unless silenced (tests silence them).
void log_warning(std::string_view msg);
void set_warnings_enabled(bool on);
/// Number of warnings emitted so far, including silenced ones.
long warning_count();

}  // namespace hydrolimit
