#pragma once

#include <cstddef>
#include <string_view>

namespace tlsscope {

// Soft warnings (validity of perturbative formulas, clipping, soft bounds).
// Written to stderr unless silenced; always counted.
void warn(std::string_view message);

std::size_t warning_count();
void set_warnings_silenced(bool silenced);

}  // namespace tlsscope
