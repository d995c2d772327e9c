#include "tlsscope/diagnostics.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "tlsscope/errors.hpp"

namespace tlsscope {

namespace {

std::atomic<std::size_t> g_warnings{0};
std::atomic<bool> g_silenced{false};
std::mutex g_warn_mutex;

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : InputError(join_violations(violations)), violations_(std::move(violations)) {}

void warn(std::string_view message) {
    ++g_warnings;
    if (g_silenced) return;
    std::lock_guard lock(g_warn_mutex);
    std::clog << "warning: " << message << '\n';
}

std::size_t warning_count() { return g_warnings.load(); }

void set_warnings_silenced(bool silenced) { g_silenced = silenced; }

}  // namespace tlsscope
