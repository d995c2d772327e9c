#pragma once

#include <numbers>

namespace tlsscope {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cyclic frequencies and rates at the public surface. Hamiltonians and
// Liouvillians work in angular units of rad/us with hbar = 1; the
// conversion happens only through angular() below.

struct Ghz {
    double value = 0.0;
};

struct Mhz {
    double value = 0.0;
};

// Rate in 1/us (already an angular-free decay constant).
struct PerUs {
    double value = 0.0;
};

constexpr Mhz to_mhz(Ghz f) { return Mhz{f.value * 1e3}; }
constexpr Ghz to_ghz(Mhz f) { return Ghz{f.value * 1e-3}; }

// rad/us
constexpr double angular(Mhz f) { return kTwoPi * f.value; }
constexpr double angular(Ghz f) { return kTwoPi * 1e3 * f.value; }

}  // namespace tlsscope
