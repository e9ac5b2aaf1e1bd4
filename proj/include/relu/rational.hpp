#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace relu {

// All arithmetic in this library is exact. Rationals are GMP-backed and kept
// canonical (gcd 1, positive denominator) at the parsing boundary; gmpxx keeps
// them canonical afterwards.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p", "-p" or "p/q" with decimal integer parts. Throws
// std::invalid_argument on malformed input or a zero denominator.
Rat rat_from_string(const std::string& text);

// Canonical decimal form, "p" when the denominator is 1, else "p/q".
std::string rat_to_string(const Rat& value);

}  // namespace relu
