#pragma once

namespace dsq {

inline constexpr const char* kVersion = "0.1.0";

/// Global quadrature convention, printed into every output manifest:
/// x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2), vacuum variance 1/2.
inline constexpr const char* kQuadratureConvention =
    "x=(a+adag)/sqrt2, p=i(adag-a)/sqrt2, vacuum variance 1/2";

}  // namespace dsq
