#pragma once

namespace dictid {

inline constexpr const char* kToolVersion = "0.1.0";

/// Identifier of the deterministic random stream: a counter-based splitmix64
/// (output i is the splitmix64 finalizer applied to seed + (i+1)*golden),
/// uniform doubles from the top 53 bits, Gaussians via the Box-Muller cosine
/// branch on consecutive counters.
inline constexpr const char* kRngAlgorithm = "splitmix64-counter/box-muller-v1";

}  // namespace dictid
