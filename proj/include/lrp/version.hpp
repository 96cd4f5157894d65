#ifndef LRP_VERSION_HPP
#define LRP_VERSION_HPP

namespace lrp {

inline constexpr const char* kVersion = "0.1.0";

// Bump when any on-disk layout (edge lists, CSV, manifests) changes shape.
inline constexpr int kFormatVersion = 1;

}  // namespace lrp

#endif
