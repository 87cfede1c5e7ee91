#ifndef CPOFDM_VERSION_HPP
#define CPOFDM_VERSION_HPP

namespace cpofdm {
inline constexpr const char* kVersion = "0.1.0";
} // namespace cpofdm

#endif // CPOFDM_VERSION_HPP
