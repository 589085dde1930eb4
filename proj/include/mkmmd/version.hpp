#ifndef MKMMD_VERSION_HPP
#define MKMMD_VERSION_HPP

namespace mkmmd {

inline constexpr const char* kVersion = "0.1.0";
/// Version of every JSON document the library writes.
inline constexpr int kSchemaVersion = 1;

}  // namespace mkmmd

#endif  // MKMMD_VERSION_HPP
