#ifndef PNCM_VERSION_HPP
#define PNCM_VERSION_HPP

namespace pncm {

inline constexpr const char* version = "0.1.0";

} // namespace pncm

#endif // PNCM_VERSION_HPP
