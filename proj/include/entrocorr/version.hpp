#ifndef ENTROCORR_VERSION_HPP
#define ENTROCORR_VERSION_HPP

namespace entrocorr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace entrocorr

#endif  // ENTROCORR_VERSION_HPP
