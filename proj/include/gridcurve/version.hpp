#ifndef GRIDCURVE_VERSION_HPP
#define GRIDCURVE_VERSION_HPP

namespace gridcurve {

inline constexpr const char* kVersion = "gridcurve 0.1.0";

}  // namespace gridcurve

#endif
