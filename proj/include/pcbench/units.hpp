#pragma once

namespace pcbench {

inline constexpr double kZeroCelsius = 273.15;

[[nodiscard]] constexpr double to_kelvin(double celsius) noexcept { return celsius + kZeroCelsius; }
[[nodiscard]] constexpr double to_celsius(double kelvin) noexcept { return kelvin - kZeroCelsius; }

}  // namespace pcbench
