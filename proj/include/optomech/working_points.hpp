#pragma once

// The four reference working points of the scheme: Lamb-Dicke parameter,
// target level, drive detuning, and the quoted g2(0) and non-Gaussianity.

#include <array>
#include <cmath>
#include <cstddef>

namespace optomech {

struct WorkingPoint {
  double eta;
  std::size_t j;
  double delta_a;
  double g2_quoted;
  double delta_quoted;
};

inline constexpr std::array<WorkingPoint, 4> kWorkingPoints{{
    {0.1, 1, -9.7, 0.51, 0.15},
    {0.1, 2, -9.6, 0.44, 0.18},
    {0.3, 1, -7.5, 0.65, 0.22},
    {0.3, 2, -6.6, 0.48, 0.23},
}};

inline const WorkingPoint* find_working_point(double eta, std::size_t j) {
  for (const auto& wp : kWorkingPoints) {
    if (wp.j == j && std::abs(wp.eta - eta) < 1e-6) return &wp;
  }
  return nullptr;
}

}  // namespace optomech
