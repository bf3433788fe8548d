#pragma once
// Generated by tests/oracle/make_oracles.py; do not edit by hand.
#include <array>

namespace oracle {
inline constexpr double kSkewSum10 = 3.4875388202501892732;
inline constexpr double kRotErrorConst = 0.032695;
inline constexpr const char* kOmegaQ = "498454011879264/806515533049393";
inline constexpr const char* kRhoQ = "299713796309065/723573111879672";
inline constexpr std::array<int, 4> kTentCrossings = {4, 2, 2, 4};
inline constexpr std::array<int, 2> kLowTentCrossingDepths = {12, 17};
inline constexpr const char* kBetaK4N8 = "50312341/76839840";
inline constexpr double kBetaK4N8d = 0.6547689453804172;
inline constexpr double kRatioK4N8 = 0.72;
inline constexpr double kHFloorK4N8 = 0.28;
inline constexpr std::array<double, 4> kTripleMat = {0.64359425290558262474, 0, 0, 1.5537739740300373073};
inline constexpr double kLog2 = 0.69314718055994530942;
}  // namespace oracle
