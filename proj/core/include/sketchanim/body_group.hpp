#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace sketchanim {

enum class BodyGroup : int {
  left_upper_arm,
  left_lower_arm,
  right_upper_arm,
  right_lower_arm,
  left_upper_leg,
  left_lower_leg,
  right_upper_leg,
  right_lower_leg,
  trunk,
};

inline constexpr int kBodyGroupCount = 9;

inline constexpr std::array<BodyGroup, kBodyGroupCount> kAllBodyGroups = {
    BodyGroup::left_upper_arm,  BodyGroup::left_lower_arm,  BodyGroup::right_upper_arm,
    BodyGroup::right_lower_arm, BodyGroup::left_upper_leg,  BodyGroup::left_lower_leg,
    BodyGroup::right_upper_leg, BodyGroup::right_lower_leg, BodyGroup::trunk,
};

std::string_view to_string(BodyGroup g);
std::optional<BodyGroup> body_group_from_string(std::string_view name);

}  // namespace sketchanim
