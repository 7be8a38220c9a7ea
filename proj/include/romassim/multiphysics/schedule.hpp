#pragma once

#include <cstddef>
#include <vector>

namespace romassim::multiphysics {

enum class ScheduleShape {
  Step,      // 1 for t <= 0, `value` afterwards
  RampStep,  // 1 - slope t up to t = ramp_end, `value` afterwards
};

struct ScheduleEntry {
  int region = 0;
  std::size_t group = 0;  // zero based
  ScheduleShape shape = ScheduleShape::Step;
  double value = 1.0;
  double slope = 0.0;
  double ramp_end = 0.0;
};

/// Multiplicative factors applied to reference absorption cross sections.
struct TransientSchedule {
  std::vector<ScheduleEntry> entries;
};

double transient_factor(const TransientSchedule& schedule, int region, std::size_t group, double t);

/// Rodded-region absorption drops to 90% in both groups.
TransientSchedule iaea_schedule(int region = 3);
/// Thermal absorption of region 1 ramps down for 0.2 s, then holds.
TransientSchedule twigl_schedule(int region = 1);

}  // namespace romassim::multiphysics
