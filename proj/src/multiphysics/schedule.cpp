#include "romassim/multiphysics/schedule.hpp"

namespace romassim::multiphysics {

double transient_factor(const TransientSchedule& schedule, int region, std::size_t group, double t) {
  if (t < 0.0) return 1.0;
  double factor = 1.0;
  for (const auto& e : schedule.entries) {
    if (e.region != region || e.group != group) continue;
    switch (e.shape) {
      case ScheduleShape::Step:
        factor *= t > 0.0 ? e.value : 1.0;
        break;
      case ScheduleShape::RampStep:
        factor *= t <= e.ramp_end ? 1.0 - e.slope * t : e.value;
        break;
    }
  }
  return factor;
}

TransientSchedule iaea_schedule(int region) {
  TransientSchedule s;
  for (std::size_t g = 0; g < 2; ++g) s.entries.push_back({region, g, ScheduleShape::Step, 0.9, 0.0, 0.0});
  return s;
}

TransientSchedule twigl_schedule(int region) {
  TransientSchedule s;
  s.entries.push_back({region, 1, ScheduleShape::RampStep, 0.97666, 0.11667, 0.2});
  return s;
}

}  // namespace romassim::multiphysics
