#ifndef CREW_GANTT_HPP
#define CREW_GANTT_HPP

#include <string>

#include "crew/model.hpp"

namespace crew {

// Renders a schedule as a standalone SVG: one lane per driver (ordered by
// id), the x axis in minutes at one pixel per minute, red ticks at each
// driver's shift start and end, hour gridlines, and a trailing lane for
// tasks still unassigned. With `diff_base` (typically the pre-solver
// schedule) every rectangle is classified: grey for a task the driver
// already had, blue for one moved from another driver, orange for one that
// was unassigned in the base. Rides render hatched on top of their class.
// Output is deterministic: integer coordinates, fixed ordering.
std::string emit_gantt(const Schedule& s, const Instance& instance,
                       const Schedule* diff_base = nullptr);

}  // namespace crew

#endif  // CREW_GANTT_HPP
