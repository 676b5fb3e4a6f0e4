#pragma once

#include <iosfwd>

#include "qsafe/sim.hpp"

namespace qsafe {

// Static plot of both aircraft ground tracks with per-second markers and the
// collision circle around the final intruder position.
void write_trace_svg(const CounterexampleTrace& t, std::ostream& os);

}  // namespace qsafe
