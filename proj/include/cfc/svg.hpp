#pragma once

#include "cfc/sim.hpp"

#include <string>

namespace cfc {

/// Four stacked panels: frequency, rocov, voltage and active power deviations.
std::string render_svg(const TimeSeries& ts, const std::string& title);

}  // namespace cfc
