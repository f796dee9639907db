#pragma once

#include "bayesmerton/asymptotics.hpp"

#include <iosfwd>
#include <string>

namespace bayesmerton {

/// Data-to-pixel map of the sweep chart: px = ax * T + bx, py = ay * u + by.
struct SvgTransform {
    double ax = 1.0;
    double bx = 0.0;
    double ay = -1.0;
    double by = 0.0;
};

/// Standalone SVG line chart of u*(T) with the limit drawn as a horizontal
/// rule. Failed rows are left out of the polyline. The transform is written
/// into a header comment and returned.
SvgTransform write_sweep_svg(std::ostream& out, const SweepResult& sweep, const std::string& title);

}  // namespace bayesmerton
