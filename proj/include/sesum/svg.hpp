#pragma once

#include <string>
#include <vector>

#include "sesum/study.hpp"

namespace sesum {

struct SvgChart {
    std::string svg;
    std::vector<std::string> notices; // skipped rows etc.
};

// Line chart of normalized_rate against n (log-scaled x axis), one polyline per
// estimator present, plus a horizontal dashed reference polyline at predicted_rate.
// Rows with non-finite normalized_rate are skipped with a notice; fewer than two
// plottable rows skips the chart entirely (empty svg, notice explains why).
SvgChart emit_svg(const std::vector<StudyRow>& rows);

} // namespace sesum
