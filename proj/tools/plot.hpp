#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairrank/pipeline.hpp"

namespace fairrank::cli {

struct PlotSeries {
    std::string label;
    std::vector<AggregateRow> rows;
};

/**
 * SVG with three panels (exposure difference, error difference, overall
 * error) against iteration. Each series is a median line over a shaded
 * min-max band; a dashed line marks the optimum at 0. Throws InvalidInput
 * for no series or a series without rows.
 */
std::string render_plot(std::span<const PlotSeries> series);

} // namespace fairrank::cli
