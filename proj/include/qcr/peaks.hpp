// peaks.hpp - local-maximum detection with topographic prominence.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qcr {

struct Peak {
    std::size_t index;
    double position;
    double height;
    double prominence;
};

/// Interior local maxima of y(x) whose prominence is at least min_prominence.
///
/// Prominence follows the usual topographic definition: on each side, the
/// lowest point reached before the signal climbs above the peak (or the data
/// ends) is that side's base, and the prominence is the height above the
/// higher of the two bases. Flat tops report the middle of the plateau.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_prominence);

/// Vertex of the parabola through the peak sample and its two neighbours.
/// Falls back to the sample position at the edges or on degenerate data.
double refine_peak_position(std::span<const double> x, std::span<const double> y, std::size_t index);

}  // namespace qcr
