#include "qcr/peaks.hpp"

#include <algorithm>
#include <stdexcept>

namespace qcr {

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_prominence)
{
    if (x.size() != y.size())
        throw std::invalid_argument("find_peaks: x and y differ in length");
    std::vector<Peak> peaks;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i])
            ++j;
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t mid = (i + j) / 2;
        const double h = y[i];

        double left_base = h;
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] > h)
                break;
            left_base = std::min(left_base, y[k]);
        }
        double right_base = h;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (y[k] > h)
                break;
            right_base = std::min(right_base, y[k]);
        }
        const double prominence = h - std::max(left_base, right_base);
        if (prominence >= min_prominence)
            peaks.push_back({mid, x[mid], h, prominence});
        i = j + 1;
    }
    return peaks;
}

double refine_peak_position(std::span<const double> x, std::span<const double> y, std::size_t index)
{
    if (index == 0 || index + 1 >= y.size())
        return x[index];
    const double x0 = x[index - 1], x1 = x[index], x2 = x[index + 1];
    const double y0 = y[index - 1], y1 = y[index], y2 = y[index + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (!(curvature < 0.0))
        return x1;
    // p(x) = y0 + d01 (x - x0) + curvature (x - x0)(x - x1)
    const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    return std::clamp(vertex, x0, x2);
}

}  // namespace qcr
