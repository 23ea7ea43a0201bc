// Shared helpers for the unit tests.

#pragma once

#include "qcr/core.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

namespace qcr::test {

inline void check_physical(const BlochState& s)
{
    CHECK(s.norm() <= 1.0 + bloch_norm_slack);
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Random ensemble of n modes with distinct periods within +-0.03 fs of
/// 5.109 fs, weights in [0.2, 1] and a common T2 (infinite when t2_ps <= 0).
inline EnsembleSpec random_ensemble(std::mt19937_64& rng, std::size_t n, double t2_ps)
{
    std::uniform_real_distribution<double> offset(-0.03, 0.03);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    const double t2 = t2_ps > 0.0 ? t2_ps : infinity;
    std::vector<ModeSpec> modes;
    std::vector<double> used;
    while (modes.size() < n) {
        const double p = 5.109 + offset(rng);
        bool distinct = true;
        for (double u : used)
            distinct = distinct && std::abs(u - p) > 1e-4;
        if (!distinct)
            continue;
        used.push_back(p);
        modes.emplace_back(p, weight(rng), t2);
    }
    return EnsembleSpec(std::move(modes), 5.109);
}

}  // namespace qcr::test
