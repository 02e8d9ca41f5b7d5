#pragma once

#include "strain_cascade/model.hpp"

#include <vector>

namespace strain_cascade
{

/// Per-patch susceptible level and per-patch, per-strain infected levels of an equilibrium.
struct EquilibriumPoint {
    std::vector<double> susceptible;           // [patch]
    std::vector<std::vector<double>> infected; // [patch][strain]

    StateVector to_state() const;
    double norm_inf() const;

    bool operator==(const EquilibriumPoint&) const = default;
};

} // namespace strain_cascade
