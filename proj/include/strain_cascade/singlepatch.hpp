#pragma once

#include "strain_cascade/equilibrium.hpp"
#include "strain_cascade/model.hpp"

#include <cstddef>
#include <vector>

namespace strain_cascade
{

/// Single-patch reproduction numbers, one per elimination step (strain n first).
struct R0Sequence {
    struct Entry {
        std::size_t strain; // zero-based
        double value;
        double level;       // T* of this strain
        double birth;       // B^(l) used for this strain
        double death;       // b^(l) used for this strain
    };
    std::vector<Entry> entries;
};

struct SinglePatchResult {
    R0Sequence sequence;
    EquilibriumPoint equilibrium;
};

/**
 * Closed-form cascade for one patch. Step l uses
 *   R0 = B^(l) beta / (b^(l) (b^(l) + theta)),
 *   T* = (B^(l) beta - (b^(l) + theta) b^(l)) / (beta b^(l))   if R0 > 1, else 0,
 * then B^(l+1) = B^(l) + theta T*, b^(l+1) = b^(l) + beta T*. The last step is the
 * two-dimensional (S, T_1) system whose equilibrium fixes S.
 *
 * Throws PreconditionError unless params has exactly one patch and validates.
 */
SinglePatchResult r0_cascade(const ModelParameters& params);

} // namespace strain_cascade
