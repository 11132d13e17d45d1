#pragma once

#include <array>

#include "growth.hpp"
#include "params.hpp"

namespace chemoweb {

// State vectors are ordered (biomass ch, biomass ph, biomass h2,
// substrate ch, substrate ph, substrate h2) in both coordinate systems.
using State6 = std::array<double, 6>;

struct Inflows {
    double S_ch = 0.0;
    double S_ph = 0.0;  // the analysis assumes these two are zero; the raw
    double S_h2 = 0.0;  // model supports them for completeness
};

// Right-hand side of the rescaled six-dimensional system.
State6 rhs_rescaled(const State6& x, double dilution, double s0_in, const FoodWeb& web);

// Right-hand side of the laboratory-unit model (Monod kinetics, explicit
// yields and stoichiometric transfer fractions).
State6 rhs_full(const State6& X, double dilution, const Inflows& in, const FullParameters& p);

// Linear change of variables between the two coordinate systems.
State6 to_rescaled_state(const State6& full_state, const FullParameters& p);
State6 to_full_state(const State6& rescaled_state, const FullParameters& p);

// Sup-norm of the rescaled right-hand side; zero at a steady state.
double rhs_residual(const State6& x, double dilution, double s0_in, const FoodWeb& web);

} // namespace chemoweb
