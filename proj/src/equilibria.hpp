#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "growth.hpp"
#include "system.hpp"

namespace chemoweb {

// The four steady-state identities of the food web: total washout, the two
// methanogen-free states (on the falling/rising branch of the inflow
// threshold), and full coexistence.
enum class SteadyStateKind { ss1, ss2_flat, ss2_sharp, ss3 };

const char* kind_label(SteadyStateKind k);  // "SS1", "SS2b", "SS2s", "SS3"

struct SteadyState {
    SteadyStateKind kind;
    State6 state;     // rescaled coordinates
    double dilution;  // operating point (rescaled inflow)
    double inflow;
    double residual;  // sup-norm of the steady-state equations at `state`
};

// Hydrogen interval on which both upper tiers can pay for washout+decay.
struct HydrogenWindow {
    double lo, hi;
    bool valid() const { return lo >= 0.0 && lo < hi; }
    double width() const { return hi - lo; }
};

// Break-even hydrogen levels: below `lo` even saturated chlorophenol uptake
// cannot sustain the dechlorinator; above `hi` hydrogen inhibition starves
// the phenol degrader.  Throws no_solution_error when the dilution is too
// high for the tier altogether.
double h2_break_even_ch(double dilution, const FoodWeb& web);
double h2_break_even_ph(double dilution, const FoodWeb& web);

// Window as an optional: nullopt when either bound is missing or lo >= hi.
std::optional<HydrogenWindow> h2_window(double dilution, const FoodWeb& web);

// Inflow threshold: the rescaled chlorophenol inflow that exactly supports a
// methanogen-free steady state holding hydrogen at s_h2.  Diverges at both
// window edges; unimodal inside.  Throws regime_error when omega >= 1 and
// domain_error for s_h2 outside the open window.
double inflow_threshold(double s_h2, double dilution, const FoodWeb& web);
double inflow_threshold_slope(double s_h2, double dilution, const FoodWeb& web);

// Location and value of the threshold minimum (golden-section search to
// 1e-12 of the window width).  The minimum is the existence threshold for
// the methanogen-free pair.
double h2_at_threshold_min(double dilution, const FoodWeb& web);
double ss2_threshold(double dilution, const FoodWeb& web);

// Hydrogen level pinned by the methanogen at coexistence, and the threshold
// value/slope there.  Both require that level to fall inside the window
// (domain_error otherwise); the threshold value is the coexistence existence
// threshold, its slope decides which side of the fold coexistence sits on.
double h2_at_coexistence(double dilution, const FoodWeb& web);
double ss3_threshold(double dilution, const FoodWeb& web);
double ss3_threshold_slope(double dilution, const FoodWeb& web);

enum class I2Kind { from_zero, empty, interior };

// Critical dilution rates of the operating diagram.
//   d1: the hydrogen window closes, upper bound for any populated state.
//   [d2_min, d2_max]: dilution range where the methanogen's pinned hydrogen
//     level sits inside the window (coexistence can exist);
//     d2_min == 0 for the from_zero kind.
//   d3: smallest dilution where the threshold slope at the pinned level
//     changes sign (NaN when the slope keeps one sign on the whole range).
struct CriticalDilutions {
    double d1 = std::numeric_limits<double>::quiet_NaN();
    I2Kind i2_kind = I2Kind::empty;
    double d2_min = std::numeric_limits<double>::quiet_NaN();
    double d2_max = std::numeric_limits<double>::quiet_NaN();
    double d3 = std::numeric_limits<double>::quiet_NaN();
    bool i3_equals_i2 = false;  // slope negative across the whole range
    bool i3_empty = false;      // slope positive across the whole range (or no range)
    std::vector<double> slope_crossings;  // every detected sign change, ascending
};

CriticalDilutions critical_dilutions(const FoodWeb& web);

// Dilution where the hydrogen window closes; NaN when the window is empty
// already at D=0.  Uses the model's closed form when it has one, otherwise
// bisection on the window width.
double window_closure_dilution(const FoodWeb& web);

// Qualitative regime of the parameter set: a_or_b (coexistence possible from
// D=0), c (never possible), d (possible on an interior dilution range only).
enum class RegimeTag { a_or_b, c, d };

struct Regime {
    RegimeTag tag;
    double h2_pinned_at_zero;   // methanogen's pinned hydrogen at D=0
    double h2_window_lo_at_zero;
};

Regime classify_regime(const FoodWeb& web);

// Washout steady state; exists and is meaningful for every operating point.
SteadyState washout_state(double dilution, double s0_in, const FoodWeb& web);

// The methanogen-free pair at the operating point, ordered flat (falling
// branch) before sharp (rising branch).  Empty when the dilution is outside
// the window range, omega >= 1, or the inflow is below the threshold
// minimum; a single coalesced state when the inflow ties the minimum within
// 1e-10*max(1, s0_in).
std::vector<SteadyState> find_ss2(double dilution, double s0_in, const FoodWeb& web);

// Coexistence state; nullopt when absent (see ss3_threshold).  At the
// existence threshold the methanogen biomass is exactly zero.
std::optional<SteadyState> find_ss3(double dilution, double s0_in, const FoodWeb& web);

// All steady states existing at the operating point, washout first.
std::vector<SteadyState> find_all_steady_states(double dilution, double s0_in, const FoodWeb& web);

} // namespace chemoweb
