#pragma once

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "equilibria.hpp"
#include "ode.hpp"
#include "system.hpp"

namespace chemoweb {

// Core-level simulation request in rescaled units (the CLI converts
// laboratory inflow before calling in).
struct SimSpec {
    double dilution = 0.0;
    double s0_in = 0.0;
    double t_end = 0.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int samples = 2001;  // evenly spaced, endpoints included
    std::optional<State6> initial;  // rescaled; nullopt = default inoculum
};

// Small inoculum of all three tiers, half the inflow's chlorophenol already
// in the reactor and a trace of hydrogen so the dechlorinator can start.
State6 default_initial_state(double s0_in);

struct Trajectory {
    std::vector<double> t;
    std::vector<State6> x;  // rescaled coordinates
    bool complete = false;
    std::string error;  // set when integration stopped early (stiffness)
    OdeStats stats;
};

// Integrate the rescaled food web.  Throws invalid_parameter_error on a bad
// spec; a stiffness stop is reported in the returned trajectory, with the
// samples reached so far.
Trajectory integrate_web(const SimSpec& spec, const FoodWeb& web);

enum class Attractor {
    converged_ss1,
    converged_ss2,
    converged_ss3,
    limit_cycle,
    growing_oscillation_to_ss1,
    undecided,
};

const char* attractor_label(Attractor a);

struct OscillationMetrics {
    double period = std::numeric_limits<double>::quiet_NaN();
    double amplitude_drift = std::numeric_limits<double>::quiet_NaN();
    int peak_count = 0;
};

struct AttractorReport {
    Attractor outcome = Attractor::undecided;
    State6 terminal{};
    double terminal_residual = std::numeric_limits<double>::quiet_NaN();
    std::optional<SteadyStateKind> converged_kind;
    double distance_to_nearest = std::numeric_limits<double>::quiet_NaN();
    OscillationMetrics osc;
    std::string detail;
};

// Classify the long-run behaviour of a trajectory against the steady states
// existing at its operating point.  Convergence requires the terminal
// right-hand side below 1e-6 and distance to a steady state below 1e-5
// (relative per component, absolute for components below 1);
// oscillations are judged on the trailing 20% of the run, a limit cycle
// being a peak-amplitude drift within 2%.
AttractorReport classify_attractor(const Trajectory& traj, double dilution, double s0_in,
                                   const FoodWeb& web);

// One operating point of an eigenvalue scan along the inflow axis.
struct HopfPoint {
    double S_ch_in;  // laboratory units
    bool ss3_exists = false;
    double max_real_part = std::numeric_limits<double>::quiet_NaN();
    double complex_max_real = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::complex<double>> eig;
};

struct HopfScanResult {
    std::vector<HopfPoint> points;
    // Inflows where the leading complex pair's real part changes sign
    // (linear interpolation between scan points).
    std::vector<double> crossings;
    // True when every real (non-oscillatory) eigenvalue stayed negative at
    // every point where the coexistence state exists: the Hopf signature.
    bool real_eigs_stayed_negative = true;
};

// Sweep the coexistence state's spectrum over n evenly spaced inflow values.
HopfScanResult hopf_scan(double dilution, double S_min, double S_max, int n, const FoodWeb& web,
                         double y3y4);

// Trajectory CSV: header tags the coordinate system.  Full coordinates need
// the laboratory parameters for the inverse rescaling.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool full_coords,
                          const FullParameters* full_params);

} // namespace chemoweb
