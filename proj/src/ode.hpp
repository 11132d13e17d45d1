#pragma once

#include <functional>
#include <string>
#include <vector>

namespace chemoweb {

// Generic small-dimension initial value problem driver.  Explicit adaptive
// Runge-Kutta 5(4) with per-component error control
//   |local error_i| <= abs_tol + rel_tol * |x_i|,
// landing exactly on the requested sample times.  If the controller drives
// the step below h_min the problem is treated as stiff and integration
// switches to backward Euler with a Newton solve (same tolerance model);
// if that also underflows, integration stops with an error and the samples
// emitted so far stand as a partial trajectory.
struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double h_min = 1e-12;
    double h_init = 0.0;  // 0 = choose from the initial derivative
    double h_max = 0.0;   // 0 = one tenth of the span
    bool clamp_nonnegative = false;  // clamp undershoots to exact 0 after each step
    bool allow_implicit_fallback = true;
};

struct OdeStats {
    size_t steps = 0;
    size_t rejected = 0;
    size_t rhs_evals = 0;
    bool used_implicit = false;
    double min_component = 0.0;  // most negative component seen before clamping
};

struct OdeOutcome {
    bool ok = false;
    std::string error;
    double t_reached = 0.0;
    OdeStats stats;
};

using OdeRhs = std::function<void(double t, const double* x, double* dxdt)>;
using OdeSampleSink = std::function<void(double t, const double* x)>;

OdeOutcome integrate_ode(int n, const OdeRhs& rhs, std::vector<double>& state, double t0,
                         double t1, const OdeOptions& opt,
                         const std::vector<double>& sample_times, const OdeSampleSink& on_sample);

// The implicit fallback, exposed for direct use on problems known to be
// stiff from the outset.
OdeOutcome integrate_backward_euler(int n, const OdeRhs& rhs, std::vector<double>& state,
                                    double t0, double t1, const OdeOptions& opt,
                                    const std::vector<double>& sample_times,
                                    const OdeSampleSink& on_sample);

} // namespace chemoweb
