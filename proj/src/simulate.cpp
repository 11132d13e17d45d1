#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "stability.hpp"

namespace chemoweb {

namespace {

constexpr double kConvergedResidual = 1e-6;
constexpr double kConvergedDistance = 1e-5;
constexpr double kTrailingFraction = 0.2;
constexpr double kDriftBand = 0.02;
constexpr int kMinPeaks = 5;

double relative_distance(const State6& a, const State6& b) {
    double d = 0.0;
    for (int i = 0; i < 6; ++i) {
        d = std::max(d, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return d;
}

struct Peak {
    double t;
    double value;
};

// Strict local maxima/minima of a sampled series.  Plateau points are
// skipped; the chemostat trajectories are smooth so this is sufficient.
void find_extrema(const std::vector<double>& t, const std::vector<double>& v, std::size_t begin,
                  std::vector<Peak>& peaks, std::vector<Peak>& troughs) {
    peaks.clear();
    troughs.clear();
    for (std::size_t i = std::max<std::size_t>(begin, 1); i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) peaks.push_back({t[i], v[i]});
        if (v[i] < v[i - 1] && v[i] < v[i + 1]) troughs.push_back({t[i], v[i]});
    }
}

double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i];
    return s / static_cast<double>(end - begin);
}

// Longest run of successively growing peaks anywhere in the history; used to
// recognise a grown-then-collapsed oscillation after it has settled back on
// the washout state.  Near a weakly unstable focus the per-peak growth is a
// fraction of a percent, so the bar is on the run, not the increments.
bool had_growing_episode(const std::vector<Peak>& peaks) {
    std::size_t run = 1;
    std::size_t best = 1;
    double run_start = peaks.empty() ? 0.0 : peaks.front().value;
    double best_growth = 1.0;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        if (peaks[i].value > peaks[i - 1].value * (1.0 + 1e-3)) {
            if (run == 1) run_start = peaks[i - 1].value;
            ++run;
        } else {
            run = 1;
        }
        if (run > best) {
            best = run;
            if (run_start > 0.0) best_growth = peaks[i].value / run_start;
        }
    }
    return best >= kMinPeaks && best_growth >= 1.3;
}

} // namespace

State6 default_initial_state(double s0_in) {
    return State6{0.1, 0.05, 0.1, 0.5 * s0_in, 0.0, 1e-6};
}

Trajectory integrate_web(const SimSpec& spec, const FoodWeb& web) {
    if (!(spec.dilution > 0.0)) throw invalid_parameter_error("dilution must be positive");
    if (!(spec.s0_in > 0.0)) throw invalid_parameter_error("inflow must be positive");
    if (!(spec.t_end > 0.0)) throw invalid_parameter_error("t_end must be positive");
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0)) {
        throw invalid_parameter_error("tolerances must be positive");
    }
    if (spec.samples < 2) throw invalid_parameter_error("need at least two samples");

    State6 x0 = spec.initial ? *spec.initial : default_initial_state(spec.s0_in);
    for (double v : x0) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw invalid_parameter_error("initial state must be finite and nonnegative");
        }
    }

    std::vector<double> times(static_cast<std::size_t>(spec.samples));
    for (int i = 0; i < spec.samples; ++i) {
        times[static_cast<std::size_t>(i)] =
            spec.t_end * static_cast<double>(i) / static_cast<double>(spec.samples - 1);
    }

    Trajectory traj;
    traj.t.reserve(times.size());
    traj.x.reserve(times.size());

    OdeOptions opts;
    opts.rel_tol = spec.rel_tol;
    opts.abs_tol = spec.abs_tol;
    opts.clamp_nonnegative = true;

    // Trial stages of the stepper may probe slightly negative states even
    // though accepted steps are clamped; the kinetics extend continuously by
    // zero there.
    auto rhs = [&](double, const double* x, double* dx) {
        State6 s;
        for (int i = 0; i < 6; ++i) s[static_cast<std::size_t>(i)] = std::max(x[i], 0.0);
        State6 d = rhs_rescaled(s, spec.dilution, spec.s0_in, web);
        std::copy(d.begin(), d.end(), dx);
    };

    auto on_sample = [&](double t, const double* x) {
        traj.t.push_back(t);
        State6 s;
        std::copy(x, x + 6, s.begin());
        traj.x.push_back(s);
    };

    std::vector<double> state(x0.begin(), x0.end());
    OdeOutcome out = integrate_ode(6, rhs, state, 0.0, spec.t_end, opts, times, on_sample);
    traj.complete = out.ok;
    traj.error = out.error;
    traj.stats = out.stats;
    if (traj.t.empty()) {
        // Even a failed run keeps its initial condition for diagnostics.
        traj.t.push_back(0.0);
        traj.x.push_back(x0);
    }
    return traj;
}

const char* attractor_label(Attractor a) {
    switch (a) {
        case Attractor::converged_ss1: return "converged_SS1";
        case Attractor::converged_ss2: return "converged_SS2";
        case Attractor::converged_ss3: return "converged_SS3";
        case Attractor::limit_cycle: return "limit_cycle";
        case Attractor::growing_oscillation_to_ss1: return "growing_oscillation_to_SS1";
        case Attractor::undecided: return "undecided";
    }
    return "undecided";
}

AttractorReport classify_attractor(const Trajectory& traj, double dilution, double s0_in,
                                   const FoodWeb& web) {
    AttractorReport rep;
    if (traj.x.empty()) {
        rep.detail = "empty trajectory";
        return rep;
    }
    rep.terminal = traj.x.back();
    rep.terminal_residual = rhs_residual(rep.terminal, dilution, s0_in, web);

    std::vector<SteadyState> states = find_all_steady_states(dilution, s0_in, web);
    double best = std::numeric_limits<double>::infinity();
    const SteadyState* nearest = nullptr;
    for (const SteadyState& ss : states) {
        double d = relative_distance(rep.terminal, ss.state);
        if (d < best) {
            best = d;
            nearest = &ss;
        }
    }
    rep.distance_to_nearest = best;

    bool converged = traj.complete && rep.terminal_residual < kConvergedResidual &&
                     nearest != nullptr && best < kConvergedDistance;
    if (converged) rep.converged_kind = nearest->kind;

    // Oscillation analysis on the dechlorinator biomass, trailing window.
    const std::vector<double>& t = traj.t;
    std::vector<double> x0(traj.x.size());
    double x0_max = 0.0;
    for (std::size_t i = 0; i < traj.x.size(); ++i) {
        x0[i] = traj.x[i][0];
        x0_max = std::max(x0_max, std::abs(x0[i]));
    }
    double span = t.back() - t.front();
    double window_start = t.back() - kTrailingFraction * span;
    std::size_t begin = 0;
    while (begin < t.size() && t[begin] < window_start) ++begin;

    std::vector<Peak> peaks;
    std::vector<Peak> troughs;
    find_extrema(t, x0, begin, peaks, troughs);

    double window_lo = x0.empty() ? 0.0 : x0[begin];
    double window_hi = window_lo;
    for (std::size_t i = begin; i < x0.size(); ++i) {
        window_lo = std::min(window_lo, x0[i]);
        window_hi = std::max(window_hi, x0[i]);
    }
    double spread = window_hi - window_lo;
    bool oscillating = spread > std::max(1e-9, 1e-3 * x0_max) &&
                       static_cast<int>(peaks.size()) >= kMinPeaks;

    char buf[160];
    if (oscillating) {
        rep.osc.peak_count = static_cast<int>(peaks.size());
        std::vector<double> gaps;
        for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i].t - peaks[i - 1].t);
        rep.osc.period = mean(gaps, 0, gaps.size());

        // Peak-to-following-trough amplitudes; their first-half/second-half
        // drift separates a settled cycle from growth or decay.
        std::vector<double> amps;
        std::size_t ti = 0;
        for (const Peak& p : peaks) {
            while (ti < troughs.size() && troughs[ti].t <= p.t) ++ti;
            if (ti >= troughs.size()) break;
            amps.push_back(p.value - troughs[ti].value);
        }
        if (amps.size() >= 4) {
            std::size_t half = amps.size() / 2;
            double m1 = mean(amps, 0, half);
            double m2 = mean(amps, half, amps.size());
            double m = mean(amps, 0, amps.size());
            rep.osc.amplitude_drift = (m2 - m1) / std::max(m, 1e-300);
            if (std::abs(rep.osc.amplitude_drift) <= kDriftBand) {
                rep.outcome = Attractor::limit_cycle;
                std::snprintf(buf, sizeof buf, "period %.6g, amplitude drift %.3g", rep.osc.period,
                              rep.osc.amplitude_drift);
                rep.detail = buf;
                return rep;
            }
            if (rep.osc.amplitude_drift > 0.0 && !converged) {
                rep.outcome = Attractor::growing_oscillation_to_ss1;
                std::snprintf(buf, sizeof buf, "amplitude still growing (drift %.3g) at t_end",
                              rep.osc.amplitude_drift);
                rep.detail = buf;
                return rep;
            }
        }
    }

    if (converged) {
        switch (rep.converged_kind.value()) {
            case SteadyStateKind::ss1: {
                std::vector<Peak> all_peaks;
                std::vector<Peak> all_troughs;
                find_extrema(t, x0, 1, all_peaks, all_troughs);
                if (had_growing_episode(all_peaks)) {
                    rep.outcome = Attractor::growing_oscillation_to_ss1;
                    rep.detail = "oscillation grew, then collapsed onto washout";
                } else {
                    rep.outcome = Attractor::converged_ss1;
                    rep.detail = "settled on washout";
                }
                break;
            }
            case SteadyStateKind::ss2_flat:
            case SteadyStateKind::ss2_sharp:
                rep.outcome = Attractor::converged_ss2;
                rep.detail = "settled on the hydrogen-free state";
                break;
            case SteadyStateKind::ss3:
                rep.outcome = Attractor::converged_ss3;
                rep.detail = "settled on coexistence";
                break;
        }
        return rep;
    }

    std::snprintf(buf, sizeof buf,
                  "no verdict: residual %.3g, nearest state distance %.3g, %d trailing peaks",
                  rep.terminal_residual, rep.distance_to_nearest, static_cast<int>(peaks.size()));
    rep.detail = buf;
    if (!traj.complete) rep.detail += " (integration stopped early: " + traj.error + ")";
    return rep;
}

HopfScanResult hopf_scan(double dilution, double S_min, double S_max, int n, const FoodWeb& web,
                         double y3y4) {
    if (!(dilution > 0.0)) throw invalid_parameter_error("dilution must be positive");
    if (!(S_min > 0.0) || !(S_max > S_min)) {
        throw invalid_parameter_error("need 0 < S_min < S_max");
    }
    if (n < 2) throw invalid_parameter_error("need at least two scan points");

    HopfScanResult result;
    result.points.reserve(static_cast<std::size_t>(n));

    constexpr double kImagFloor = 1e-9;
    double prev_complex_re = std::numeric_limits<double>::quiet_NaN();
    double prev_S = 0.0;

    for (int i = 0; i < n; ++i) {
        HopfPoint pt;
        pt.S_ch_in = S_min + (S_max - S_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        double s0_in = y3y4 * pt.S_ch_in;

        std::optional<SteadyState> ss3 = find_ss3(dilution, s0_in, web);
        if (ss3) {
            pt.ss3_exists = true;
            JacobianBundle jb = jacobian(ss3->state, dilution, web);
            auto eig = eigenvalues(jb.full);
            pt.eig.assign(eig.begin(), eig.end());
            pt.max_real_part = pt.eig.front().real();
            double complex_re = -std::numeric_limits<double>::infinity();
            double real_re = -std::numeric_limits<double>::infinity();
            for (const auto& ev : pt.eig) {
                if (std::abs(ev.imag()) > kImagFloor) {
                    complex_re = std::max(complex_re, ev.real());
                } else {
                    real_re = std::max(real_re, ev.real());
                }
            }
            if (std::isfinite(real_re) && real_re >= 0.0) {
                result.real_eigs_stayed_negative = false;
            }
            if (std::isfinite(complex_re)) {
                pt.complex_max_real = complex_re;
                if (std::isfinite(prev_complex_re) &&
                    ((prev_complex_re < 0.0) != (complex_re < 0.0))) {
                    double f = prev_complex_re / (prev_complex_re - complex_re);
                    result.crossings.push_back(prev_S + f * (pt.S_ch_in - prev_S));
                }
                prev_complex_re = complex_re;
                prev_S = pt.S_ch_in;
            } else {
                prev_complex_re = std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            // No coexistence state here; the scan records the gap and the
            // crossing detector restarts on the far side.
            prev_complex_re = std::numeric_limits<double>::quiet_NaN();
        }
        result.points.push_back(std::move(pt));
    }
    return result;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool full_coords,
                          const FullParameters* full_params) {
    if (full_coords && full_params == nullptr) {
        throw invalid_parameter_error("full coordinates need the laboratory parameters");
    }
    os << (full_coords ? "t,X_ch,X_ph,X_h2,S_ch,S_ph,S_h2" : "t,x_ch,x_ph,x_h2,s_ch,s_ph,s_h2")
       << '\n';
    char buf[64];
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        State6 row = traj.x[i];
        if (full_coords) row = to_full_state(row, *full_params);
        std::snprintf(buf, sizeof buf, "%.12g", traj.t[i]);
        os << buf;
        for (double v : row) {
            std::snprintf(buf, sizeof buf, ",%.12g", v);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace chemoweb
