#include "ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace chemoweb {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// 4th-order weights of the embedded pair.
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

// Shared sampling cursor: step handlers call advance() after each accepted
// step; exact landing on sample times is arranged by limit_step().
struct SampleCursor {
    const std::vector<double>& times;
    const OdeSampleSink& sink;
    size_t next = 0;

    double limit_step(double t, double h) const {
        if (next < times.size() && times[next] > t && times[next] - t < h)
            return times[next] - t;
        return h;
    }
    void advance(double t, const double* x) {
        while (next < times.size() && times[next] <= t + 1e-12 * std::max(1.0, std::abs(t))) {
            sink(times[next], x);
            ++next;
        }
    }
};

void clamp_state(std::vector<double>& x, OdeStats& stats) {
    for (double& v : x) {
        if (v < 0.0) {
            stats.min_component = std::min(stats.min_component, v);
            v = 0.0;
        }
    }
}

} // namespace

OdeOutcome integrate_backward_euler(int n, const OdeRhs& rhs, std::vector<double>& state,
                                    double t0, double t1, const OdeOptions& opt,
                                    const std::vector<double>& sample_times,
                                    const OdeSampleSink& on_sample) {
    OdeOutcome out;
    out.stats.used_implicit = true;
    SampleCursor cursor{sample_times, on_sample, 0};
    // Skip samples already behind t0 (handed over mid-run by the explicit pass).
    while (cursor.next < sample_times.size() && sample_times[cursor.next] < t0)
        ++cursor.next;
    cursor.advance(t0, state.data());

    const double span = t1 - t0;
    const double h_max = opt.h_max > 0.0 ? opt.h_max : span / 10.0;
    double h = opt.h_init > 0.0 ? opt.h_init : std::max(opt.h_min * 1e3, span * 1e-6);
    h = std::min(h, h_max);
    double t = t0;

    std::vector<double> f(n), xw(n);
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd res(n), delta(n);

    // One backward-Euler solve of x = base + h f(x), Newton with a
    // finite-difference Jacobian.  Returns false when Newton stalls.
    auto be_solve = [&](const std::vector<double>& base, double tn, double hstep,
                        std::vector<double>& xout) -> bool {
        xout = base;
        for (int newton = 0; newton < 50; ++newton) {
            rhs(tn, xout.data(), f.data());
            out.stats.rhs_evals++;
            double rmax = 0.0;
            for (int i = 0; i < n; ++i) {
                res(i) = xout[i] - base[i] - hstep * f[i];
                const double sc = opt.abs_tol + opt.rel_tol * std::abs(xout[i]);
                rmax = std::max(rmax, std::abs(res(i)) / sc);
            }
            if (rmax < 1e-3)  // residual well below the local error target
                return true;
            for (int j = 0; j < n; ++j) {
                const double dj = std::max(1e-8, 1e-7 * std::abs(xout[j]));
                xw = xout;
                xw[j] += dj;
                rhs(tn, xw.data(), jac.col(j).data());
                out.stats.rhs_evals++;
                for (int i = 0; i < n; ++i)
                    jac(i, j) = (i == j ? 1.0 : 0.0) - hstep * (jac(i, j) - f[i]) / dj;
            }
            delta = jac.partialPivLu().solve(res);
            if (!delta.allFinite())
                return false;
            for (int i = 0; i < n; ++i)
                xout[i] -= delta(i);
        }
        return false;
    };

    std::vector<double> xfull(n), xhalf(n), xtmp(n);
    while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
        h = std::min({h, h_max, t1 - t});
        h = cursor.limit_step(t, h);
        if (h < opt.h_min) {
            out.error = "stiffness: implicit step size underflow";
            out.t_reached = t;
            return out;
        }
        // Error estimate by step doubling (backward Euler is first order).
        bool ok_full = be_solve(state, t + h, h, xfull);
        bool ok_half = ok_full && be_solve(state, t + 0.5 * h, 0.5 * h, xtmp) &&
                       be_solve(xtmp, t + h, 0.5 * h, xhalf);
        double err = std::numeric_limits<double>::infinity();
        if (ok_full && ok_half && finite_all(xfull) && finite_all(xhalf)) {
            err = 0.0;
            for (int i = 0; i < n; ++i) {
                const double sc =
                    opt.abs_tol + opt.rel_tol * std::max(std::abs(xhalf[i]), std::abs(state[i]));
                err = std::max(err, std::abs(xhalf[i] - xfull[i]) / sc);
            }
        }
        if (err <= 1.0) {
            t += h;
            state = xhalf;  // keep the more accurate two-half-step value
            if (opt.clamp_nonnegative)
                clamp_state(state, out.stats);
            out.stats.steps++;
            cursor.advance(t, state.data());
            h *= std::clamp(0.9 / std::sqrt(std::max(err, 1e-10)), 0.3, 2.0);
        } else {
            out.stats.rejected++;
            h *= 0.3;
        }
    }
    out.ok = true;
    out.t_reached = t1;
    cursor.advance(t1 + 1.0, state.data());
    return out;
}

OdeOutcome integrate_ode(int n, const OdeRhs& rhs, std::vector<double>& state, double t0,
                         double t1, const OdeOptions& opt,
                         const std::vector<double>& sample_times, const OdeSampleSink& on_sample) {
    OdeOutcome out;
    if (!(t1 > t0)) {
        out.error = "integration span must be positive";
        return out;
    }
    SampleCursor cursor{sample_times, on_sample, 0};
    cursor.advance(t0, state.data());

    const double span = t1 - t0;
    const double h_max = opt.h_max > 0.0 ? opt.h_max : span / 10.0;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> xs(n), xnew(n);

    rhs(t0, state.data(), k1.data());
    out.stats.rhs_evals++;

    // Initial step from the first derivative: aim the predicted one-step
    // error well under the tolerance.
    double h = opt.h_init;
    if (h <= 0.0) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(state[i]);
            d = std::max(d, std::abs(k1[i]) / sc);
        }
        h = d > 0.0 ? 0.01 / d : span / 1000.0;
    }
    h = std::clamp(h, opt.h_min, h_max);

    double t = t0;
    bool fsal_valid = true;

    while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
        h = std::min({h, h_max, t1 - t});
        h = cursor.limit_step(t, h);
        if (h < opt.h_min) {
            if (opt.allow_implicit_fallback) {
                OdeOptions iopt = opt;
                iopt.allow_implicit_fallback = false;
                OdeOutcome inner =
                    integrate_backward_euler(n, rhs, state, t, t1, iopt, sample_times, on_sample);
                inner.stats.steps += out.stats.steps;
                inner.stats.rejected += out.stats.rejected;
                inner.stats.rhs_evals += out.stats.rhs_evals;
                inner.stats.min_component =
                    std::min(inner.stats.min_component, out.stats.min_component);
                return inner;
            }
            out.error = "stiffness: step size underflow";
            out.t_reached = t;
            return out;
        }

        if (!fsal_valid) {
            rhs(t, state.data(), k1.data());
            out.stats.rhs_evals++;
            fsal_valid = true;
        }

        auto stage = [&](std::vector<double>& k, double c, auto... terms) {
            // xs = state + h * (sum of a_ij * k_j)
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                ((acc += terms.first * terms.second[i]), ...);
                xs[i] = state[i] + h * acc;
            }
            rhs(t + c * h, xs.data(), k.data());
            out.stats.rhs_evals++;
        };
        using P = std::pair<double, const std::vector<double>&>;
        stage(k2, C2, P{A21, k1});
        stage(k3, C3, P{A31, k1}, P{A32, k2});
        stage(k4, C4, P{A41, k1}, P{A42, k2}, P{A43, k3});
        stage(k5, C5, P{A51, k1}, P{A52, k2}, P{A53, k3}, P{A54, k4});
        stage(k6, 1.0, P{A61, k1}, P{A62, k2}, P{A63, k3}, P{A64, k4}, P{A65, k5});

        for (int i = 0; i < n; ++i)
            xnew[i] = state[i] +
                      h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        rhs(t + h, xnew.data(), k7.data());
        out.stats.rhs_evals++;

        double err = 0.0;
        bool sane = finite_all(xnew);
        if (sane) {
            for (int i = 0; i < n; ++i) {
                const double e4 = state[i] + h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] +
                                                  E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                const double sc =
                    opt.abs_tol + opt.rel_tol * std::max(std::abs(state[i]), std::abs(xnew[i]));
                err = std::max(err, std::abs(xnew[i] - e4) / sc);
            }
        } else {
            err = std::numeric_limits<double>::infinity();
        }

        if (err <= 1.0) {
            t += h;
            state = xnew;
            const double before = *std::min_element(state.begin(), state.end());
            if (opt.clamp_nonnegative && before < 0.0) {
                clamp_state(state, out.stats);
                fsal_valid = false;  // k7 was evaluated at the unclamped state
            }
            if (fsal_valid)
                k1 = k7;
            out.stats.steps++;
            cursor.advance(t, state.data());
            const double grow =
                err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
            h *= grow;
        } else {
            out.stats.rejected++;
            const double shrink =
                std::isfinite(err) ? std::max(0.9 * std::pow(err, -0.2), 0.1) : 0.1;
            h *= std::min(shrink, 0.9);
        }
    }
    out.ok = true;
    out.t_reached = t1;
    cursor.advance(t1 + 1.0, state.data());
    return out;
}

} // namespace chemoweb
