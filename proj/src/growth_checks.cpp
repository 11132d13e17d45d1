// Qualitative sign checks on a growth model.  The analysis layer assumes a
// particular monotone structure (checked here over a sampled grid); a custom
// model failing any entry is outside the theory and the report says which
// assumption broke first.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "equilibria.hpp"
#include "errors.hpp"
#include "growth.hpp"

namespace chemoweb {

namespace {

std::vector<double> log_grid(int n) {
    // Spans trace-hydrogen levels up to saturating substrate.
    std::vector<double> g(static_cast<std::size_t>(n));
    const double lo = 1e-10;
    const double hi = 1e2;
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return g;
}

std::string point_note(const char* what, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s at (%.3g, %.3g)", what, a, b);
    return buf;
}

// Runs one check body, converting a model that throws into a failed entry.
template <typename F>
GrowthAssumption run_check(const char* name, F&& body) {
    GrowthAssumption a;
    a.name = name;
    try {
        body(a);
    } catch (const std::exception& e) {
        a.passed = false;
        a.note = std::string("check aborted: ") + e.what();
    }
    return a;
}

} // namespace

GrowthAssumptionReport check_growth_assumptions(const FoodWeb& web, int grid_points) {
    if (web.growth == nullptr) throw invalid_parameter_error("food web has no growth model");
    if (grid_points < 3) throw invalid_parameter_error("need at least three grid points");
    const GrowthModel& g = *web.growth;
    const std::vector<double> grid = log_grid(grid_points);

    GrowthAssumptionReport report;
    report.assumptions.reserve(8);

    report.assumptions.push_back(run_check(
        "rates vanish without substrate and are finite and nonnegative", [&](GrowthAssumption& a) {
            if (std::abs(g.mu_h2(0.0)) > 1e-12) {
                a.passed = false;
                a.note = "hydrogen rate nonzero at zero hydrogen";
                return;
            }
            for (double s2 : grid) {
                if (std::abs(g.mu_ch(0.0, s2)) > 1e-12 || std::abs(g.mu_ph(0.0, s2)) > 1e-12) {
                    a.passed = false;
                    a.note = point_note("rate nonzero at zero substrate", 0.0, s2);
                    return;
                }
                if (!(g.mu_h2(s2) >= 0.0) || !std::isfinite(g.mu_h2(s2))) {
                    a.passed = false;
                    a.note = point_note("hydrogen rate negative or not finite", s2, 0.0);
                    return;
                }
                for (double s : grid) {
                    double r0 = g.mu_ch(s, s2);
                    double r1 = g.mu_ph(s, s2);
                    if (!(r0 >= 0.0) || !(r1 >= 0.0) || !std::isfinite(r0) || !std::isfinite(r1)) {
                        a.passed = false;
                        a.note = point_note("rate negative or not finite", s, s2);
                        return;
                    }
                }
            }
        }));

    report.assumptions.push_back(
        run_check("chlorophenol rate increases with chlorophenol", [&](GrowthAssumption& a) {
            for (double s2 : grid) {
                for (double s : grid) {
                    if (!(g.dmu_ch_ds_ch(s, s2) > 0.0)) {
                        a.passed = false;
                        a.note = point_note("nonpositive slope", s, s2);
                        return;
                    }
                }
            }
        }));

    report.assumptions.push_back(
        run_check("chlorophenol rate increases with hydrogen", [&](GrowthAssumption& a) {
            for (double s : grid) {
                for (double s2 : grid) {
                    if (!(g.dmu_ch_ds_h2(s, s2) > 0.0)) {
                        a.passed = false;
                        a.note = point_note("nonpositive slope", s, s2);
                        return;
                    }
                }
            }
        }));

    report.assumptions.push_back(
        run_check("phenol rate increases with phenol", [&](GrowthAssumption& a) {
            for (double s2 : grid) {
                for (double s : grid) {
                    if (!(g.dmu_ph_ds_ph(s, s2) > 0.0)) {
                        a.passed = false;
                        a.note = point_note("nonpositive slope", s, s2);
                        return;
                    }
                }
            }
        }));

    report.assumptions.push_back(
        run_check("phenol rate strictly decreases with hydrogen", [&](GrowthAssumption& a) {
            for (double s : grid) {
                for (double s2 : grid) {
                    if (!(g.dmu_ph_ds_h2(s, s2) < 0.0)) {
                        a.passed = false;
                        a.note = point_note("nonnegative slope", s, s2);
                        return;
                    }
                }
            }
        }));

    report.assumptions.push_back(
        run_check("hydrogen rate strictly increases with hydrogen", [&](GrowthAssumption& a) {
            for (double s2 : grid) {
                if (!(g.dmu_h2_ds_h2(s2) > 0.0)) {
                    a.passed = false;
                    a.note = point_note("nonpositive slope", s2, 0.0);
                    return;
                }
            }
        }));

    report.assumptions.push_back(
        run_check("saturation limits monotone and bounded", [&](GrowthAssumption& a) {
            double sup = g.mu_ch_sup();
            double h2sat = g.mu_h2_sat();
            if (!std::isfinite(sup) || !(sup > 0.0) || !std::isfinite(h2sat) || !(h2sat > 0.0)) {
                a.passed = false;
                a.note = "saturation limit not finite and positive";
                return;
            }
            double prev_ch = 0.0;
            double prev_ph = std::numeric_limits<double>::infinity();
            for (double s2 : grid) {
                double cs = g.mu_ch_sat(s2);
                double ps = g.mu_ph_sat(s2);
                if (cs < prev_ch - 1e-12 || cs > sup * (1.0 + 1e-9)) {
                    a.passed = false;
                    a.note = point_note("chlorophenol saturation not increasing to its limit",
                                        s2, cs);
                    return;
                }
                if (ps > prev_ph + 1e-12 || !(ps >= 0.0)) {
                    a.passed = false;
                    a.note = point_note("phenol saturation not decreasing", s2, ps);
                    return;
                }
                if (g.mu_h2(s2) > h2sat * (1.0 + 1e-9)) {
                    a.passed = false;
                    a.note = point_note("hydrogen rate above its saturation limit", s2, 0.0);
                    return;
                }
                prev_ch = cs;
                prev_ph = ps;
            }
        }));

    report.assumptions.push_back(run_check(
        "inflow threshold unimodal on the hydrogen window", [&](GrowthAssumption& a) {
            if (web.omega >= 1.0) {
                a.note = "hydrogen recycle fraction >= 1: threshold undefined, nothing to check";
                return;
            }
            // Sample the threshold over the window at a few dilutions below
            // the window-closure point; one descent then one ascent allowed.
            double d_sup;
            try {
                d_sup = window_closure_dilution(web);
            } catch (const std::exception&) {
                d_sup = 0.2;
            }
            bool checked = false;
            for (double frac : {0.05, 0.3, 0.7}) {
                double d = frac * d_sup;
                std::optional<HydrogenWindow> w = h2_window(d, web);
                if (!w || !w->valid()) continue;
                checked = true;
                double clip = 1e-6 * w->width();
                bool ascending = false;
                double prev = std::numeric_limits<double>::quiet_NaN();
                for (int i = 0; i < grid_points; ++i) {
                    double s2 = w->lo + clip +
                                (w->width() - 2.0 * clip) * static_cast<double>(i) /
                                    static_cast<double>(grid_points - 1);
                    double v = inflow_threshold(s2, d, web);
                    if (i > 0) {
                        double tol = 1e-12 * std::max(1.0, std::abs(prev));
                        if (v > prev + tol) ascending = true;
                        if (ascending && v < prev - tol) {
                            a.passed = false;
                            a.note = point_note("second descent after a rise", d, s2);
                            return;
                        }
                    }
                    prev = v;
                }
            }
            if (!checked) a.note = "hydrogen window empty at sampled dilutions; nothing to check";
        }));

    return report;
}

} // namespace chemoweb
