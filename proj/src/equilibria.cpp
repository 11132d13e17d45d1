#include "equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace chemoweb {

namespace {

constexpr double kEdgeClip = 1e-14;       // fraction of the window width kept off the poles
constexpr double kGoldenRelTol = 1e-12;   // golden-section width target, relative to window
constexpr double kRootRelTol = 1e-12;     // bisection tolerance, relative in s_h2
constexpr double kCoalesceBand = 1e-10;   // inflow band treated as "at the threshold"
constexpr int kMembershipSamples = 2048;  // dilution grid for the coexistence range
constexpr int kSlopeSamples = 256;        // dilution grid for slope sign changes

double nan_() { return std::numeric_limits<double>::quiet_NaN(); }

void require_regime(const FoodWeb& web) {
    if (!(web.omega < 1.0))
        throw regime_error("hydrogen recycle fraction omega >= 1: no populated steady state exists");
}

// Biomass per unit of consumed substrate at steady state; the decay-free
// limit is 1 (the guard avoids 0/0 at D = 0 with zero decay).
double biomass_factor(double dilution, double decay) {
    return decay == 0.0 ? 1.0 : dilution / (dilution + decay);
}

} // namespace

const char* kind_label(SteadyStateKind k) {
    switch (k) {
    case SteadyStateKind::ss1: return "SS1";
    case SteadyStateKind::ss2_flat: return "SS2b";
    case SteadyStateKind::ss2_sharp: return "SS2s";
    case SteadyStateKind::ss3: return "SS3";
    }
    return "?";
}

double h2_break_even_ch(double dilution, const FoodWeb& web) {
    if (!(dilution >= 0.0))
        throw domain_error("dilution rate must be nonnegative");
    return web.growth->h2_where_ch_sat_equals(dilution + web.a_ch);
}

double h2_break_even_ph(double dilution, const FoodWeb& web) {
    if (!(dilution >= 0.0))
        throw domain_error("dilution rate must be nonnegative");
    return web.growth->h2_where_ph_sat_equals(dilution + web.a_ph);
}

std::optional<HydrogenWindow> h2_window(double dilution, const FoodWeb& web) {
    double lo, hi;
    try {
        lo = h2_break_even_ch(dilution, web);
        hi = h2_break_even_ph(dilution, web);
    } catch (const no_solution_error&) {
        return std::nullopt;
    }
    HydrogenWindow w{lo, hi};
    if (!w.valid())
        return std::nullopt;
    return w;
}

double inflow_threshold(double s_h2, double dilution, const FoodWeb& web) {
    require_regime(web);
    const auto w = h2_window(dilution, web);
    if (!w)
        throw domain_error("no hydrogen window at this dilution rate");
    if (!(s_h2 > w->lo && s_h2 < w->hi))
        throw domain_error("hydrogen level outside the open window");
    const GrowthModel& g = *web.growth;
    const double s0 = g.invert_mu_ch(dilution + web.a_ch, s_h2);
    const double s1 = g.invert_mu_ph(dilution + web.a_ph, s_h2);
    return s0 + (s1 + s_h2) / (1.0 - web.omega);
}

double inflow_threshold_slope(double s_h2, double dilution, const FoodWeb& web) {
    require_regime(web);
    const auto w = h2_window(dilution, web);
    if (!w)
        throw domain_error("no hydrogen window at this dilution rate");
    if (!(s_h2 > w->lo && s_h2 < w->hi))
        throw domain_error("hydrogen level outside the open window");
    const GrowthModel& g = *web.growth;
    const double s0 = g.invert_mu_ch(dilution + web.a_ch, s_h2);
    const double s1 = g.invert_mu_ph(dilution + web.a_ph, s_h2);
    // Differentiate the level sets mu_ch(s0, s_h2) = const and
    // mu_ph(s1, s_h2) = const:  ds0/ds_h2 = -F/E, ds1/ds_h2 = H/G
    // with H the sign-flipped hydrogen partial of the phenol tier.
    const double e = g.dmu_ch_ds_ch(s0, s_h2);
    const double f = g.dmu_ch_ds_h2(s0, s_h2);
    const double gg = g.dmu_ph_ds_ph(s1, s_h2);
    const double h = -g.dmu_ph_ds_h2(s1, s_h2);
    return -f / e + (h / gg + 1.0) / (1.0 - web.omega);
}

double h2_at_threshold_min(double dilution, const FoodWeb& web) {
    require_regime(web);
    const auto w = h2_window(dilution, web);
    if (!w)
        throw domain_error("no hydrogen window at this dilution rate");
    const double clip = kEdgeClip * w->width();
    double a = w->lo + clip, b = w->hi - clip;
    auto psi = [&](double s) { return inflow_threshold(s, dilution, web); };

    // Golden-section search; the threshold is unimodal on the window.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = psi(c), fd = psi(d);
    const double target = kGoldenRelTol * w->width();
    while (b - a > target) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = psi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = psi(d);
        }
    }
    return 0.5 * (a + b);
}

double ss2_threshold(double dilution, const FoodWeb& web) {
    return inflow_threshold(h2_at_threshold_min(dilution, web), dilution, web);
}

double h2_at_coexistence(double dilution, const FoodWeb& web) {
    if (!(dilution >= 0.0))
        throw domain_error("dilution rate must be nonnegative");
    return web.growth->invert_mu_h2(dilution + web.a_h2);
}

double ss3_threshold(double dilution, const FoodWeb& web) {
    return inflow_threshold(h2_at_coexistence(dilution, web), dilution, web);
}

double ss3_threshold_slope(double dilution, const FoodWeb& web) {
    return inflow_threshold_slope(h2_at_coexistence(dilution, web), dilution, web);
}

double window_closure_dilution(const FoodWeb& web) {
    const GrowthModel& g = *web.growth;
    if (g.has_window_closure_closed_form())
        return g.window_closure_dilution_closed_form(web.a_ch, web.a_ph);

    const double sup_ch = g.mu_ch_sup() - web.a_ch;
    const double sup_ph = g.mu_ph_sat(0.0) - web.a_ph;
    const double d_sup = std::min(sup_ch, sup_ph);
    if (!(d_sup > 0.0))
        return nan_();
    // Window width changes sign exactly once: open at D=0 (or never), closed
    // near the saturation limit.
    auto gap = [&](double dd) -> double {
        const auto w = h2_window(dd, web);
        if (!w)
            return 1.0;  // treat a missing window as closed
        return w->lo - w->hi;
    };
    if (gap(0.0) >= 0.0)
        return nan_();
    double hi = d_sup;
    for (int k = 1; k <= 80; ++k) {
        hi = d_sup * (1.0 - std::pow(0.5, k));
        if (gap(hi) > 0.0)
            break;
    }
    if (gap(hi) <= 0.0)
        return nan_();
    double lo = 0.0;
    while (hi - lo > kRootRelTol * hi) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Is the methanogen's pinned hydrogen level strictly inside the window?
bool coexistence_possible(double dilution, const FoodWeb& web) {
    try {
        const double s2 = h2_at_coexistence(dilution, web);
        const auto w = h2_window(dilution, web);
        return w && s2 > w->lo && s2 < w->hi;
    } catch (const no_solution_error&) {
        return false;
    }
}

// Bisection on a boolean predicate: `lo` has value `lo_val`, `hi` differs.
template <class Pred>
double refine_flip(Pred&& member, double lo, bool lo_val, double hi) {
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (member(mid) == lo_val)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

CriticalDilutions critical_dilutions(const FoodWeb& web) {
    require_regime(web);
    CriticalDilutions cd;
    cd.d1 = window_closure_dilution(web);
    if (!(cd.d1 > 0.0)) {
        cd.i2_kind = I2Kind::empty;
        cd.i3_empty = true;
        return cd;
    }

    // Sample coexistence membership over (0, d1).  The grid starts a hair
    // above zero: D = 0 itself is degenerate (no flow through the reactor).
    auto member = [&](double dd) { return coexistence_possible(dd, web); };
    const double d_eps = 1e-6 * cd.d1;
    std::vector<double> flips;
    double prev_d = d_eps;
    bool prev_m = member(prev_d);
    const bool member_at_zero = prev_m;
    for (int k = 1; k <= kMembershipSamples; ++k) {
        const double dd = d_eps + (cd.d1 * (1.0 - 1e-9) - d_eps) * k / kMembershipSamples;
        const bool m = member(dd);
        if (m != prev_m)
            flips.push_back(refine_flip(member, prev_d, prev_m, dd));
        prev_d = dd;
        prev_m = m;
    }
    const bool member_at_end = prev_m;

    if (member_at_zero) {
        cd.i2_kind = I2Kind::from_zero;
        cd.d2_min = 0.0;
        if (flips.empty())
            cd.d2_max = cd.d1;
        else if (flips.size() == 1)
            cd.d2_max = flips[0];
        else
            throw numeric_error("coexistence dilution range is not a single interval");
    } else if (flips.empty()) {
        cd.i2_kind = I2Kind::empty;
        cd.i3_empty = true;
        return cd;
    } else if (flips.size() <= 2 && !member_at_zero) {
        cd.i2_kind = I2Kind::interior;
        cd.d2_min = flips[0];
        cd.d2_max = flips.size() == 2 ? flips[1] : cd.d1;
        if (flips.size() == 1 && !member_at_end)
            throw numeric_error("coexistence dilution range is not a single interval");
    } else {
        throw numeric_error("coexistence dilution range is not a single interval");
    }

    // Slope of the inflow threshold at the pinned hydrogen level, sampled
    // across the interior of the coexistence range.
    const double lo = std::max(cd.d2_min, d_eps);
    const double hi = cd.d2_max;
    const double margin = 1e-6 * (hi - lo);
    auto slope = [&](double dd) { return ss3_threshold_slope(dd, web); };
    bool any_neg = false, any_pos = false;
    double sp = slope(lo + margin);
    double dp = lo + margin;
    (sp < 0.0 ? any_neg : any_pos) = true;
    for (int k = 1; k <= kSlopeSamples; ++k) {
        const double dd = lo + margin + (hi - lo - 2.0 * margin) * k / kSlopeSamples;
        const double s = slope(dd);
        (s < 0.0 ? any_neg : any_pos) = true;
        if ((s < 0.0) != (sp < 0.0)) {
            double a = dp, b = dd, sa = sp;
            for (int it = 0; it < 80 && (b - a) > kRootRelTol * b; ++it) {
                const double mid = 0.5 * (a + b);
                const double sm = slope(mid);
                if ((sm < 0.0) == (sa < 0.0)) {
                    a = mid;
                    sa = sm;
                } else {
                    b = mid;
                }
            }
            cd.slope_crossings.push_back(0.5 * (a + b));
        }
        sp = s;
        dp = dd;
    }
    if (!cd.slope_crossings.empty())
        cd.d3 = cd.slope_crossings.front();
    cd.i3_equals_i2 = any_neg && !any_pos;
    cd.i3_empty = any_pos && !any_neg;
    return cd;
}

Regime classify_regime(const FoodWeb& web) {
    require_regime(web);
    Regime r{RegimeTag::c, nan_(), nan_()};
    double pinned0;
    try {
        pinned0 = h2_at_coexistence(0.0, web);
    } catch (const no_solution_error&) {
        // The methanogen cannot even offset its own decay: coexistence is
        // impossible at any dilution.
        return r;
    }
    const double lo0 = h2_break_even_ch(0.0, web);
    r.h2_pinned_at_zero = pinned0;
    r.h2_window_lo_at_zero = lo0;

    const double scale = std::max({lo0, pinned0, 1e-300});
    bool pinned_above;
    if (std::abs(lo0 - pinned0) <= 1e-12 * scale) {
        // Tie at D=0 (always the case without maintenance): compare how fast
        // the two curves leave the origin.
        const double h = 1e-7;
        const double dlo = (h2_break_even_ch(h, web) - lo0) / h;
        const double dpin = (h2_at_coexistence(h, web) - pinned0) / h;
        pinned_above = dpin > dlo;
    } else {
        pinned_above = pinned0 > lo0;
    }
    if (pinned_above) {
        r.tag = RegimeTag::a_or_b;
        return r;
    }

    // Pinned level starts below the window; decide whether it ever catches
    // up before the window closes.
    const double d1 = window_closure_dilution(web);
    if (!(d1 > 0.0)) {
        r.tag = RegimeTag::c;
        return r;
    }
    try {
        const double pinned1 = h2_at_coexistence(d1, web);
        const double lo1 = h2_break_even_ch(d1, web);
        r.tag = pinned1 > lo1 ? RegimeTag::d : RegimeTag::c;
    } catch (const no_solution_error&) {
        r.tag = RegimeTag::c;
    }
    return r;
}

SteadyState washout_state(double dilution, double s0_in, const FoodWeb& web) {
    SteadyState ss;
    ss.kind = SteadyStateKind::ss1;
    ss.state = {0.0, 0.0, 0.0, s0_in, 0.0, 0.0};
    ss.dilution = dilution;
    ss.inflow = s0_in;
    ss.residual = rhs_residual(ss.state, dilution, s0_in, web);
    return ss;
}

namespace {

SteadyState assemble_populated(SteadyStateKind kind, double s2, double dilution, double s0_in,
                               const FoodWeb& web) {
    const GrowthModel& g = *web.growth;
    const double s0 = g.invert_mu_ch(dilution + web.a_ch, s2);
    const double s1 = g.invert_mu_ph(dilution + web.a_ph, s2);
    const double x0 = biomass_factor(dilution, web.a_ch) * (s0_in - s0);
    const double x1 = biomass_factor(dilution, web.a_ph) * (s0_in - s0 - s1);
    double x2 = 0.0;
    if (kind == SteadyStateKind::ss3) {
        x2 = biomass_factor(dilution, web.a_h2) *
             ((1.0 - web.omega) * (s0_in - s0) - s1 - s2);
        // At the existence threshold the formula is an exact zero up to
        // roundoff; tiny negatives inside the coalescence band are clamped.
        if (x2 < 0.0 && x2 > -kCoalesceBand * std::max(1.0, s0_in))
            x2 = 0.0;
    }
    SteadyState ss;
    ss.kind = kind;
    ss.state = {x0, x1, x2, s0, s1, s2};
    ss.dilution = dilution;
    ss.inflow = s0_in;
    ss.residual = rhs_residual(ss.state, dilution, s0_in, web);
    return ss;
}

// Root of inflow_threshold(s) == s0_in on a monotone branch [lo, hi].
double threshold_root(double lo, double hi, double s0_in, double dilution, const FoodWeb& web) {
    auto excess = [&](double s) { return inflow_threshold(s, dilution, web) - s0_in; };
    double flo = excess(lo);
    double fhi = excess(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        // The root sits inside the pole clip; the clipped edge is within
        // 1e-14 of the window width of the true root.
        return std::abs(flo) < std::abs(fhi) ? lo : hi;
    }
    for (int it = 0; it < 200 && (hi - lo) > kRootRelTol * std::max(std::abs(lo), std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = excess(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<SteadyState> find_ss2(double dilution, double s0_in, const FoodWeb& web) {
    if (!(web.omega < 1.0) || !(dilution > 0.0) || !(s0_in > 0.0))
        return {};
    const auto w = h2_window(dilution, web);
    if (!w)
        return {};
    const double s_min = h2_at_threshold_min(dilution, web);
    const double f1 = inflow_threshold(s_min, dilution, web);
    const double band = kCoalesceBand * std::max(1.0, s0_in);
    if (s0_in < f1 - band)
        return {};
    if (std::abs(s0_in - f1) <= band) {
        // Tangent case: the two branches coalesce at the minimum.
        return {assemble_populated(SteadyStateKind::ss2_flat, s_min, dilution, s0_in, web)};
    }
    const double clip = kEdgeClip * w->width();
    const double flat = threshold_root(w->lo + clip, s_min, s0_in, dilution, web);
    const double sharp = threshold_root(s_min, w->hi - clip, s0_in, dilution, web);
    return {assemble_populated(SteadyStateKind::ss2_flat, flat, dilution, s0_in, web),
            assemble_populated(SteadyStateKind::ss2_sharp, sharp, dilution, s0_in, web)};
}

std::optional<SteadyState> find_ss3(double dilution, double s0_in, const FoodWeb& web) {
    if (!(web.omega < 1.0) || !(dilution > 0.0) || !(s0_in > 0.0))
        return std::nullopt;
    if (!coexistence_possible(dilution, web))
        return std::nullopt;
    const double s2 = h2_at_coexistence(dilution, web);
    const double f2 = inflow_threshold(s2, dilution, web);
    const double band = kCoalesceBand * std::max(1.0, s0_in);
    if (s0_in < f2 - band)
        return std::nullopt;
    return assemble_populated(SteadyStateKind::ss3, s2, dilution, s0_in, web);
}

std::vector<SteadyState> find_all_steady_states(double dilution, double s0_in, const FoodWeb& web) {
    std::vector<SteadyState> all;
    all.push_back(washout_state(dilution, s0_in, web));
    if (web.omega < 1.0) {
        for (auto& ss : find_ss2(dilution, s0_in, web))
            all.push_back(ss);
        if (auto ss3 = find_ss3(dilution, s0_in, web))
            all.push_back(*ss3);
    }
    return all;
}

} // namespace chemoweb
