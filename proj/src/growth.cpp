#include "growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace chemoweb {

namespace {

constexpr double kInvertRelTol = 1e-12;

double fd_step(double s) { return std::max(1e-8, 1e-6 * std::abs(s)); }

void require_nonneg(double v, const char* what) {
    if (!(v >= 0.0))
        throw domain_error(std::string(what) + " must be nonnegative");
}

// Bisection for an increasing (or decreasing) function f with f(0) < target
// known by monotonicity; the upper bracket is grown geometrically from 1.
template <class F>
double bisect_monotone(F&& f, bool increasing, const char* what) {
    double lo = 0.0, hi = 1.0;
    const double f0 = f(lo);
    auto above = [&](double v) { return increasing ? v > 0.0 : v < 0.0; };
    if (above(f0))
        throw no_solution_error(std::string(what) + ": no root at nonnegative substrate");
    if (f0 == 0.0)
        return 0.0;
    int grow = 0;
    while (!above(f(hi))) {
        hi *= 2.0;
        if (++grow > 600)
            throw no_solution_error(std::string(what) + ": rate unreachable at any substrate level");
    }
    if (hi > 1.0)
        lo = hi / 2.0;
    for (int it = 0; it < 400 && (hi - lo) > kInvertRelTol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (above(f(mid)))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

// ---------------------------------------------------------------------------
// GrowthModel defaults: finite differences and bracketed bisection.

double GrowthModel::dmu_ch_ds_ch(double s_ch, double s_h2) const {
    const double h = fd_step(s_ch);
    const double lo = std::max(0.0, s_ch - h);
    return (mu_ch(s_ch + h, s_h2) - mu_ch(lo, s_h2)) / (s_ch + h - lo);
}

double GrowthModel::dmu_ch_ds_h2(double s_ch, double s_h2) const {
    const double h = fd_step(s_h2);
    const double lo = std::max(0.0, s_h2 - h);
    return (mu_ch(s_ch, s_h2 + h) - mu_ch(s_ch, lo)) / (s_h2 + h - lo);
}

double GrowthModel::dmu_ph_ds_ph(double s_ph, double s_h2) const {
    const double h = fd_step(s_ph);
    const double lo = std::max(0.0, s_ph - h);
    return (mu_ph(s_ph + h, s_h2) - mu_ph(lo, s_h2)) / (s_ph + h - lo);
}

double GrowthModel::dmu_ph_ds_h2(double s_ph, double s_h2) const {
    const double h = fd_step(s_h2);
    const double lo = std::max(0.0, s_h2 - h);
    return (mu_ph(s_ph, s_h2 + h) - mu_ph(s_ph, lo)) / (s_h2 + h - lo);
}

double GrowthModel::dmu_h2_ds_h2(double s_h2) const {
    const double h = fd_step(s_h2);
    const double lo = std::max(0.0, s_h2 - h);
    return (mu_h2(s_h2 + h) - mu_h2(lo)) / (s_h2 + h - lo);
}

double GrowthModel::invert_mu_ch(double rate, double s_h2) const {
    require_nonneg(rate, "growth rate");
    require_nonneg(s_h2, "hydrogen level");
    if (rate == 0.0)
        return 0.0;
    if (rate >= mu_ch_sat(s_h2))
        throw no_solution_error("chlorophenol tier cannot reach the requested rate");
    return bisect_monotone([&](double s) { return mu_ch(s, s_h2) - rate; }, true,
                           "invert_mu_ch");
}

double GrowthModel::invert_mu_ph(double rate, double s_h2) const {
    require_nonneg(rate, "growth rate");
    require_nonneg(s_h2, "hydrogen level");
    if (rate == 0.0)
        return 0.0;
    if (rate >= mu_ph_sat(s_h2))
        throw no_solution_error("phenol tier cannot reach the requested rate");
    return bisect_monotone([&](double s) { return mu_ph(s, s_h2) - rate; }, true,
                           "invert_mu_ph");
}

double GrowthModel::invert_mu_h2(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate == 0.0)
        return 0.0;
    if (rate >= mu_h2_sat())
        throw no_solution_error("hydrogen tier cannot reach the requested rate");
    return bisect_monotone([&](double s) { return mu_h2(s) - rate; }, true, "invert_mu_h2");
}

double GrowthModel::h2_where_ch_sat_equals(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate == 0.0)
        return 0.0;
    if (rate >= mu_ch_sup())
        throw no_solution_error("saturated chlorophenol rate never reaches the requested level");
    return bisect_monotone([&](double s) { return mu_ch_sat(s) - rate; }, true,
                           "h2_where_ch_sat_equals");
}

double GrowthModel::h2_where_ph_sat_equals(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate <= 0.0 || rate >= mu_ph_sat(0.0))
        throw no_solution_error("saturated phenol rate never reaches the requested level");
    // mu_ph_sat is decreasing in hydrogen.
    return bisect_monotone([&](double s) { return mu_ph_sat(s) - rate; }, false,
                           "h2_where_ph_sat_equals");
}

double GrowthModel::window_closure_dilution_closed_form(double, double) const {
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Monod kinetics.

MonodGrowth::MonodGrowth(const RescaledParameters& p) : p_(p) {}

double MonodGrowth::mu_ch(double s_ch, double s_h2) const {
    require_nonneg(s_ch, "chlorophenol level");
    require_nonneg(s_h2, "hydrogen level");
    return p_.m0 * s_ch / (p_.K0 + s_ch) * s_h2 / (p_.L0 + s_h2);
}

double MonodGrowth::mu_ph(double s_ph, double s_h2) const {
    require_nonneg(s_ph, "phenol level");
    require_nonneg(s_h2, "hydrogen level");
    return p_.m1 * s_ph / (p_.K1 + s_ph) / (1.0 + s_h2 / p_.Ki);
}

double MonodGrowth::mu_h2(double s_h2) const {
    require_nonneg(s_h2, "hydrogen level");
    return p_.m2 * s_h2 / (p_.K2 + s_h2);
}

double MonodGrowth::mu_ch_sat(double s_h2) const {
    require_nonneg(s_h2, "hydrogen level");
    return p_.m0 * s_h2 / (p_.L0 + s_h2);
}

double MonodGrowth::mu_ph_sat(double s_h2) const {
    require_nonneg(s_h2, "hydrogen level");
    return p_.m1 / (1.0 + s_h2 / p_.Ki);
}

double MonodGrowth::mu_h2_sat() const { return p_.m2; }
double MonodGrowth::mu_ch_sup() const { return p_.m0; }

double MonodGrowth::dmu_ch_ds_ch(double s_ch, double s_h2) const {
    const double kf = p_.K0 + s_ch;
    return p_.m0 * p_.K0 / (kf * kf) * s_h2 / (p_.L0 + s_h2);
}

double MonodGrowth::dmu_ch_ds_h2(double s_ch, double s_h2) const {
    const double lf = p_.L0 + s_h2;
    return p_.m0 * s_ch / (p_.K0 + s_ch) * p_.L0 / (lf * lf);
}

double MonodGrowth::dmu_ph_ds_ph(double s_ph, double s_h2) const {
    const double kf = p_.K1 + s_ph;
    return p_.m1 * p_.K1 / (kf * kf) / (1.0 + s_h2 / p_.Ki);
}

double MonodGrowth::dmu_ph_ds_h2(double s_ph, double s_h2) const {
    const double inh = 1.0 + s_h2 / p_.Ki;
    return -p_.m1 * s_ph / (p_.K1 + s_ph) / (p_.Ki * inh * inh);
}

double MonodGrowth::dmu_h2_ds_h2(double s_h2) const {
    const double kf = p_.K2 + s_h2;
    return p_.m2 * p_.K2 / (kf * kf);
}

double MonodGrowth::invert_mu_ch(double rate, double s_h2) const {
    require_nonneg(rate, "growth rate");
    const double sat = mu_ch_sat(s_h2);
    if (rate == 0.0)
        return 0.0;
    if (rate >= sat)
        throw no_solution_error("chlorophenol tier cannot reach the requested rate");
    return p_.K0 * rate / (sat - rate);
}

double MonodGrowth::invert_mu_ph(double rate, double s_h2) const {
    require_nonneg(rate, "growth rate");
    const double sat = mu_ph_sat(s_h2);
    if (rate == 0.0)
        return 0.0;
    if (rate >= sat)
        throw no_solution_error("phenol tier cannot reach the requested rate");
    return p_.K1 * rate / (sat - rate);
}

double MonodGrowth::invert_mu_h2(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate == 0.0)
        return 0.0;
    if (rate >= p_.m2)
        throw no_solution_error("hydrogen tier cannot reach the requested rate");
    return p_.K2 * rate / (p_.m2 - rate);
}

double MonodGrowth::h2_where_ch_sat_equals(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate == 0.0)
        return 0.0;
    if (rate >= p_.m0)
        throw no_solution_error("saturated chlorophenol rate never reaches the requested level");
    return p_.L0 * rate / (p_.m0 - rate);
}

double MonodGrowth::h2_where_ph_sat_equals(double rate) const {
    require_nonneg(rate, "growth rate");
    if (rate <= 0.0 || rate >= p_.m1)
        throw no_solution_error("saturated phenol rate never reaches the requested level");
    return p_.Ki * (p_.m1 - rate) / rate;
}

double MonodGrowth::window_closure_dilution_closed_form(double a_ch, double a_ph) const {
    // The window's lower and upper hydrogen bounds cross where
    //   L0*(D+a_ch)*(D+a_ph) = Ki*(m1-D-a_ph)*(m0-D-a_ch),
    // a quadratic in D; the smallest admissible root is where the window
    // closes.  Degenerates to a linear equation when L0 == Ki.
    const double qa = p_.L0 - p_.Ki;
    const double qb = p_.L0 * (a_ch + a_ph) + p_.Ki * ((p_.m0 - a_ch) + (p_.m1 - a_ph));
    const double qc = p_.L0 * a_ch * a_ph - p_.Ki * (p_.m1 - a_ph) * (p_.m0 - a_ch);
    const double d_sup = std::min(p_.m0 - a_ch, p_.m1 - a_ph);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(d_sup > 0.0))
        return nan;

    double roots[2];
    int n = 0;
    if (std::abs(qa) < 1e-300 * std::abs(qb)) {
        if (qb != 0.0)
            roots[n++] = -qc / qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0)
            return nan;
        const double sq = std::sqrt(disc);
        // Citardauq form for the root that would cancel catastrophically.
        const double r1 = (-qb - std::copysign(sq, qb)) / (2.0 * qa);
        const double r2 = qc / (qa * r1);
        roots[n++] = r1;
        roots[n++] = r2;
    }
    double best = nan;
    for (int i = 0; i < n; ++i) {
        if (roots[i] > 0.0 && roots[i] < d_sup && (!(best == best) || roots[i] < best))
            best = roots[i];
    }
    return best;
}

// ---------------------------------------------------------------------------

MonodFoodWeb::MonodFoodWeb(const FullParameters& full)
    : p(rescale(full)), growth(std::make_unique<MonodGrowth>(p)) {
    web.growth = growth.get();
    web.omega = p.omega;
    web.a_ch = p.a0;
    web.a_ph = p.a1;
    web.a_h2 = p.a2;
}

bool GrowthAssumptionReport::all_passed() const {
    for (const auto& a : assumptions)
        if (!a.passed)
            return false;
    return true;
}

} // namespace chemoweb
