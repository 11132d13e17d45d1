#include "stability.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace chemoweb {

namespace {

constexpr double kAnalyticBand = 1e-10;  // "exactly zero" band for closed-form quantities

bool decay_free(const FoodWeb& web) {
    return web.a_ch == 0.0 && web.a_ph == 0.0 && web.a_h2 == 0.0;
}

void require_decay_free(const FoodWeb& web, const char* what) {
    if (!decay_free(web))
        throw wrong_method_error(std::string(what) +
                                 " holds for decay-free webs only; use the numeric method");
}

GrowthPartials partials_at(const State6& x, const FoodWeb& web) {
    const GrowthModel& g = *web.growth;
    GrowthPartials p;
    p.e = g.dmu_ch_ds_ch(x[3], x[5]);
    p.f = g.dmu_ch_ds_h2(x[3], x[5]);
    p.g = g.dmu_ph_ds_ph(x[4], x[5]);
    p.h = -g.dmu_ph_ds_h2(x[4], x[5]);
    p.i = g.dmu_h2_ds_h2(x[5]);
    return p;
}

} // namespace

const char* verdict_label(Verdict v) {
    switch (v) {
    case Verdict::stable: return "S";
    case Verdict::unstable: return "U";
    case Verdict::marginal: return "M";
    }
    return "?";
}

JacobianBundle jacobian(const State6& x, double dilution, const FoodWeb& web) {
    const GrowthModel& g = *web.growth;
    const double D = dilution;
    const double x0 = x[0], x1 = x[1], x2 = x[2];

    const double mu0 = g.mu_ch(x[3], x[5]);
    const double mu1 = g.mu_ph(x[4], x[5]);
    const double mu2 = g.mu_h2(x[5]);
    const GrowthPartials pr = partials_at(x, web);
    const double E = pr.e, F = pr.f, G = pr.g, Ht = -pr.h, I = pr.i;
    const double om = web.omega;

    Matrix6 J = Matrix6::Zero();
    // biomass rows
    J(0, 0) = mu0 - D - web.a_ch;
    J(0, 3) = E * x0;
    J(0, 5) = F * x0;
    J(1, 1) = mu1 - D - web.a_ph;
    J(1, 4) = G * x1;
    J(1, 5) = Ht * x1;
    J(2, 2) = mu2 - D - web.a_h2;
    J(2, 5) = I * x2;
    // substrate rows
    J(3, 0) = -mu0;
    J(3, 3) = -D - E * x0;
    J(3, 5) = -F * x0;
    J(4, 0) = mu0;
    J(4, 1) = -mu1;
    J(4, 3) = E * x0;
    J(4, 4) = -D - G * x1;
    J(4, 5) = F * x0 - Ht * x1;
    J(5, 0) = -om * mu0;
    J(5, 1) = mu1;
    J(5, 2) = -mu2;
    J(5, 3) = -om * E * x0;
    J(5, 4) = G * x1;
    J(5, 5) = -D + Ht * x1 - om * F * x0 - I * x2;

    JacobianBundle b;
    b.full = J;
    b.partials = pr;
    if (decay_free(web)) {
        const double H = pr.h;
        Matrix3 r;
        r(0, 0) = mu0 - D - (E + om * F) * x0;
        r(0, 1) = F * x0;
        r(0, 2) = -F * x0;
        r(1, 0) = (G + om * H) * x1;
        r(1, 1) = mu1 - D - (G + H) * x1;
        r(1, 2) = H * x1;
        r(2, 0) = -om * I * x2;
        r(2, 1) = I * x2;
        r(2, 2) = mu2 - D - I * x2;
        b.biomass_block = r;
    }
    return b;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw invalid_parameter_error("eigenvalues: matrix must be square and nonempty");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigenvalue iteration did not converge");

    const double scale = std::max(m.norm(), 1e-300);
    const auto vals = solver.eigenvalues();
    const auto vecs = solver.eigenvectors();
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    std::vector<std::complex<double>> out(static_cast<size_t>(vals.size()));
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        const Eigen::VectorXcd v = vecs.col(k);
        const double resid = (mc * v - vals[k] * v).norm() / std::max(v.norm(), 1e-300);
        if (!(resid <= 1e-8 * scale))
            throw numeric_error("eigenpair residual exceeds tolerance");
        out[static_cast<size_t>(k)] = vals[k];
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real())
            return a.real() > b.real();
        if (std::abs(a.imag()) != std::abs(b.imag()))
            return std::abs(a.imag()) < std::abs(b.imag());
        return a.imag() > b.imag();
    });
    return out;
}

Verdict routh_hurwitz_cubic(double c2, double c1, double c0) {
    const double margin = c1 * c2 - c0;
    const double tested[] = {c2, c1, c0, margin};
    for (double t : tested)
        if (std::abs(t) <= kAnalyticBand)
            return Verdict::marginal;
    for (double t : tested)
        if (t < 0.0)
            return Verdict::unstable;
    return Verdict::stable;
}

CubicCoeffs coexistence_char_poly(const SteadyState& ss, const FoodWeb& web) {
    require_decay_free(web, "the coexistence characteristic polynomial");
    if (ss.kind != SteadyStateKind::ss3)
        throw invalid_parameter_error("characteristic polynomial is defined at coexistence states");
    const GrowthPartials p = partials_at(ss.state, web);
    const double x0 = ss.state[0], x1 = ss.state[1], x2 = ss.state[2];
    const double om = web.omega;
    const double delta = p.e * (p.g + p.h) - (1.0 - om) * p.f * p.g;
    CubicCoeffs c;
    c.c2 = p.i * x2 + (p.g + p.h) * x1 + (p.e + om * p.f) * x0;
    c.c1 = delta * x0 * x1 + p.e * p.i * x0 * x2 + p.g * p.i * x1 * x2;
    c.c0 = p.e * p.g * p.i * x0 * x1 * x2;
    return c;
}

double ss3_hurwitz_margin(double dilution, double s0_in, const FoodWeb& web) {
    require_decay_free(web, "the Routh-Hurwitz margin");
    const auto ss = find_ss3(dilution, s0_in, web);
    if (!ss)
        throw domain_error("no coexistence state at this operating point");
    const GrowthPartials p = partials_at(ss->state, web);
    const double x0 = ss->state[0], x1 = ss->state[1], x2 = ss->state[2];
    const double om = web.omega;
    const double delta = p.e * (p.g + p.h) - (1.0 - om) * p.f * p.g;
    const double c2 = p.i * x2 + (p.g + p.h) * x1 + (p.e + om * p.f) * x0;
    // Expanded form of c1*c2 - c0; each product is a sum of positive terms
    // except delta, which carries the threshold-slope sign.
    return (p.e * p.i * x0 * x2 + delta * x0 * x1) * c2 +
           (p.i * x2 + (p.g + p.h) * x1 + om * p.f * x0) * p.g * p.i * x1 * x2;
}

StabilityVerdict stability_analytic(const SteadyState& ss, const FoodWeb& web) {
    require_decay_free(web, "the closed-form stability rule");
    StabilityVerdict v;
    v.method = VerdictMethod::analytic_decay_free;
    v.max_real_part = std::numeric_limits<double>::quiet_NaN();

    switch (ss.kind) {
    case SteadyStateKind::ss1:
        v.verdict = Verdict::stable;
        v.detail = "washout is always locally stable";
        return v;
    case SteadyStateKind::ss2_flat:
    case SteadyStateKind::ss2_sharp: {
        const double s2 = ss.state[5];
        const double invasion = web.growth->mu_h2(s2) - ss.dilution;
        const double slope = inflow_threshold_slope(s2, ss.dilution, web);
        if (std::abs(invasion) <= kAnalyticBand || std::abs(slope) <= kAnalyticBand) {
            v.verdict = Verdict::marginal;
            v.detail = "on the stability boundary";
            return v;
        }
        if (invasion < 0.0 && slope > 0.0) {
            v.verdict = Verdict::stable;
            v.detail = "methanogen cannot invade and the threshold slope is positive";
        } else {
            v.verdict = Verdict::unstable;
            v.detail = invasion > 0.0 ? "methanogen can invade" : "falling threshold branch";
        }
        return v;
    }
    case SteadyStateKind::ss3: {
        const double slope = inflow_threshold_slope(ss.state[5], ss.dilution, web);
        if (slope >= 0.0) {
            v.verdict = Verdict::stable;
            v.detail = "threshold slope nonnegative at the pinned hydrogen level";
            return v;
        }
        const CubicCoeffs c = coexistence_char_poly(ss, web);
        v.verdict = routh_hurwitz_cubic(c.c2, c.c1, c.c0);
        v.detail = v.verdict == Verdict::stable
                       ? "Routh-Hurwitz margin positive"
                       : (v.verdict == Verdict::unstable ? "Routh-Hurwitz margin negative"
                                                         : "Routh-Hurwitz margin on the boundary");
        return v;
    }
    }
    throw invalid_parameter_error("unknown steady-state kind");
}

StabilityVerdict stability_numeric(const SteadyState& ss, const FoodWeb& web) {
    const auto eig = eigenvalues(jacobian(ss.state, ss.dilution, web).full);
    StabilityVerdict v;
    v.method = VerdictMethod::eigenvalue_numeric;
    v.max_real_part = eig.front().real();
    if (std::abs(v.max_real_part) <= kMarginalBand)
        v.verdict = Verdict::marginal;
    else
        v.verdict = v.max_real_part < 0.0 ? Verdict::stable : Verdict::unstable;
    v.detail = "largest eigenvalue real part";
    return v;
}

} // namespace chemoweb
