#include "system.hpp"

#include <algorithm>
#include <cmath>

namespace chemoweb {

State6 rhs_rescaled(const State6& x, double dilution, double s0_in, const FoodWeb& web) {
    const GrowthModel& g = *web.growth;
    const double D = dilution;
    const double x0 = x[0], x1 = x[1], x2 = x[2];
    const double s0 = x[3], s1 = x[4], s2 = x[5];

    const double mu0 = g.mu_ch(s0, s2);
    const double mu1 = g.mu_ph(s1, s2);
    const double mu2 = g.mu_h2(s2);

    State6 dx;
    dx[0] = (mu0 - D - web.a_ch) * x0;
    dx[1] = (mu1 - D - web.a_ph) * x1;
    dx[2] = (mu2 - D - web.a_h2) * x2;
    dx[3] = D * (s0_in - s0) - mu0 * x0;
    dx[4] = -D * s1 + mu0 * x0 - mu1 * x1;
    dx[5] = -D * s2 + mu1 * x1 - web.omega * mu0 * x0 - mu2 * x2;
    return dx;
}

State6 rhs_full(const State6& X, double dilution, const Inflows& in, const FullParameters& p) {
    const double D = dilution;
    const double X0 = X[0], X1 = X[1], X2 = X[2];
    const double S0 = X[3], S1 = X[4], S2 = X[5];

    // Uptake rates per unit biomass; yields split them between growth and
    // product formation, the stoichiometric fractions route the products.
    const double f0 = p.km_ch * S0 / (p.Ks_ch + S0) * S2 / (p.Ks_h2_c + S2);
    const double f1 = p.km_ph * S1 / (p.Ks_ph + S1) / (1.0 + S2 / p.Ki_h2);
    const double f2 = p.km_h2 * S2 / (p.Ks_h2 + S2);
    const double y3 = stoich_y3(p), y4 = stoich_y4(p), y5 = stoich_y5();

    State6 dX;
    dX[0] = (p.Y_ch * f0 - D - p.kdec_ch) * X0;
    dX[1] = (p.Y_ph * f1 - D - p.kdec_ph) * X1;
    dX[2] = (p.Y_h2 * f2 - D - p.kdec_h2) * X2;
    dX[3] = D * (in.S_ch - S0) - f0 * X0;
    dX[4] = D * (in.S_ph - S1) + y3 * f0 * X0 - f1 * X1;
    dX[5] = D * (in.S_h2 - S2) + y4 * f1 * X1 - y5 * f0 * X0 - f2 * X2;
    return dX;
}

State6 to_rescaled_state(const State6& f, const FullParameters& p) {
    const double y3 = stoich_y3(p), y4 = stoich_y4(p);
    return {y3 * y4 / p.Y_ch * f[0], y4 / p.Y_ph * f[1], f[2] / p.Y_h2,
            y3 * y4 * f[3],          y4 * f[4],          f[5]};
}

State6 to_full_state(const State6& r, const FullParameters& p) {
    const double y3 = stoich_y3(p), y4 = stoich_y4(p);
    return {p.Y_ch / (y3 * y4) * r[0], p.Y_ph / y4 * r[1], p.Y_h2 * r[2],
            r[3] / (y3 * y4),          r[4] / y4,          r[5]};
}

double rhs_residual(const State6& x, double dilution, double s0_in, const FoodWeb& web) {
    const State6 dx = rhs_rescaled(x, dilution, s0_in, web);
    double r = 0.0;
    for (double v : dx)
        r = std::max(r, std::abs(v));
    return r;
}

} // namespace chemoweb
