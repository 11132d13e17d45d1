#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "equilibria.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "stability.hpp"
#include "system.hpp"

using namespace chemoweb;

namespace {

// multiset comparison of spectra, tolerant to ordering and conjugate swaps
void check_spectrum(std::vector<std::complex<double>> got,
                    std::vector<std::complex<double>> want, double tol) {
    REQUIRE(got.size() == want.size());
    auto key = [](const std::complex<double>& a, const std::complex<double>& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    };
    std::sort(got.begin(), got.end(), key);
    std::sort(want.begin(), want.end(), key);
    for (size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i] - want[i]) <= tol);
    }
}

} // namespace

TEST_CASE("eigenvalue helper: order and validation") {
    Eigen::MatrixXd rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;
    auto eig = eigenvalues(rot);
    REQUIRE(eig.size() == 2);
    CHECK(eig[0].real() == doctest::Approx(0.0).scale(1.0));
    CHECK(eig[0].imag() == doctest::Approx(1.0));  // positive imaginary first
    CHECK(eig[1].imag() == doctest::Approx(-1.0));

    // companion matrix of (x+1)(x+2)(x+3)
    Eigen::MatrixXd comp(3, 3);
    comp << 0, 0, -6, 1, 0, -11, 0, 1, -6;
    check_spectrum(eigenvalues(comp), {{-1, 0}, {-2, 0}, {-3, 0}}, 1e-10);

    // descending real part
    Eigen::MatrixXd diag = Eigen::Vector3d(-3.0, 5.0, 0.5).asDiagonal();
    auto order = eigenvalues(diag);
    CHECK(order[0].real() == doctest::Approx(5.0));
    CHECK(order[1].real() == doctest::Approx(0.5));
    CHECK(order[2].real() == doctest::Approx(-3.0));
}

TEST_CASE("washout spectrum is exactly the dilution-plus-decay ladder") {
    for (char tag : {'a', 'd'}) {
        for (bool maint : {true, false}) {
            MonodFoodWeb mw(preset_case(tag).with_maintenance(maint));
            const FoodWeb& web = mw.web;
            double d = 0.07;
            SteadyState ss1 = washout_state(d, 0.5, web);
            auto eig = eigenvalues(jacobian(ss1.state, d, web).full);
            std::vector<std::complex<double>> want = {
                {-d - web.a_ch, 0}, {-d - web.a_ph, 0}, {-d - web.a_h2, 0},
                {-d, 0},            {-d, 0},            {-d, 0}};
            check_spectrum(eig, want, 1e-12);

            StabilityVerdict nv = stability_numeric(ss1, web);
            CHECK(nv.verdict == Verdict::stable);
            CHECK(nv.max_real_part == doctest::Approx(-d).epsilon(1e-12));
            if (!maint) {
                StabilityVerdict av = stability_analytic(ss1, web);
                CHECK(av.verdict == Verdict::stable);
                CHECK(av.method == VerdictMethod::analytic_decay_free);
            }
        }
    }
}

TEST_CASE("Jacobian matches central finite differences of the vector field") {
    MonodFoodWeb mw(preset_case('a'));
    const FoodWeb& web = mw.web;
    const double d = 0.05;
    const double s0in = 0.029;

    State6 x = {0.05, 0.04, 0.001, 0.3, 0.02, 2e-6};
    Matrix6 J = jacobian(x, d, web).full;

    for (int j = 0; j < 6; ++j) {
        double h = 1e-5 * std::max(std::abs(x[j]), 1e-6);
        State6 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        State6 fp = rhs_rescaled(xp, d, s0in, web);
        State6 fm = rhs_rescaled(xm, d, s0in, web);
        for (int i = 0; i < 6; ++i) {
            double fd = (fp[i] - fm[i]) / (2.0 * h);
            INFO("entry (", i, ",", j, ")");
            CHECK(std::abs(J(i, j) - fd) <= 1e-5 * std::max(1.0, std::abs(J(i, j))));
        }
    }

    // growth partials carry the documented signs
    GrowthPartials p = jacobian(x, d, web).partials;
    CHECK(p.e > 0.0);
    CHECK(p.f > 0.0);
    CHECK(p.g > 0.0);
    CHECK(p.h > 0.0);  // sign-flipped hydrogen inhibition
    CHECK(p.i > 0.0);
}

TEST_CASE("decay-free reduction: full spectrum = biomass block + washed aggregates") {
    MonodFoodWeb mw(preset_case('a').with_maintenance(false));
    const FoodWeb& web = mw.web;
    double d = 0.1;
    double s0in = ss3_threshold(d, web) * 1.5;

    auto ss3 = find_ss3(d, s0in, web);
    REQUIRE(ss3.has_value());
    JacobianBundle bundle = jacobian(ss3->state, d, web);
    REQUIRE(bundle.biomass_block.has_value());

    auto block_eig = eigenvalues(*bundle.biomass_block);
    std::vector<std::complex<double>> want(block_eig.begin(), block_eig.end());
    want.push_back({-d, 0});
    want.push_back({-d, 0});
    want.push_back({-d, 0});
    check_spectrum(eigenvalues(bundle.full), want, 1e-8);

    // with maintenance there is no exact reduction
    MonodFoodWeb decay(preset_case('a'));
    auto ssd = find_ss3(d, s0in, decay.web);
    REQUIRE(ssd.has_value());
    CHECK_FALSE(jacobian(ssd->state, d, decay.web).biomass_block.has_value());
}

TEST_CASE("Routh-Hurwitz cubic rule") {
    CHECK(routh_hurwitz_cubic(6.0, 11.0, 6.0) == Verdict::stable);    // (x+1)(x+2)(x+3)
    CHECK(routh_hurwitz_cubic(1.0, 1.0, 2.0) == Verdict::unstable);   // margin -1
    CHECK(routh_hurwitz_cubic(2.0, 1.0, 2.0) == Verdict::marginal);   // (x^2+1)(x+2)
    CHECK(routh_hurwitz_cubic(-1.0, 1.0, 1.0) == Verdict::unstable);  // negative coefficient
    CHECK(routh_hurwitz_cubic(2.0, 1.0, 2.0 + 5e-11) == Verdict::marginal);
    CHECK(routh_hurwitz_cubic(2.0, 1.0, 1.0) == Verdict::stable);
}

TEST_CASE("expanded Routh-Hurwitz margin equals the characteristic-polynomial product") {
    MonodFoodWeb mw(preset_case('a').with_maintenance(false));
    const FoodWeb& web = mw.web;
    for (double d : {0.03, 0.1, 0.2, 0.3}) {
        for (double factor : {1.02, 1.5, 4.0}) {
            double s0in = ss3_threshold(d, web) * factor;
            auto ss3 = find_ss3(d, s0in, web);
            REQUIRE(ss3.has_value());
            CubicCoeffs c = coexistence_char_poly(*ss3, web);
            CHECK(c.c2 > 0.0);  // c2 and c0 are sign-definite; c1 is not
            CHECK(c.c0 > 0.0);
            double margin = ss3_hurwitz_margin(d, s0in, web);
            INFO("d=", d, " factor=", factor);
            CHECK(margin == doctest::Approx(c.c1 * c.c2 - c.c0)
                                .epsilon(1e-9)
                                .scale(std::abs(c.c1 * c.c2) + std::abs(c.c0)));
        }
    }
}

TEST_CASE("closed-form rule refuses webs with decay") {
    MonodFoodWeb decay(preset_case('a'));
    const FoodWeb& web = decay.web;
    double d = 0.01;
    double s0in = rescale_inflow(0.16, decay.p);
    auto all = find_all_steady_states(d, s0in, web);
    REQUIRE(all.size() == 4);
    CHECK_THROWS_AS(stability_analytic(all[1], web), wrong_method_error);
    CHECK_THROWS_AS(stability_analytic(all[3], web), wrong_method_error);
    CHECK_THROWS_AS(coexistence_char_poly(all[3], web), wrong_method_error);
    CHECK_THROWS_AS(ss3_hurwitz_margin(d, s0in, web), wrong_method_error);
    // the numeric route handles decay fine
    CHECK(stability_numeric(all[3], web).verdict == Verdict::stable);
}

TEST_CASE("analytic and numeric verdicts agree on decay-free webs") {
    for (char tag : {'a', 'd'}) {
        MonodFoodWeb mw(preset_case(tag).with_maintenance(false));
        const FoodWeb& web = mw.web;
        int compared = 0;
        for (double d : {0.02, 0.05, 0.1, 0.15, 0.2, 0.25}) {
            for (double S : {0.03, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
                double s0in = rescale_inflow(S, mw.p);
                for (const SteadyState& ss : find_all_steady_states(d, s0in, web)) {
                    StabilityVerdict a = stability_analytic(ss, web);
                    StabilityVerdict n = stability_numeric(ss, web);
                    if (a.verdict == Verdict::marginal || n.verdict == Verdict::marginal)
                        continue;
                    INFO("case ", tag, " d=", d, " S=", S, " ", kind_label(ss.kind),
                         " maxre=", n.max_real_part);
                    CHECK(a.verdict == n.verdict);
                    ++compared;
                    if (ss.kind == SteadyStateKind::ss2_flat) {
                        CHECK(a.verdict == Verdict::unstable);  // falling branch
                    }
                    if (ss.kind == SteadyStateKind::ss2_sharp &&
                        a.verdict == Verdict::stable) {
                        CHECK(web.growth->mu_h2(ss.state[5]) < d);
                        CHECK(inflow_threshold_slope(ss.state[5], d, web) > 0.0);
                    }
                }
            }
        }
        CHECK(compared > 60);
    }
}

TEST_CASE("frozen eigenvalue checks at pinned operating points") {
    MonodFoodWeb mw(preset_case('a'));
    const FoodWeb& web = mw.web;
    double d = 0.01;

    SUBCASE("stable focus well inside the coexistence region") {
        auto ss3 = find_ss3(d, rescale_inflow(0.16, mw.p), web);
        REQUIRE(ss3.has_value());
        StabilityVerdict v = stability_numeric(*ss3, web);
        CHECK(v.verdict == Verdict::stable);
        CHECK(v.max_real_part == doctest::Approx(-0.01004).epsilon(2e-3));
        auto eig = eigenvalues(jacobian(ss3->state, d, web).full);
        CHECK(std::abs(eig[0].imag()) == doctest::Approx(0.07587).epsilon(2e-3));
    }

    SUBCASE("unstable focus just below the oscillation boundary") {
        auto ss3 = find_ss3(d, rescale_inflow(0.097, mw.p), web);
        REQUIRE(ss3.has_value());
        StabilityVerdict v = stability_numeric(*ss3, web);
        CHECK(v.verdict == Verdict::unstable);
        CHECK(v.max_real_part == doctest::Approx(0.000915).epsilon(5e-3));
    }
}
