#include <cmath>

#include <doctest.h>

#include "errors.hpp"
#include "growth.hpp"
#include "params.hpp"

using namespace chemoweb;

namespace {

// Forwards only the rate functions, leaving partials, inverses and window
// edges to the base-class numerics; used to pin the generic fallbacks
// against the closed forms.
class GenericView final : public GrowthModel {
public:
    explicit GenericView(const RescaledParameters& p) : inner_(p) {}
    double mu_ch(double s, double h) const override { return inner_.mu_ch(s, h); }
    double mu_ph(double s, double h) const override { return inner_.mu_ph(s, h); }
    double mu_h2(double h) const override { return inner_.mu_h2(h); }
    double mu_ch_sat(double h) const override { return inner_.mu_ch_sat(h); }
    double mu_ph_sat(double h) const override { return inner_.mu_ph_sat(h); }
    double mu_h2_sat() const override { return inner_.mu_h2_sat(); }
    double mu_ch_sup() const override { return inner_.mu_ch_sup(); }

private:
    MonodGrowth inner_;
};

// Hydrogen helps instead of inhibiting the phenol tier: breaks the
// strict-decrease assumption and nothing else structural.
class FlippedInhibition final : public GrowthModel {
public:
    explicit FlippedInhibition(const RescaledParameters& p) : p_(p) {}
    double mu_ch(double s, double h) const override {
        return p_.m0 * s / (p_.K0 + s) * h / (p_.L0 + h);
    }
    double mu_ph(double s, double h) const override {
        return p_.m1 * s / (p_.K1 + s) * h / (p_.Ki + h);
    }
    double mu_h2(double h) const override { return p_.m2 * h / (p_.K2 + h); }
    double mu_ch_sat(double h) const override { return p_.m0 * h / (p_.L0 + h); }
    double mu_ph_sat(double h) const override { return p_.m1 * h / (p_.Ki + h); }
    double mu_h2_sat() const override { return p_.m2; }
    double mu_ch_sup() const override { return p_.m0; }

private:
    RescaledParameters p_;
};

// Methanogen grows at a fixed rate whatever the hydrogen level.
class ConstantHydrogenRate final : public GrowthModel {
public:
    explicit ConstantHydrogenRate(const RescaledParameters& p) : p_(p) {}
    double mu_ch(double s, double h) const override {
        return p_.m0 * s / (p_.K0 + s) * h / (p_.L0 + h);
    }
    double mu_ph(double s, double h) const override {
        return p_.m1 * s / (p_.K1 + s) / (1.0 + h / p_.Ki);
    }
    double mu_h2(double) const override { return p_.m2; }
    double mu_ch_sat(double h) const override { return p_.m0 * h / (p_.L0 + h); }
    double mu_ph_sat(double h) const override { return p_.m1 / (1.0 + h / p_.Ki); }
    double mu_h2_sat() const override { return p_.m2; }
    double mu_ch_sup() const override { return p_.m0; }

private:
    RescaledParameters p_;
};

} // namespace

TEST_CASE("rescaled parameters of the nominal set") {
    FullParameters full = preset_case('a');
    RescaledParameters p = rescale(full);

    CHECK(p.m0 == doctest::Approx(0.551).epsilon(1e-12));
    CHECK(p.m1 == doctest::Approx(1.04).epsilon(1e-12));
    CHECK(p.m2 == doctest::Approx(2.1).epsilon(1e-12));
    CHECK(p.L0 == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(p.Ki == doctest::Approx(3.5e-6).epsilon(1e-12));
    CHECK(p.K2 == doctest::Approx(2.5e-5).epsilon(1e-12));
    CHECK(p.a0 == doctest::Approx(0.02));
    CHECK(p.a1 == doctest::Approx(0.02));
    CHECK(p.a2 == doctest::Approx(0.02));

    // stoichiometric chain: y3 = (224/208)(1-Y_ch), y4 = (32/224)(1-Y_ph)
    double y3 = (224.0 / 208.0) * (1.0 - full.Y_ch);
    double y4 = (32.0 / 224.0) * (1.0 - full.Y_ph);
    CHECK(stoich_y3(full) == doctest::Approx(y3).epsilon(1e-14));
    CHECK(stoich_y4(full) == doctest::Approx(y4).epsilon(1e-14));
    CHECK(stoich_y5() == doctest::Approx(16.0 / 208.0).epsilon(1e-14));
    CHECK(p.y3y4 == doctest::Approx(y3 * y4).epsilon(1e-14));
    CHECK(p.y3y4 == doctest::Approx(0.14488615).epsilon(1e-6));
    CHECK(p.K0 == doctest::Approx(p.y3y4 * full.Ks_ch).epsilon(1e-14));
    CHECK(p.K1 == doctest::Approx(y4 * full.Ks_ph).epsilon(1e-14));

    // recycle fraction collapses to 1/(2 (1-Y_ch)(1-Y_ph))
    CHECK(p.omega ==
          doctest::Approx(1.0 / (2.0 * (1.0 - full.Y_ch) * (1.0 - full.Y_ph))).epsilon(1e-14));
    CHECK(p.omega == doctest::Approx(0.530920).epsilon(1e-5));
    CHECK(p.omega < 1.0);

    SUBCASE("half yields push the recycle fraction to 2") {
        FullParameters heavy = full;
        heavy.Y_ch = 0.5;
        heavy.Y_ph = 0.5;
        CHECK(rescale(heavy).omega == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("inflow rescaling round trip") {
        double S = 1.7;
        CHECK(unrescale_inflow(rescale_inflow(S, p), p) == doctest::Approx(S).epsilon(1e-14));
    }
}

TEST_CASE("case presets override the right knobs") {
    FullParameters a = preset_case('a');
    FullParameters b = preset_case('b');
    FullParameters c = preset_case('c');
    FullParameters d = preset_case("d");

    CHECK(a.Ks_h2_c == doctest::Approx(1e-6));
    CHECK(b.Ks_h2_c == doctest::Approx(4e-6));
    CHECK(c.Ks_h2_c == doctest::Approx(7e-6));
    CHECK(d.Ks_h2_c == doctest::Approx(1.2e-5));
    CHECK(d.Ks_h2 == doctest::Approx(0.5e-5));
    CHECK(d.km_h2 == doctest::Approx(5.0));
    CHECK(d.km_ch == doctest::Approx(a.km_ch));
    CHECK_THROWS_AS(preset_case('e'), invalid_parameter_error);

    FullParameters a0 = a.with_maintenance(false);
    CHECK(a0.kdec_ch == 0.0);
    CHECK(a0.kdec_ph == 0.0);
    CHECK(a0.kdec_h2 == 0.0);
    CHECK(a.kdec_ch == doctest::Approx(0.02));
}

TEST_CASE("parameter validation refuses out-of-range values") {
    FullParameters p = preset_case('a');
    p.Y_ch = 1.0;  // yields must sit strictly inside (0,1)
    CHECK_THROWS_AS(rescale(p), invalid_parameter_error);
    p = preset_case('a');
    p.km_ph = 0.0;
    CHECK_THROWS_AS(rescale(p), invalid_parameter_error);
    p = preset_case('a');
    p.kdec_h2 = -0.1;
    CHECK_THROWS_AS(rescale(p), invalid_parameter_error);
}

TEST_CASE("JSON parameter documents") {
    FullParameters a = preset_case('a');
    FullParameters round = params_from_json(params_to_json(a));
    CHECK(round.km_ch == doctest::Approx(a.km_ch).epsilon(1e-15));
    CHECK(round.Ks_h2_c == doctest::Approx(a.Ks_h2_c).epsilon(1e-15));
    CHECK(round.kdec_ph == doctest::Approx(a.kdec_ph).epsilon(1e-15));

    // partial documents override the nominal set
    FullParameters tweaked = params_from_json(R"({"Ks_h2_c": 4e-6})");
    CHECK(tweaked.Ks_h2_c == doctest::Approx(4e-6));
    CHECK(tweaked.km_ch == doctest::Approx(a.km_ch));

    // "kdec" fans out to the three tiers, per-tier keys override it
    FullParameters decays = params_from_json(R"({"kdec": 0.05, "kdec_h2": 0.01})");
    CHECK(decays.kdec_ch == doctest::Approx(0.05));
    CHECK(decays.kdec_ph == doctest::Approx(0.05));
    CHECK(decays.kdec_h2 == doctest::Approx(0.01));

    CHECK_THROWS_AS(params_from_json("not json"), parse_error);
    CHECK_THROWS_AS(params_from_json(R"({"no_such_key": 1})"), parse_error);
    CHECK_THROWS_AS(params_from_json(R"({"km_ch": "fast"})"), parse_error);
    // parsing is permissive about values; range checks fire when rescaling
    CHECK_THROWS_AS(rescale(params_from_json(R"({"Y_ch": 1.5})")), invalid_parameter_error);
}

TEST_CASE("Monod rates: values, limits and refusal of negative input") {
    MonodFoodWeb mw(preset_case('a'));
    const MonodGrowth& g = *mw.growth;
    const RescaledParameters& p = mw.p;

    CHECK(g.mu_ch(0.0, 1e-6) == 0.0);
    CHECK(g.mu_ph(0.0, 1e-6) == 0.0);
    CHECK(g.mu_h2(0.0) == 0.0);
    CHECK(g.mu_ch(1.0, 0.0) == 0.0);  // no hydrogen, no dechlorination

    // spot value against the factored form
    double s = 0.3;
    double h = 2e-6;
    CHECK(g.mu_ch(s, h) ==
          doctest::Approx(p.m0 * s / (p.K0 + s) * h / (p.L0 + h)).epsilon(1e-14));
    CHECK(g.mu_ph(s, h) ==
          doctest::Approx(p.m1 * s / (p.K1 + s) / (1.0 + h / p.Ki)).epsilon(1e-14));
    CHECK(g.mu_h2(h) == doctest::Approx(p.m2 * h / (p.K2 + h)).epsilon(1e-14));

    CHECK(g.mu_ch_sat(h) == doctest::Approx(p.m0 * h / (p.L0 + h)).epsilon(1e-14));
    CHECK(g.mu_ph_sat(h) == doctest::Approx(p.m1 / (1.0 + h / p.Ki)).epsilon(1e-14));
    CHECK(g.mu_h2_sat() == doctest::Approx(p.m2).epsilon(1e-14));
    CHECK(g.mu_ch_sup() == doctest::Approx(p.m0).epsilon(1e-14));

    CHECK_THROWS_AS(g.mu_ch(-1e-9, 1e-6), domain_error);
    CHECK_THROWS_AS(g.mu_ph(0.1, -1e-9), domain_error);
    CHECK_THROWS_AS(g.mu_h2(-1.0), domain_error);
}

TEST_CASE("rate inverses round-trip to 1e-10 and refuse unreachable rates") {
    MonodFoodWeb mw(preset_case('a'));
    const MonodGrowth& g = *mw.growth;
    const RescaledParameters& p = mw.p;

    // methanogen break-even at the nominal decay-adjusted dilution
    CHECK(g.invert_mu_h2(0.02) == doctest::Approx(2.5e-5 * 0.02 / (2.1 - 0.02)).epsilon(1e-12));
    CHECK(g.invert_mu_h2(0.02) == doctest::Approx(2.404e-7).epsilon(1e-3));

    const double h_levels[] = {1e-7, 1e-6, 3.5e-6, 2.5e-5, 1e-4, 1e-2};
    for (double h : h_levels) {
        for (double f : {1e-6, 0.01, 0.5, 0.99, 0.999999}) {
            double y0 = f * g.mu_ch_sat(h);
            if (y0 > 0.0) {
                CHECK(std::abs(g.mu_ch(g.invert_mu_ch(y0, h), h) - y0) <=
                      1e-10 * std::max(1.0, y0));
            }
            double y1 = f * g.mu_ph_sat(h);
            if (y1 > 0.0) {
                CHECK(std::abs(g.mu_ph(g.invert_mu_ph(y1, h), h) - y1) <=
                      1e-10 * std::max(1.0, y1));
            }
        }
    }
    for (double f : {1e-6, 0.01, 0.5, 0.99, 0.999999}) {
        double y2 = f * p.m2;
        CHECK(std::abs(g.mu_h2(g.invert_mu_h2(y2)) - y2) <= 1e-10 * std::max(1.0, y2));
    }

    CHECK_THROWS_AS(g.invert_mu_h2(p.m2), no_solution_error);
    CHECK_THROWS_AS(g.invert_mu_h2(p.m2 * 1.01), no_solution_error);
    CHECK_THROWS_AS(g.invert_mu_ch(g.mu_ch_sat(1e-6), 1e-6), no_solution_error);
    CHECK_THROWS_AS(g.invert_mu_ph(g.mu_ph_sat(1e-5) * 1.0001, 1e-5), no_solution_error);
    CHECK_THROWS_AS(g.invert_mu_ch(0.1, -1.0), domain_error);

    SUBCASE("window edges solve the saturated-rate equations") {
        double r = 0.2;
        double lo = g.h2_where_ch_sat_equals(r);
        CHECK(g.mu_ch_sat(lo) == doctest::Approx(r).epsilon(1e-10));
        double hi = g.h2_where_ph_sat_equals(r);
        CHECK(g.mu_ph_sat(hi) == doctest::Approx(r).epsilon(1e-10));
        CHECK_THROWS_AS(g.h2_where_ch_sat_equals(p.m0), no_solution_error);
    }
}

TEST_CASE("generic numeric fallbacks agree with the closed forms") {
    RescaledParameters p = rescale(preset_case('a'));
    MonodGrowth closed(p);
    GenericView generic(p);

    const double h_levels[] = {1e-7, 1e-6, 3.5e-6, 2.5e-5, 1e-3};
    const double s_levels[] = {1e-4, 0.01, 0.3, 2.0};

    for (double h : h_levels) {
        for (double s : s_levels) {
            CHECK(generic.dmu_ch_ds_ch(s, h) ==
                  doctest::Approx(closed.dmu_ch_ds_ch(s, h)).epsilon(1e-3));
            CHECK(generic.dmu_ch_ds_h2(s, h) ==
                  doctest::Approx(closed.dmu_ch_ds_h2(s, h)).epsilon(1e-3));
            CHECK(generic.dmu_ph_ds_ph(s, h) ==
                  doctest::Approx(closed.dmu_ph_ds_ph(s, h)).epsilon(1e-3));
            CHECK(generic.dmu_ph_ds_h2(s, h) ==
                  doctest::Approx(closed.dmu_ph_ds_h2(s, h)).epsilon(1e-3));
        }
        CHECK(generic.dmu_h2_ds_h2(h) == doctest::Approx(closed.dmu_h2_ds_h2(h)).epsilon(1e-3));

        // inverses: bisection against algebra, relative 1e-9
        for (double f : {0.01, 0.5, 0.99}) {
            double y0 = f * closed.mu_ch_sat(h);
            CHECK(generic.invert_mu_ch(y0, h) ==
                  doctest::Approx(closed.invert_mu_ch(y0, h)).epsilon(1e-9));
            double y1 = f * closed.mu_ph_sat(h);
            CHECK(generic.invert_mu_ph(y1, h) ==
                  doctest::Approx(closed.invert_mu_ph(y1, h)).epsilon(1e-9));
            double y2 = f * closed.mu_h2_sat();
            CHECK(generic.invert_mu_h2(y2) ==
                  doctest::Approx(closed.invert_mu_h2(y2)).epsilon(1e-9));
        }
    }

    // window edges through the generic bracket search
    for (double r : {0.05, 0.2, 0.5}) {
        CHECK(generic.h2_where_ch_sat_equals(r) ==
              doctest::Approx(closed.h2_where_ch_sat_equals(r)).epsilon(1e-9));
        CHECK(generic.h2_where_ph_sat_equals(r) ==
              doctest::Approx(closed.h2_where_ph_sat_equals(r)).epsilon(1e-9));
    }
    CHECK_FALSE(generic.has_window_closure_closed_form());
    CHECK(closed.has_window_closure_closed_form());
}

TEST_CASE("growth assumption checker") {
    SUBCASE("all four presets pass every assumption") {
        for (char tag : {'a', 'b', 'c', 'd'}) {
            MonodFoodWeb mw(preset_case(tag));
            GrowthAssumptionReport rep = check_growth_assumptions(mw.web);
            REQUIRE(rep.assumptions.size() == 8);
            for (const GrowthAssumption& a : rep.assumptions) {
                INFO("case ", tag, ": ", a.name, " -- ", a.note);
                CHECK(a.passed);
            }
            CHECK(rep.all_passed());
        }
    }

    SUBCASE("flipped hydrogen inhibition fails the strict-decrease entry") {
        RescaledParameters p = rescale(preset_case('a'));
        FlippedInhibition bad(p);
        FoodWeb web{&bad, p.omega, p.a0, p.a1, p.a2};
        GrowthAssumptionReport rep = check_growth_assumptions(web);
        REQUIRE(rep.assumptions.size() == 8);
        CHECK_FALSE(rep.assumptions[4].passed);
        CHECK_FALSE(rep.all_passed());
    }

    SUBCASE("constant methanogen rate fails the strict-increase entry") {
        RescaledParameters p = rescale(preset_case('a'));
        ConstantHydrogenRate bad(p);
        FoodWeb web{&bad, p.omega, p.a0, p.a1, p.a2};
        GrowthAssumptionReport rep = check_growth_assumptions(web);
        REQUIRE(rep.assumptions.size() == 8);
        CHECK_FALSE(rep.assumptions[5].passed);
        CHECK_FALSE(rep.all_passed());
    }
}
