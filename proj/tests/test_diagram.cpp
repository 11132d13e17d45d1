#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "diagram.hpp"
#include "equilibria.hpp"
#include "errors.hpp"
#include "params.hpp"

using namespace chemoweb;

TEST_CASE("single-point classification across the regions") {
    MonodFoodWeb maint(preset_case('a'));
    MonodFoodWeb free0(preset_case('a').with_maintenance(false));
    double y34 = maint.p.y3y4;

    SUBCASE("beyond the window closure only washout remains") {
        for (bool numeric : {true, false}) {
            const MonodFoodWeb& mw = numeric ? maint : free0;
            RegionLabel lab = classify_point(0.5, 1.0, mw.web, mw.p.y3y4, numeric);
            CHECK(lab.region == Region::j1);
            CHECK(lab.states[idx_ss1].exists);
            CHECK(lab.states[idx_ss1].verdict == Verdict::stable);
            CHECK_FALSE(lab.states[idx_ss2_flat].exists);
            CHECK_FALSE(lab.states[idx_ss2_sharp].exists);
            CHECK_FALSE(lab.states[idx_ss3].exists);
        }
    }

    SUBCASE("bistable strip: the pair exists, the sharp branch holds") {
        double d = 0.2;  // above the slope flip, below the pinning range end
        double S = 0.5 * (gamma1(d, maint.web, y34) + gamma2(d, maint.web, y34));
        RegionLabel lab = classify_point(d, S, maint.web, y34, true);
        CHECK(lab.region == Region::j2);
        CHECK(lab.states[idx_ss2_flat].exists);
        CHECK(lab.states[idx_ss2_flat].verdict == Verdict::unstable);
        CHECK(lab.states[idx_ss2_sharp].verdict == Verdict::stable);
        CHECK_FALSE(lab.states[idx_ss3].exists);
    }

    SUBCASE("low dilution, inflow between the thresholds: no attractor but washout") {
        double d = 0.01;  // below the slope flip: the sharp branch is invadable
        double S = 0.5 * (gamma1(d, maint.web, y34) + gamma2(d, maint.web, y34));
        RegionLabel lab = classify_point(d, S, maint.web, y34, true);
        CHECK(lab.region == Region::j4);
        CHECK(lab.states[idx_ss2_sharp].exists);
        CHECK(lab.states[idx_ss2_sharp].verdict == Verdict::unstable);
        CHECK_FALSE(lab.states[idx_ss3].exists);
    }

    SUBCASE("stable and unstable coexistence at low dilution") {
        RegionLabel stable = classify_point(0.01, 0.16, maint.web, y34, true);
        CHECK(stable.region == Region::j3);
        CHECK(stable.states[idx_ss3].exists);
        CHECK(stable.states[idx_ss3].verdict == Verdict::stable);
        CHECK(stable.states[idx_ss3].max_real_part < 0.0);

        RegionLabel unstable = classify_point(0.01, 0.097, maint.web, y34, true);
        CHECK(unstable.region == Region::j5);
        CHECK(unstable.states[idx_ss3].exists);
        CHECK(unstable.states[idx_ss3].verdict == Verdict::unstable);
        CHECK(unstable.states[idx_ss3].max_real_part > 0.0);
        // every state is present in the oscillatory region, none attracts
        for (int i = 0; i < 4; ++i) CHECK(unstable.states[i].exists);
        CHECK(unstable.states[idx_ss2_flat].verdict == Verdict::unstable);
        CHECK(unstable.states[idx_ss2_sharp].verdict == Verdict::unstable);
    }

    SUBCASE("analytic route refuses maintenance, matches numeric without it") {
        CHECK_THROWS_AS(classify_point(0.1, 0.2, maint.web, y34, false), wrong_method_error);
        RegionLabel a = classify_point(0.1, 0.2, free0.web, free0.p.y3y4, false);
        RegionLabel n = classify_point(0.1, 0.2, free0.web, free0.p.y3y4, true);
        CHECK(a.region == n.region);
    }

    SUBCASE("points on a threshold are flagged near-boundary") {
        double d = 0.05;
        double S1 = gamma1(d, maint.web, y34);
        CHECK(classify_point(d, S1 * (1.0 + 1e-12), maint.web, y34, true).near_boundary);
        CHECK_FALSE(classify_point(d, S1 * 1.5, maint.web, y34, true).near_boundary);
        double S2 = gamma2(d, maint.web, y34);
        CHECK(classify_point(d, S2 * (1.0 + 1e-12), maint.web, y34, true).near_boundary);
    }
}

TEST_CASE("boundary curves") {
    MonodFoodWeb maint(preset_case('a'));
    MonodFoodWeb free0(preset_case('a').with_maintenance(false));
    double y34 = maint.p.y3y4;
    CriticalDilutions crit = critical_dilutions(maint.web);

    SUBCASE("pair and coexistence thresholds, rescaled to laboratory units") {
        for (double d : {0.01, 0.1, 0.2, 0.3}) {
            CHECK(gamma1(d, maint.web, y34) ==
                  doctest::Approx(ss2_threshold(d, maint.web) / y34).epsilon(1e-12));
            CHECK(gamma2(d, maint.web, y34) ==
                  doctest::Approx(ss3_threshold(d, maint.web) / y34).epsilon(1e-12));
            CHECK(gamma2(d, maint.web, y34) >= gamma1(d, maint.web, y34));
        }
        CHECK_THROWS_AS(gamma1(crit.d1 * 1.01, maint.web, y34), domain_error);
        CHECK_THROWS_AS(gamma2(crit.d2_max * 1.01, maint.web, y34), domain_error);
    }

    SUBCASE("the curves touch where the pinned level crosses the threshold minimum") {
        double gap = gamma2(crit.d3, maint.web, y34) - gamma1(crit.d3, maint.web, y34);
        CHECK(gap >= -1e-12);  // exact tangency up to rounding
        CHECK(gap < 1e-4);
        // strictly apart away from the tangency
        CHECK(gamma2(0.5 * crit.d3, maint.web, y34) >
              gamma1(0.5 * crit.d3, maint.web, y34) + 1e-3);
    }

    SUBCASE("stability boundary: numeric everywhere, analytic when decay-free") {
        double g3 = gamma3_locus(0.01, maint.web, y34, true);
        CHECK(g3 == doctest::Approx(0.103251).epsilon(1e-4));
        CHECK(g3 > gamma2(0.01, maint.web, y34));

        double a3 = gamma3_locus(0.01, free0.web, free0.p.y3y4, false);
        double n3 = gamma3_locus(0.01, free0.web, free0.p.y3y4, true);
        CHECK(a3 == doctest::Approx(0.0313029).epsilon(1e-4));
        CHECK(n3 == doctest::Approx(a3).epsilon(1e-5));

        // above the slope flip coexistence never destabilizes along the inflow
        CriticalDilutions cf = critical_dilutions(free0.web);
        CHECK_THROWS_AS(gamma3_locus(cf.d3 * 1.3, free0.web, free0.p.y3y4, false),
                        no_solution_error);
        CHECK_THROWS_AS(gamma3_locus(0.01, maint.web, y34, false), wrong_method_error);
    }
}

TEST_CASE("grid scan: geometry, thresholds and the region inventory") {
    MonodFoodWeb maint(preset_case('a'));
    double y34 = maint.p.y3y4;

    GridSpec gs;
    gs.n_d = 60;
    gs.n_s = 60;
    gs.s_min = 5e-3;
    gs.s_max = 5.0;
    DiagramGrid grid = scan_diagram(gs, maint.web, y34, true);

    REQUIRE(grid.d_axis.size() == 60);
    REQUIRE(grid.s_axis.size() == 60);
    REQUIRE(grid.cells.size() == 3600);
    CHECK(std::is_sorted(grid.d_axis.begin(), grid.d_axis.end()));
    CHECK(std::is_sorted(grid.s_axis.begin(), grid.s_axis.end()));
    CHECK(grid.d_axis.front() == doctest::Approx(1e-3));
    // auto range: 1.2x the window closure
    CHECK(grid.d_axis.back() ==
          doctest::Approx(1.2 * window_closure_dilution(maint.web)).epsilon(1e-9));
    // log-spaced inflow axis: constant ratio
    double ratio = grid.s_axis[1] / grid.s_axis[0];
    for (size_t i = 2; i < grid.s_axis.size(); ++i) {
        CHECK(grid.s_axis[i] / grid.s_axis[i - 1] == doctest::Approx(ratio).epsilon(1e-9));
    }

    SUBCASE("existence on the grid follows the threshold curves") {
        for (int i_d = 0; i_d < gs.n_d; i_d += 7) {
            double d = grid.d_axis[i_d];
            for (int i_s = 1; i_s + 1 < gs.n_s; ++i_s) {
                const RegionLabel& c = grid.cells[i_d * gs.n_s + i_s];
                // compare against the curves with one-grid-step slack
                double below = grid.s_axis[i_s - 1];
                double above = grid.s_axis[i_s + 1];
                bool pair_possible = true, pair_required = false;
                bool coex_possible = true, coex_required = false;
                try {
                    double g1 = gamma1(d, maint.web, y34);
                    pair_possible = above >= g1;
                    pair_required = below > g1;
                } catch (const domain_error&) {
                    pair_possible = false;
                }
                try {
                    double g2 = gamma2(d, maint.web, y34);
                    coex_possible = above >= g2;
                    coex_required = below > g2;
                } catch (const domain_error&) {
                    coex_possible = false;
                }
                INFO("d=", d, " S=", grid.s_axis[i_s]);
                if (pair_required) CHECK(c.states[idx_ss2_sharp].exists);
                if (!pair_possible) CHECK_FALSE(c.states[idx_ss2_sharp].exists);
                if (coex_required) CHECK(c.states[idx_ss3].exists);
                if (!coex_possible) CHECK_FALSE(c.states[idx_ss3].exists);
                CHECK(c.states[idx_ss1].exists);
            }
        }
    }

    SUBCASE("all five labels appear for the nominal maintenance web") {
        auto inv = region_inventory(grid);
        std::vector<Region> want = {Region::j1, Region::j2, Region::j3, Region::j4, Region::j5};
        CHECK(inv == want);
    }
}

TEST_CASE("region order along the inflow axis between the flip and the pinning end") {
    MonodFoodWeb free0(preset_case('a').with_maintenance(false));
    double y34 = free0.p.y3y4;
    CriticalDilutions c = critical_dilutions(free0.web);
    double d = 0.5 * (c.d3 + c.d2_max);

    std::vector<Region> seen;
    for (int i = 0; i <= 150; ++i) {
        double S = 0.005 * std::pow(5.0 / 0.005, i / 150.0);
        RegionLabel lab = classify_point(d, S, free0.web, y34, false);
        if (lab.near_boundary) continue;
        if (seen.empty() || seen.back() != lab.region) seen.push_back(lab.region);
    }
    // washout-only, then bistable strip, then stable coexistence; no other
    // label and no backtracking at this dilution
    std::vector<Region> want = {Region::j1, Region::j2, Region::j3};
    CHECK(seen == want);
}

TEST_CASE("third preset never leaves washout or the no-attractor strip") {
    MonodFoodWeb mw(preset_case('c'));
    GridSpec gs;
    gs.n_d = 50;
    gs.n_s = 50;
    DiagramGrid grid = scan_diagram(gs, mw.web, mw.p.y3y4, true);
    auto inv = region_inventory(grid);
    std::vector<Region> want = {Region::j1, Region::j4};
    CHECK(inv == want);
}

TEST_CASE("diagram CSV layout") {
    MonodFoodWeb mw(preset_case('a'));
    GridSpec gs;
    gs.n_d = 4;
    gs.n_s = 3;
    DiagramGrid grid = scan_diagram(gs, mw.web, mw.p.y3y4, true);

    std::ostringstream os;
    write_diagram_csv(os, grid);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "D,S_ch_in,label,existing,stab_SS1,stab_SS2b,stab_SS2s,stab_SS3,"
          "maxre_SS1,maxre_SS2b,maxre_SS2s,maxre_SS3,near_boundary");

    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CHECK(std::count(line.begin(), line.end(), ',') == 12);
        ++rows;
    }
    CHECK(rows == 12);

    // first row: smallest dilution and inflow, washout only
    std::istringstream again(os.str());
    std::getline(again, line);
    std::getline(again, line);
    CHECK(line.find("J1") != std::string::npos);
    CHECK(line.substr(0, line.find(',')) == "0.001");
}

TEST_CASE("diagram summary JSON is well-formed and complete") {
    MonodFoodWeb mw(preset_case('a'));
    GridSpec gs;
    gs.n_d = 30;
    gs.n_s = 30;
    DiagramGrid grid = scan_diagram(gs, mw.web, mw.p.y3y4, true);

    std::ostringstream os;
    write_diagram_summary_json(os, grid, mw.web, mw.p.y3y4, "a");
    nlohmann::json doc = nlohmann::json::parse(os.str());

    CHECK(doc.at("case") == "a");
    CHECK(doc.at("numeric_stability") == true);
    auto crit = doc.at("criticals");
    CHECK(crit.at("D1").get<double>() == doctest::Approx(0.43183).epsilon(1e-4));
    CHECK(crit.at("D3").get<double>() == doctest::Approx(0.0578654).epsilon(1e-4));
    CHECK(crit.at("I2_kind") == "from_zero");
    CHECK(doc.at("labels_present").is_array());
    CHECK(doc.at("grid").at("n_d") == 30);
    for (const char* key : {"gamma1", "gamma2", "gamma3"}) {
        REQUIRE(doc.contains(key));
        REQUIRE(doc.at(key).is_array());
        if (!doc.at(key).empty()) {
            CHECK(doc.at(key).front().size() == 2);  // [D, S] pairs
        }
    }
    CHECK(doc.at("gamma1").size() > 10);
}
