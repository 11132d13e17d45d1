#include "diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "errors.hpp"

namespace chemoweb {

namespace {

// Matches the coalescence band of the equilibrium finder: inside it the
// hydrogen-free pair is a fold point, not an open-region interior.
constexpr double kNearBand = 1e-10;

bool is_stable(Verdict v) { return v == Verdict::stable; }

StabilityVerdict judge(const SteadyState& ss, const FoodWeb& web, bool numeric_stability) {
    return numeric_stability ? stability_numeric(ss, web) : stability_analytic(ss, web);
}

int state_index(SteadyStateKind k) {
    switch (k) {
        case SteadyStateKind::ss1: return idx_ss1;
        case SteadyStateKind::ss2_flat: return idx_ss2_flat;
        case SteadyStateKind::ss2_sharp: return idx_ss2_sharp;
        case SteadyStateKind::ss3: return idx_ss3;
    }
    return idx_ss1;
}

// Stability margin whose zero defines the third boundary curve: positive on
// the stable side.  Throws domain_error when coexistence is absent.
double stability_margin(double dilution, double s0_in, const FoodWeb& web,
                        bool numeric_stability) {
    if (!numeric_stability) return ss3_hurwitz_margin(dilution, s0_in, web);
    std::optional<SteadyState> ss3 = find_ss3(dilution, s0_in, web);
    if (!ss3) throw domain_error("no coexistence state at this operating point");
    JacobianBundle jb = jacobian(ss3->state, dilution, web);
    return -eigenvalues(jb.full).front().real();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

const char* region_label(Region r) {
    switch (r) {
        case Region::j1: return "J1";
        case Region::j2: return "J2";
        case Region::j3: return "J3";
        case Region::j4: return "J4";
        case Region::j5: return "J5";
    }
    return "J1";
}

RegionLabel classify_point(double dilution, double S_ch_in, const FoodWeb& web, double y3y4,
                           bool numeric_stability) {
    if (!(dilution > 0.0)) throw invalid_parameter_error("dilution must be positive");
    if (!(S_ch_in > 0.0)) throw invalid_parameter_error("inflow must be positive");
    if (!(y3y4 > 0.0)) throw invalid_parameter_error("stoichiometric factor must be positive");

    const double s0_in = y3y4 * S_ch_in;
    RegionLabel out;

    for (const SteadyState& ss : find_all_steady_states(dilution, s0_in, web)) {
        StateStability& slot = out.states[static_cast<std::size_t>(state_index(ss.kind))];
        slot.exists = true;
        StabilityVerdict v = judge(ss, web, numeric_stability);
        slot.verdict = v.verdict;
        slot.max_real_part = v.max_real_part;
        if (v.verdict == Verdict::marginal) out.near_boundary = true;
    }

    const StateStability& flat = out.states[idx_ss2_flat];
    const StateStability& sharp = out.states[idx_ss2_sharp];
    const StateStability& coex = out.states[idx_ss3];

    // A lone branch means the pair coalesced on the existence threshold.
    if (flat.exists != sharp.exists) out.near_boundary = true;

    // Threshold proximity (fold curves are measure-zero; flag their band).
    if (web.omega < 1.0) {
        const double band = kNearBand * std::max(1.0, s0_in);
        if (h2_window(dilution, web)) {
            if (std::abs(s0_in - ss2_threshold(dilution, web)) <= band) out.near_boundary = true;
            try {
                if (std::abs(s0_in - ss3_threshold(dilution, web)) <= band) {
                    out.near_boundary = true;
                }
            } catch (const domain_error&) {
                // dilution outside the coexistence range: nothing to flag
            }
        }
    }

    if (coex.exists) {
        out.region = is_stable(coex.verdict) ? Region::j3 : Region::j5;
    } else if (sharp.exists) {
        out.region = is_stable(sharp.verdict) ? Region::j2 : Region::j4;
    } else if (flat.exists) {
        out.region = is_stable(flat.verdict) ? Region::j2 : Region::j4;
    } else {
        out.region = Region::j1;
    }
    return out;
}

double gamma1(double dilution, const FoodWeb& web, double y3y4) {
    if (!(y3y4 > 0.0)) throw invalid_parameter_error("stoichiometric factor must be positive");
    return ss2_threshold(dilution, web) / y3y4;
}

double gamma2(double dilution, const FoodWeb& web, double y3y4) {
    if (!(y3y4 > 0.0)) throw invalid_parameter_error("stoichiometric factor must be positive");
    return ss3_threshold(dilution, web) / y3y4;
}

double gamma3_locus(double dilution, const FoodWeb& web, double y3y4, bool numeric_stability) {
    if (!numeric_stability && (web.a_ch != 0.0 || web.a_ph != 0.0 || web.a_h2 != 0.0)) {
        throw wrong_method_error(
            "the analytic stability boundary holds for decay-free webs only; "
            "use the numeric method");
    }
    const double s_lo = gamma2(dilution, web, y3y4) * (1.0 + 1e-9);
    if (!numeric_stability && ss3_threshold_slope(dilution, web) >= 0.0) {
        throw no_solution_error("coexistence is stable at every inflow at this dilution");
    }

    // Geometric sweep of the stability margin above the existence curve; the
    // outermost sign change is the boundary against the unbounded region.
    const double s_hi = std::max(50.0, 100.0 * s_lo);
    const int n = 400;
    const double ratio = std::pow(s_hi / s_lo, 1.0 / static_cast<double>(n - 1));

    double best = std::numeric_limits<double>::quiet_NaN();
    double prev_s = 0.0;
    double prev_m = std::numeric_limits<double>::quiet_NaN();
    double s = s_lo;
    for (int i = 0; i < n; ++i, s *= ratio) {
        double m;
        try {
            m = stability_margin(dilution, y3y4 * s, web, numeric_stability);
        } catch (const std::exception&) {
            prev_m = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        if (std::isfinite(prev_m) && (prev_m < 0.0) != (m < 0.0)) {
            double lo = prev_s;
            double hi = s;
            double mlo = prev_m;
            for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                double mm = stability_margin(dilution, y3y4 * mid, web, numeric_stability);
                if ((mm < 0.0) == (mlo < 0.0)) {
                    lo = mid;
                    mlo = mm;
                } else {
                    hi = mid;
                }
            }
            best = 0.5 * (lo + hi);
        }
        prev_s = s;
        prev_m = m;
    }
    if (!std::isfinite(best)) {
        throw no_solution_error("no stability boundary along the inflow axis at this dilution");
    }
    return best;
}

DiagramGrid scan_diagram(const GridSpec& spec, const FoodWeb& web, double y3y4,
                         bool numeric_stability) {
    if (spec.n_d < 2 || spec.n_s < 2) throw invalid_parameter_error("grid needs >= 2x2 cells");
    if (!(spec.d_min > 0.0) || !(spec.s_min > 0.0) || !(spec.s_max > spec.s_min)) {
        throw invalid_parameter_error("grid ranges must be positive and increasing");
    }

    double d_max = spec.d_max;
    if (!(d_max > 0.0)) {
        double d1 = window_closure_dilution(web);
        if (!std::isfinite(d1)) {
            throw invalid_parameter_error(
                "cannot choose a dilution range automatically: the hydrogen window never opens");
        }
        d_max = 1.2 * d1;
    }
    if (!(d_max > spec.d_min)) throw invalid_parameter_error("dilution range is empty");

    DiagramGrid grid;
    grid.spec = spec;
    grid.spec.d_max = d_max;
    grid.numeric_stability = numeric_stability;

    grid.d_axis.resize(static_cast<std::size_t>(spec.n_d));
    for (int i = 0; i < spec.n_d; ++i) {
        grid.d_axis[static_cast<std::size_t>(i)] =
            spec.d_min + (d_max - spec.d_min) * static_cast<double>(i) /
                             static_cast<double>(spec.n_d - 1);
    }
    grid.s_axis.resize(static_cast<std::size_t>(spec.n_s));
    for (int j = 0; j < spec.n_s; ++j) {
        double f = static_cast<double>(j) / static_cast<double>(spec.n_s - 1);
        grid.s_axis[static_cast<std::size_t>(j)] =
            spec.log_s ? spec.s_min * std::pow(spec.s_max / spec.s_min, f)
                       : spec.s_min + (spec.s_max - spec.s_min) * f;
    }

    grid.cells.resize(static_cast<std::size_t>(spec.n_d) * static_cast<std::size_t>(spec.n_s));
    for (int i = 0; i < spec.n_d; ++i) {
        for (int j = 0; j < spec.n_s; ++j) {
            grid.cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.n_s) +
                       static_cast<std::size_t>(j)] =
                classify_point(grid.d_axis[static_cast<std::size_t>(i)],
                               grid.s_axis[static_cast<std::size_t>(j)], web, y3y4,
                               numeric_stability);
        }
    }
    return grid;
}

void write_diagram_csv(std::ostream& os, const DiagramGrid& grid) {
    os << "D,S_ch_in,label,existing,stab_SS1,stab_SS2b,stab_SS2s,stab_SS3,"
          "maxre_SS1,maxre_SS2b,maxre_SS2s,maxre_SS3,near_boundary\n";
    static const char* kNames[4] = {"SS1", "SS2b", "SS2s", "SS3"};
    for (std::size_t i = 0; i < grid.d_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.s_axis.size(); ++j) {
            const RegionLabel& cell = grid.cells[i * grid.s_axis.size() + j];
            os << format_double(grid.d_axis[i]) << ',' << format_double(grid.s_axis[j]) << ','
               << region_label(cell.region) << ',';
            bool first = true;
            for (int k = 0; k < 4; ++k) {
                if (!cell.states[static_cast<std::size_t>(k)].exists) continue;
                if (!first) os << '+';
                os << kNames[k];
                first = false;
            }
            for (int k = 0; k < 4; ++k) {
                const StateStability& st = cell.states[static_cast<std::size_t>(k)];
                os << ',' << (st.exists ? verdict_label(st.verdict) : "-");
            }
            for (int k = 0; k < 4; ++k) {
                const StateStability& st = cell.states[static_cast<std::size_t>(k)];
                os << ',';
                if (st.exists && std::isfinite(st.max_real_part)) {
                    os << format_double(st.max_real_part);
                }
            }
            os << ',' << (cell.near_boundary ? 1 : 0) << '\n';
        }
    }
}

std::vector<Region> region_inventory(const DiagramGrid& grid) {
    std::set<int> seen;
    for (const RegionLabel& cell : grid.cells) seen.insert(static_cast<int>(cell.region));
    std::vector<Region> out;
    for (int r : seen) out.push_back(static_cast<Region>(r));
    return out;
}

void write_diagram_summary_json(std::ostream& os, const DiagramGrid& grid, const FoodWeb& web,
                                double y3y4, const std::string& case_tag) {
    nlohmann::json j;
    j["case"] = case_tag;
    j["maintenance"] = web.a_ch > 0.0 || web.a_ph > 0.0 || web.a_h2 > 0.0;
    j["numeric_stability"] = grid.numeric_stability;

    CriticalDilutions cd = critical_dilutions(web);
    Regime regime = classify_regime(web);
    nlohmann::json jc;
    jc["D1"] = cd.d1;
    switch (cd.i2_kind) {
        case I2Kind::from_zero: jc["I2_kind"] = "from_zero"; break;
        case I2Kind::empty: jc["I2_kind"] = "empty"; break;
        case I2Kind::interior: jc["I2_kind"] = "interior"; break;
    }
    jc["D2_min"] = cd.d2_min;
    jc["D2_max"] = cd.d2_max;
    jc["D3"] = cd.d3;
    jc["I3_equals_I2"] = cd.i3_equals_i2;
    jc["I3_empty"] = cd.i3_empty;
    switch (regime.tag) {
        case RegimeTag::a_or_b: jc["regime"] = "a_or_b"; break;
        case RegimeTag::c: jc["regime"] = "c"; break;
        case RegimeTag::d: jc["regime"] = "d"; break;
    }
    j["criticals"] = jc;

    nlohmann::json jg;
    jg["n_d"] = grid.spec.n_d;
    jg["n_s"] = grid.spec.n_s;
    jg["d_min"] = grid.spec.d_min;
    jg["d_max"] = grid.spec.d_max;
    jg["s_min"] = grid.spec.s_min;
    jg["s_max"] = grid.spec.s_max;
    jg["log_s"] = grid.spec.log_s;
    j["grid"] = jg;

    nlohmann::json labels = nlohmann::json::array();
    for (Region r : region_inventory(grid)) labels.push_back(region_label(r));
    j["labels_present"] = labels;

    auto sample_curve = [&](auto&& f) {
        nlohmann::json arr = nlohmann::json::array();
        for (double d : grid.d_axis) {
            try {
                arr.push_back({d, f(d)});
            } catch (const std::exception&) {
                // outside the curve's dilution range
            }
        }
        return arr;
    };
    j["gamma1"] = sample_curve([&](double d) { return gamma1(d, web, y3y4); });
    j["gamma2"] = sample_curve([&](double d) { return gamma2(d, web, y3y4); });
    j["gamma3"] =
        sample_curve([&](double d) { return gamma3_locus(d, web, y3y4, grid.numeric_stability); });

    os << j.dump(2) << '\n';
}

} // namespace chemoweb
