// chemoweb: steady states, stability, operating diagrams and simulations of
// the chlorophenol-phenol-hydrogen chemostat food web.  All computation goes
// through the C API in chemoweb.h; this file only parses flags and formats
// output.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemoweb.h"

using nlohmann::json;

namespace {

int exit_code(cw_status st) {
    switch (st) {
        case CW_OK: return 0;
        case CW_ERR_PARSE:
        case CW_ERR_INVALID: return 2;
        default: return 3;
    }
}

[[noreturn]] void die(cw_status st) {
    std::fprintf(stderr, "error: %s\n", cw_last_error());
    std::exit(exit_code(st));
}

[[noreturn]] void die_parse(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(2);
}

// Shared model-selection flags; the parameter document is assembled here so
// that --case plus overrides and --params behave identically.
struct ModelOpts {
    std::string case_tag = "a";
    std::string params_path;
    bool maintenance = true;
    double kdec = -1.0;
    double kdec_ch = -1.0;
    double kdec_ph = -1.0;
    double kdec_h2 = -1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--case", case_tag, "built-in parameter case: a, b, c or d")
            ->check(CLI::IsMember({"a", "b", "c", "d"}));
        cmd->add_option("--params", params_path, "JSON parameter file (replaces --case)");
        cmd->add_flag("--maintenance,!--no-maintenance", maintenance,
                      "keep the biomass decay terms (default: on)");
        cmd->add_option("--kdec", kdec, "override all three decay rates (1/d)");
        cmd->add_option("--kdec-ch", kdec_ch, "override the dechlorinator decay rate (1/d)");
        cmd->add_option("--kdec-ph", kdec_ph, "override the phenol degrader decay rate (1/d)");
        cmd->add_option("--kdec-h2", kdec_h2, "override the methanogen decay rate (1/d)");
    }

    std::string tag() const { return params_path.empty() ? "case_" + case_tag : "custom"; }

    cw_model* build() const {
        json doc;
        if (!params_path.empty()) {
            std::ifstream in(params_path);
            if (!in) die_parse("cannot read " + params_path);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                doc = json::parse(ss.str());
            } catch (const std::exception& e) {
                die_parse(std::string("parameter document is not valid JSON: ") + e.what());
            }
            if (!doc.is_object()) die_parse("parameter document must be a JSON object");
        } else {
            cw_model* base = nullptr;
            cw_status st = cw_model_create_case(case_tag[0], 1, &base);
            if (st != CW_OK) die(st);
            size_t needed = 0;
            cw_model_params_json(base, nullptr, 0, &needed);
            std::string text(needed, '\0');
            st = cw_model_params_json(base, text.data(), text.size(), &needed);
            cw_model_destroy(base);
            if (st != CW_OK) die(st);
            text.resize(needed - 1);
            doc = json::parse(text);
        }
        if (!maintenance) {
            doc.erase("kdec_ch");
            doc.erase("kdec_ph");
            doc.erase("kdec_h2");
            doc["kdec"] = 0.0;
        }
        if (kdec >= 0.0) {
            // the per-tier keys take precedence over "kdec", so drop them
            doc.erase("kdec_ch");
            doc.erase("kdec_ph");
            doc.erase("kdec_h2");
            doc["kdec"] = kdec;
        }
        if (kdec_ch >= 0.0) doc["kdec_ch"] = kdec_ch;
        if (kdec_ph >= 0.0) doc["kdec_ph"] = kdec_ph;
        if (kdec_h2 >= 0.0) doc["kdec_h2"] = kdec_h2;

        cw_model* model = nullptr;
        cw_status st = cw_model_create_json(doc.dump().c_str(), &model);
        if (st != CW_OK) die(st);
        return model;
    }
};

bool model_has_decay(const cw_model* m) {
    double r[13];
    if (cw_model_rescaled(m, r) != CW_OK) return true;
    return r[8] > 0.0 || r[9] > 0.0 || r[10] > 0.0;
}

// Stability verdicts: eigenvalues when decay is present (the closed-form
// rules do not apply), closed-form rules otherwise; both overridable.
struct MethodOpts {
    bool force_numeric = false;
    bool force_analytic = false;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--numeric", force_numeric,
                      "use eigenvalue stability verdicts (default with decay)");
        cmd->add_flag("--analytic", force_analytic,
                      "use the closed-form stability rules (decay-free models only)")
            ->excludes("--numeric");
    }

    int pick(const cw_model* m) const {
        if (force_numeric) return 1;
        if (force_analytic) return 0;
        return model_has_decay(m) ? 1 : 0;
    }
};

std::string fmt(double v) {
    if (std::isnan(v)) return "none";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json criticals_json(const cw_criticals& c, const std::string& tag, bool maintenance) {
    json j;
    j["case"] = tag;
    j["maintenance"] = maintenance;
    j["D1"] = c.d1;
    j["I2_kind"] = c.i2_kind;
    j["D2_min"] = c.d2_min;
    j["D2_max"] = c.d2_max;
    j["D3"] = c.d3;
    j["I3_equals_I2"] = c.i3_equals_i2 != 0;
    j["I3_empty"] = c.i3_empty != 0;
    j["regime"] = c.regime;
    return j;
}

int cmd_criticals(const ModelOpts& mo, bool as_json) {
    cw_model* m = mo.build();
    cw_criticals c;
    cw_status st = cw_criticals_compute(m, &c);
    if (st != CW_OK) {
        cw_model_destroy(m);
        die(st);
    }
    if (as_json) {
        std::printf("%s\n", criticals_json(c, mo.tag(), mo.maintenance).dump(2).c_str());
    } else {
        std::printf("regime   %s\n", c.regime);
        std::printf("D1       %s   (hydrogen window closes)\n", fmt(c.d1).c_str());
        if (std::string(c.i2_kind) == "empty") {
            std::printf("I2       empty   (coexistence impossible at every dilution)\n");
        } else {
            std::printf("I2       (%s, %s)   kind %s   (coexistence dilution range)\n",
                        fmt(c.d2_min).c_str(), fmt(c.d2_max).c_str(), c.i2_kind);
        }
        std::printf("D3       %s   (threshold-slope flip", fmt(c.d3).c_str());
        if (c.i3_equals_i2 != 0) {
            std::printf("; slope negative on all of I2)\n");
        } else if (c.i3_empty != 0) {
            std::printf("; slope positive on all of I2)\n");
        } else {
            std::printf(")\n");
        }
    }
    cw_model_destroy(m);
    return 0;
}

int cmd_steady_states(const ModelOpts& mo, const MethodOpts& meth, double dilution, double inflow,
                      bool rescaled, bool as_json) {
    cw_model* m = mo.build();
    int numeric = meth.pick(m);
    cw_steady_state states[4];
    int n = 0;
    cw_status st = cw_steady_states(m, dilution, inflow, numeric, states, 4, &n);
    if (st != CW_OK) {
        cw_model_destroy(m);
        die(st);
    }
    static const char* kLab[6] = {"X_ch", "X_ph", "X_h2", "S_ch", "S_ph", "S_h2"};
    static const char* kRes[6] = {"x_ch", "x_ph", "x_h2", "s_ch", "s_ph", "s_h2"};
    const char** names = rescaled ? kRes : kLab;
    if (as_json) {
        json out;
        out["dilution"] = dilution;
        out["S_ch_in"] = inflow;
        out["method"] = numeric != 0 ? "numeric" : "analytic";
        out["states"] = json::array();
        for (int k = 0; k < n; ++k) {
            const cw_steady_state& s = states[k];
            json js;
            js["kind"] = s.kind;
            js["stability"] = std::string(1, s.stability);
            js["residual"] = s.residual;
            for (int i = 0; i < 6; ++i) js[names[i]] = rescaled ? s.rescaled[i] : s.lab[i];
            if (numeric != 0) {
                js["max_real_part"] = s.max_real_part;
                json eig = json::array();
                for (int i = 0; i < 6; ++i) eig.push_back({s.eig_real[i], s.eig_imag[i]});
                js["eigenvalues"] = eig;
            }
            out["states"].push_back(js);
        }
        std::printf("%s\n", out.dump(2).c_str());
    } else {
        std::printf("# D = %g, S_ch_in = %g, %s stability verdicts\n", dilution, inflow,
                    numeric != 0 ? "eigenvalue" : "closed-form");
        for (int k = 0; k < n; ++k) {
            const cw_steady_state& s = states[k];
            std::printf("%-4s  %c ", s.kind, s.stability);
            for (int i = 0; i < 6; ++i) {
                std::printf(" %s=%.6g", names[i], rescaled ? s.rescaled[i] : s.lab[i]);
            }
            std::printf("  residual=%.2e\n", s.residual);
            if (numeric != 0) {
                std::printf("      eig:");
                for (int i = 0; i < 6; ++i) {
                    std::printf(" %.4g%+.4gi", s.eig_real[i], s.eig_imag[i]);
                }
                std::printf("\n");
            }
        }
    }
    cw_model_destroy(m);
    return 0;
}

int cmd_diagram(const ModelOpts& mo, const MethodOpts& meth, const cw_grid_spec& spec,
                const std::string& out_csv, const std::string& out_json, bool as_json) {
    cw_model* m = mo.build();
    int numeric = meth.pick(m);
    char labels[5][4];
    int n_labels = 0;
    cw_status st = cw_diagram_scan(m, &spec, numeric, out_csv.empty() ? nullptr : out_csv.c_str(),
                                   out_json.empty() ? nullptr : out_json.c_str(),
                                   mo.tag().c_str(), labels, &n_labels);
    if (st != CW_OK) {
        cw_model_destroy(m);
        die(st);
    }
    if (as_json) {
        json j;
        j["labels_present"] = json::array();
        for (int k = 0; k < n_labels; ++k) j["labels_present"].push_back(labels[k]);
        if (!out_csv.empty()) j["csv"] = out_csv;
        if (!out_json.empty()) j["summary"] = out_json;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("regions present:");
        for (int k = 0; k < n_labels; ++k) std::printf(" %s", labels[k]);
        std::printf("\n");
        if (!out_csv.empty()) std::printf("cells written to %s\n", out_csv.c_str());
        if (!out_json.empty()) std::printf("summary written to %s\n", out_json.c_str());
    }
    cw_model_destroy(m);
    return 0;
}

int cmd_simulate(const ModelOpts& mo, cw_sim_spec& spec, const std::vector<double>& initial,
                 double seed_factor, const std::string& out_csv, bool rescaled, bool as_json) {
    if (!initial.empty()) {
        if (initial.size() != 6) die_parse("--initial needs exactly 6 values");
        spec.has_initial = 1;
        for (int i = 0; i < 6; ++i) spec.initial[i] = initial[static_cast<std::size_t>(i)];
    }
    cw_model* m = mo.build();
    if (seed_factor > 0.0 && spec.has_initial == 0) {
        // Start from the coexistence state with its biomasses scaled, the
        // protocol behind the oscillation figures; generic inoculum when no
        // coexistence state exists.
        cw_steady_state states[4];
        int n = 0;
        cw_status st = cw_steady_states(m, spec.dilution, spec.S_ch_in, 1, states, 4, &n);
        if (st != CW_OK) {
            cw_model_destroy(m);
            die(st);
        }
        bool found = false;
        for (int k = 0; k < n; ++k) {
            if (std::string(states[k].kind) == "SS3") {
                spec.has_initial = 1;
                for (int i = 0; i < 6; ++i) {
                    spec.initial[i] = states[k].lab[i] * (i < 3 ? seed_factor : 1.0);
                }
                found = true;
                break;
            }
        }
        if (!found) {
            std::fprintf(stderr,
                         "note: no coexistence state here; using the generic inoculum\n");
        }
    }
    cw_sim_report rep;
    cw_status st =
        cw_simulate(m, &spec, out_csv.empty() ? nullptr : out_csv.c_str(), rescaled ? 1 : 0, &rep);
    if (st != CW_OK) {
        cw_model_destroy(m);
        die(st);
    }
    static const char* kLab[6] = {"X_ch", "X_ph", "X_h2", "S_ch", "S_ph", "S_h2"};
    static const char* kRes[6] = {"x_ch", "x_ph", "x_h2", "s_ch", "s_ph", "s_h2"};
    const char** names = rescaled ? kRes : kLab;
    const double* terminal = rescaled ? rep.terminal_rescaled : rep.terminal_lab;
    if (as_json) {
        json j;
        j["outcome"] = rep.outcome;
        j["detail"] = rep.detail;
        j["complete"] = rep.complete != 0;
        j["terminal_residual"] = rep.terminal_residual;
        j["period"] = rep.period;
        j["amplitude_drift"] = rep.amplitude_drift;
        j["peak_count"] = rep.peak_count;
        for (int i = 0; i < 6; ++i) j["terminal"][names[i]] = terminal[i];
        if (!out_csv.empty()) j["trajectory"] = out_csv;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("outcome   %s\n", rep.outcome);
        std::printf("detail    %s\n", rep.detail);
        std::printf("terminal ");
        for (int i = 0; i < 6; ++i) std::printf(" %s=%.6g", names[i], terminal[i]);
        std::printf("\nresidual  %.3e\n", rep.terminal_residual);
        if (!std::isnan(rep.period)) {
            std::printf("period    %s   amplitude drift %s   peaks %d\n", fmt(rep.period).c_str(),
                        fmt(rep.amplitude_drift).c_str(), rep.peak_count);
        }
        if (!out_csv.empty()) std::printf("trajectory written to %s\n", out_csv.c_str());
    }
    cw_model_destroy(m);
    if (rep.complete == 0) {
        std::fprintf(stderr, "error: integration stopped early: %s\n", rep.detail);
        return 3;
    }
    return 0;
}

int cmd_hopf_scan(const ModelOpts& mo, double dilution, double s_min, double s_max, int n,
                  bool show_points, bool as_json) {
    cw_model* m = mo.build();
    std::vector<cw_hopf_point> points(static_cast<std::size_t>(n > 0 ? n : 0));
    std::vector<double> crossings(16);
    int n_crossings = 0;
    int real_negative = 0;
    cw_status st = cw_hopf_scan(m, dilution, s_min, s_max, n, points.data(), crossings.data(),
                                static_cast<int>(crossings.size()), &n_crossings, &real_negative);
    if (st != CW_OK) {
        cw_model_destroy(m);
        die(st);
    }
    int stored = std::min<int>(n_crossings, static_cast<int>(crossings.size()));
    int with_ss3 = 0;
    for (const cw_hopf_point& p : points) with_ss3 += p.ss3_exists;
    if (as_json) {
        json j;
        j["dilution"] = dilution;
        j["points_scanned"] = n;
        j["points_with_SS3"] = with_ss3;
        j["crossings"] = json::array();
        for (int k = 0; k < stored; ++k) j["crossings"].push_back(crossings[static_cast<std::size_t>(k)]);
        j["real_eigenvalues_stayed_negative"] = real_negative != 0;
        if (show_points) {
            j["points"] = json::array();
            for (const cw_hopf_point& p : points) {
                json jp;
                jp["S_ch_in"] = p.S_ch_in;
                jp["SS3"] = p.ss3_exists != 0;
                jp["max_real_part"] = p.max_real_part;
                jp["complex_max_real"] = p.complex_max_real;
                j["points"].push_back(jp);
            }
        }
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        if (with_ss3 == 0) {
            std::printf("no coexistence state anywhere in the scanned range\n");
        } else {
            std::printf("crossings of the leading complex pair:%s\n",
                        n_crossings == 0 ? " none" : "");
            for (int k = 0; k < stored; ++k) {
                std::printf("  S_ch_in = %.6g\n", crossings[static_cast<std::size_t>(k)]);
            }
            std::printf("real eigenvalues stayed negative: %s\n", real_negative ? "yes" : "no");
        }
        if (show_points) {
            std::printf("%12s  %4s  %12s  %12s\n", "S_ch_in", "SS3", "max_re", "complex_re");
            for (const cw_hopf_point& p : points) {
                std::printf("%12.6g  %4s  %12.6g  %12.6g\n", p.S_ch_in,
                            p.ss3_exists ? "yes" : "no", p.max_real_part, p.complex_max_real);
            }
        }
    }
    cw_model_destroy(m);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chlorophenol-phenol-hydrogen chemostat food web: steady states, operating "
                 "diagrams, simulation"};
    app.require_subcommand(1);

    ModelOpts mo;
    MethodOpts meth;
    bool as_json = false;
    bool rescaled = false;

    CLI::App* c_crit = app.add_subcommand("criticals", "critical dilution rates of the diagram");
    mo.attach(c_crit);
    c_crit->add_flag("--json", as_json, "JSON output");

    double dilution = 0.1;
    double inflow = 1.0;
    CLI::App* c_ss = app.add_subcommand("steady-states", "steady states at one operating point");
    mo.attach(c_ss);
    meth.attach(c_ss);
    c_ss->add_option("-D,--dilution", dilution, "dilution rate (1/d)")->required();
    c_ss->add_option("-S,--inflow", inflow, "chlorophenol inflow (kgCOD/m3)")->required();
    c_ss->add_flag("--rescaled", rescaled, "print rescaled coordinates");
    c_ss->add_flag("--json", as_json, "JSON output");

    cw_grid_spec grid{200, 200, 1e-3, 0.0, 1e-3, 20.0, 1};
    bool linear_s = false;
    std::string out_csv;
    std::string out_json;
    CLI::App* c_diag = app.add_subcommand("diagram", "operating-diagram grid scan");
    mo.attach(c_diag);
    meth.attach(c_diag);
    c_diag->add_option("--nd", grid.n_d, "dilution samples (default 200)");
    c_diag->add_option("--ns", grid.n_s, "inflow samples (default 200)");
    c_diag->add_option("--d-min", grid.d_min, "lowest dilution (default 0.001)");
    c_diag->add_option("--d-max", grid.d_max,
                       "highest dilution (default: 1.2x window-closure dilution)");
    c_diag->add_option("--s-min", grid.s_min, "lowest inflow (default 0.001)");
    c_diag->add_option("--s-max", grid.s_max, "highest inflow (default 20)");
    c_diag->add_flag("--linear-s", linear_s, "linear instead of logarithmic inflow axis");
    c_diag->add_option("--out-csv", out_csv, "write per-cell CSV here");
    c_diag->add_option("--out-json", out_json, "write JSON summary here");
    c_diag->add_flag("--json", as_json, "JSON output on stdout");

    cw_sim_spec sim{};
    sim.dilution = 0.01;
    sim.S_ch_in = 0.1;
    sim.t_end = 10000.0;
    std::vector<double> initial;
    CLI::App* c_sim = app.add_subcommand("simulate", "integrate the system and classify the attractor");
    mo.attach(c_sim);
    c_sim->add_option("-D,--dilution", sim.dilution, "dilution rate (1/d)")->required();
    c_sim->add_option("-S,--inflow", sim.S_ch_in, "chlorophenol inflow (kgCOD/m3)")->required();
    c_sim->add_option("--t-end", sim.t_end, "integration horizon (d, default 10000)");
    c_sim->add_option("--rel-tol", sim.rel_tol, "relative tolerance (default 1e-8)");
    c_sim->add_option("--abs-tol", sim.abs_tol, "absolute tolerance (default 1e-12)");
    c_sim->add_option("--samples", sim.samples, "trajectory samples (default 2001)");
    c_sim->add_option("--initial", initial,
                      "initial state, 6 values in full coordinates (X_ch X_ph X_h2 S_ch S_ph S_h2)")
        ->expected(6);
    double seed_factor = 0.0;
    c_sim->add_option("--seed-coexistence", seed_factor,
                      "start from the coexistence state with its biomasses scaled by this factor "
                      "(e.g. 1.3); generic inoculum when coexistence is absent")
        ->excludes("--initial");
    c_sim->add_option("--out-csv", out_csv, "write the trajectory CSV here");
    c_sim->add_flag("--rescaled", rescaled, "rescaled trajectory and report coordinates");
    c_sim->add_flag("--json", as_json, "JSON output");

    double s_min = 0.05;
    double s_max = 0.2;
    int n_points = 1000;
    bool show_points = false;
    CLI::App* c_hopf = app.add_subcommand("hopf-scan",
                                          "coexistence spectrum along the inflow axis");
    mo.attach(c_hopf);
    c_hopf->add_option("-D,--dilution", dilution, "dilution rate (1/d)")->required();
    c_hopf->add_option("--s-min", s_min, "scan start (kgCOD/m3)")->required();
    c_hopf->add_option("--s-max", s_max, "scan end (kgCOD/m3)")->required();
    c_hopf->add_option("-n,--points", n_points, "scan points (default 1000)");
    c_hopf->add_flag("--show-points", show_points, "print every scanned point");
    c_hopf->add_flag("--json", as_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (c_crit->parsed()) return cmd_criticals(mo, as_json);
    if (c_ss->parsed()) return cmd_steady_states(mo, meth, dilution, inflow, rescaled, as_json);
    if (c_diag->parsed()) {
        if (linear_s) grid.log_s = 0;
        return cmd_diagram(mo, meth, grid, out_csv, out_json, as_json);
    }
    if (c_sim->parsed()) {
        return cmd_simulate(mo, sim, initial, seed_factor, out_csv, rescaled, as_json);
    }
    if (c_hopf->parsed()) return cmd_hopf_scan(mo, dilution, s_min, s_max, n_points, show_points, as_json);
    return 2;
}
