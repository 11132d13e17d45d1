// C boundary: opaque handles, status codes, thread-local error text.
// Exceptions never cross this file.
#include "chemoweb.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "diagram.hpp"
#include "equilibria.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "params.hpp"
#include "simulate.hpp"
#include "stability.hpp"
#include "system.hpp"

struct cw_model {
    chemoweb::FullParameters full;
    chemoweb::MonodFoodWeb bundle;

    explicit cw_model(const chemoweb::FullParameters& p) : full(p), bundle(p) {}
};

namespace {

thread_local std::string g_last_error;

class io_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename F>
cw_status guarded(F&& body) {
    try {
        body();
        return CW_OK;
    } catch (const chemoweb::invalid_parameter_error& e) {
        g_last_error = e.what();
        return CW_ERR_INVALID;
    } catch (const chemoweb::parse_error& e) {
        g_last_error = e.what();
        return CW_ERR_PARSE;
    } catch (const chemoweb::domain_error& e) {
        g_last_error = e.what();
        return CW_ERR_DOMAIN;
    } catch (const chemoweb::no_solution_error& e) {
        g_last_error = e.what();
        return CW_ERR_NO_SOLUTION;
    } catch (const chemoweb::regime_error& e) {
        g_last_error = e.what();
        return CW_ERR_REGIME;
    } catch (const chemoweb::wrong_method_error& e) {
        g_last_error = e.what();
        return CW_ERR_METHOD;
    } catch (const chemoweb::numeric_error& e) {
        g_last_error = e.what();
        return CW_ERR_NUMERIC;
    } catch (const io_failure& e) {
        g_last_error = e.what();
        return CW_ERR_IO;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return CW_ERR_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CW_ERR_INTERNAL;
    }
}

cw_status invalid(const char* msg) {
    g_last_error = msg;
    return CW_ERR_INVALID;
}

void copy_str(char* dst, size_t cap, const char* src) {
    std::snprintf(dst, cap, "%s", src);
}

// Returns text through the (buf, cap, needed) protocol; buf may be NULL to
// query the size.
cw_status return_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr) return CW_OK;
    if (cap < text.size() + 1) return invalid("buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return CW_OK;
}

std::ofstream open_out(const char* path) {
    std::ofstream os(path);
    if (!os) throw io_failure(std::string("cannot write ") + path);
    return os;
}

cw_status create_model(cw_model** out, const chemoweb::FullParameters& p) {
    *out = new cw_model(p);
    return CW_OK;
}

} // namespace

extern "C" {

const char* cw_last_error(void) { return g_last_error.c_str(); }

cw_status cw_model_create_case(char case_tag, int maintenance, cw_model** out) {
    if (out == nullptr) return invalid("null output handle");
    *out = nullptr;
    return guarded([&] {
        create_model(out, chemoweb::preset_case(case_tag).with_maintenance(maintenance != 0));
    });
}

cw_status cw_model_create_json(const char* json_text, cw_model** out) {
    if (out == nullptr) return invalid("null output handle");
    *out = nullptr;
    if (json_text == nullptr) return invalid("null parameter document");
    return guarded([&] { create_model(out, chemoweb::params_from_json(json_text)); });
}

cw_status cw_model_create_json_file(const char* path, cw_model** out) {
    if (out == nullptr) return invalid("null output handle");
    *out = nullptr;
    if (path == nullptr) return invalid("null path");
    return guarded([&] {
        // read here so an unreadable file reports CW_ERR_IO, not a parse error
        std::ifstream in(path);
        if (!in) throw io_failure(std::string("cannot read ") + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        create_model(out, chemoweb::params_from_json(buf.str()));
    });
}

void cw_model_destroy(cw_model* m) { delete m; }

cw_status cw_model_params_json(const cw_model* m, char* buf, size_t cap, size_t* needed) {
    if (m == nullptr) return invalid("null model");
    return guarded([&] {
        cw_status st = return_text(chemoweb::params_to_json(m->full), buf, cap, needed);
        if (st != CW_OK) throw chemoweb::invalid_parameter_error(g_last_error);
    });
}

cw_status cw_model_rescaled(const cw_model* m, double out[13]) {
    if (m == nullptr || out == nullptr) return invalid("null argument");
    const chemoweb::RescaledParameters& p = m->bundle.p;
    const double v[13] = {p.m0, p.K0, p.L0, p.m1,    p.K1,  p.Ki, p.m2,
                          p.K2, p.a0, p.a1, p.a2, p.omega, p.y3y4};
    std::memcpy(out, v, sizeof v);
    return CW_OK;
}

cw_status cw_criticals_compute(const cw_model* m, cw_criticals* out) {
    if (m == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::CriticalDilutions cd = chemoweb::critical_dilutions(m->bundle.web);
        chemoweb::Regime regime = chemoweb::classify_regime(m->bundle.web);
        out->d1 = cd.d1;
        switch (cd.i2_kind) {
            case chemoweb::I2Kind::from_zero: copy_str(out->i2_kind, sizeof out->i2_kind, "from_zero"); break;
            case chemoweb::I2Kind::empty: copy_str(out->i2_kind, sizeof out->i2_kind, "empty"); break;
            case chemoweb::I2Kind::interior: copy_str(out->i2_kind, sizeof out->i2_kind, "interior"); break;
        }
        out->d2_min = cd.d2_min;
        out->d2_max = cd.d2_max;
        out->d3 = cd.d3;
        out->i3_equals_i2 = cd.i3_equals_i2 ? 1 : 0;
        out->i3_empty = cd.i3_empty ? 1 : 0;
        switch (regime.tag) {
            case chemoweb::RegimeTag::a_or_b: copy_str(out->regime, sizeof out->regime, "a_or_b"); break;
            case chemoweb::RegimeTag::c: copy_str(out->regime, sizeof out->regime, "c"); break;
            case chemoweb::RegimeTag::d: copy_str(out->regime, sizeof out->regime, "d"); break;
        }
    });
}

cw_status cw_steady_states(const cw_model* m, double dilution, double S_ch_in, int numeric,
                           cw_steady_state* out, int cap, int* n_out) {
    if (m == nullptr || out == nullptr || n_out == nullptr) return invalid("null argument");
    *n_out = 0;
    return guarded([&] {
        const double s0_in = chemoweb::rescale_inflow(S_ch_in, m->bundle.p);
        auto states = chemoweb::find_all_steady_states(dilution, s0_in, m->bundle.web);
        if (static_cast<int>(states.size()) > cap) {
            throw chemoweb::invalid_parameter_error("output capacity too small");
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < states.size(); ++k) {
            const chemoweb::SteadyState& ss = states[k];
            cw_steady_state& o = out[k];
            copy_str(o.kind, sizeof o.kind, chemoweb::kind_label(ss.kind));
            chemoweb::State6 lab = chemoweb::to_full_state(ss.state, m->full);
            for (int i = 0; i < 6; ++i) {
                o.lab[i] = lab[static_cast<std::size_t>(i)];
                o.rescaled[i] = ss.state[static_cast<std::size_t>(i)];
                o.eig_real[i] = nan;
                o.eig_imag[i] = nan;
            }
            chemoweb::StabilityVerdict v = numeric != 0
                                               ? chemoweb::stability_numeric(ss, m->bundle.web)
                                               : chemoweb::stability_analytic(ss, m->bundle.web);
            o.stability = chemoweb::verdict_label(v.verdict)[0];
            o.max_real_part = v.max_real_part;
            if (numeric != 0) {
                chemoweb::JacobianBundle jb =
                    chemoweb::jacobian(ss.state, dilution, m->bundle.web);
                auto eig = chemoweb::eigenvalues(jb.full);
                for (std::size_t i = 0; i < eig.size() && i < 6; ++i) {
                    o.eig_real[i] = eig[i].real();
                    o.eig_imag[i] = eig[i].imag();
                }
            }
            o.residual = ss.residual;
        }
        *n_out = static_cast<int>(states.size());
    });
}

cw_status cw_gamma1(const cw_model* m, double dilution, double* out) {
    if (m == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] { *out = chemoweb::gamma1(dilution, m->bundle.web, m->bundle.p.y3y4); });
}

cw_status cw_gamma2(const cw_model* m, double dilution, double* out) {
    if (m == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] { *out = chemoweb::gamma2(dilution, m->bundle.web, m->bundle.p.y3y4); });
}

cw_status cw_gamma3(const cw_model* m, double dilution, int numeric, double* out) {
    if (m == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        *out = chemoweb::gamma3_locus(dilution, m->bundle.web, m->bundle.p.y3y4, numeric != 0);
    });
}

cw_status cw_classify_point(const cw_model* m, double dilution, double S_ch_in, int numeric,
                            char out_label[4], int* near_boundary) {
    if (m == nullptr || out_label == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::RegionLabel label = chemoweb::classify_point(
            dilution, S_ch_in, m->bundle.web, m->bundle.p.y3y4, numeric != 0);
        copy_str(out_label, 4, chemoweb::region_label(label.region));
        if (near_boundary != nullptr) *near_boundary = label.near_boundary ? 1 : 0;
    });
}

cw_status cw_diagram_scan(const cw_model* m, const cw_grid_spec* spec, int numeric,
                          const char* csv_path, const char* json_path, const char* case_tag,
                          char out_labels[5][4], int* n_labels) {
    if (m == nullptr || spec == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::GridSpec gs;
        gs.n_d = spec->n_d;
        gs.n_s = spec->n_s;
        gs.d_min = spec->d_min;
        gs.d_max = spec->d_max;
        gs.s_min = spec->s_min;
        gs.s_max = spec->s_max;
        gs.log_s = spec->log_s != 0;
        chemoweb::DiagramGrid grid =
            chemoweb::scan_diagram(gs, m->bundle.web, m->bundle.p.y3y4, numeric != 0);
        if (csv_path != nullptr) {
            std::ofstream os = open_out(csv_path);
            chemoweb::write_diagram_csv(os, grid);
            if (!os.good()) throw io_failure(std::string("write failed: ") + csv_path);
        }
        if (json_path != nullptr) {
            std::ofstream os = open_out(json_path);
            chemoweb::write_diagram_summary_json(os, grid, m->bundle.web, m->bundle.p.y3y4,
                                                 case_tag != nullptr ? case_tag : "custom");
            if (!os.good()) throw io_failure(std::string("write failed: ") + json_path);
        }
        if (out_labels != nullptr && n_labels != nullptr) {
            auto inventory = chemoweb::region_inventory(grid);
            *n_labels = static_cast<int>(inventory.size());
            for (std::size_t k = 0; k < inventory.size() && k < 5; ++k) {
                copy_str(out_labels[k], 4, chemoweb::region_label(inventory[k]));
            }
        }
    });
}

cw_status cw_simulate(const cw_model* m, const cw_sim_spec* spec,
                      const char* trajectory_csv_path, int rescaled_csv, cw_sim_report* out) {
    if (m == nullptr || spec == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::SimSpec ss;
        ss.dilution = spec->dilution;
        ss.s0_in = chemoweb::rescale_inflow(spec->S_ch_in, m->bundle.p);
        ss.t_end = spec->t_end;
        if (spec->rel_tol > 0.0) ss.rel_tol = spec->rel_tol;
        if (spec->abs_tol > 0.0) ss.abs_tol = spec->abs_tol;
        if (spec->samples > 0) ss.samples = spec->samples;
        if (spec->has_initial != 0) {
            chemoweb::State6 lab;
            for (int i = 0; i < 6; ++i) lab[static_cast<std::size_t>(i)] = spec->initial[i];
            ss.initial = chemoweb::to_rescaled_state(lab, m->full);
        }
        chemoweb::Trajectory traj = chemoweb::integrate_web(ss, m->bundle.web);
        chemoweb::AttractorReport rep =
            chemoweb::classify_attractor(traj, ss.dilution, ss.s0_in, m->bundle.web);

        if (trajectory_csv_path != nullptr) {
            std::ofstream os = open_out(trajectory_csv_path);
            chemoweb::write_trajectory_csv(os, traj, rescaled_csv == 0, &m->full);
            if (!os.good()) throw io_failure(std::string("write failed: ") + trajectory_csv_path);
        }

        copy_str(out->outcome, sizeof out->outcome, chemoweb::attractor_label(rep.outcome));
        chemoweb::State6 lab = chemoweb::to_full_state(rep.terminal, m->full);
        for (int i = 0; i < 6; ++i) {
            out->terminal_lab[i] = lab[static_cast<std::size_t>(i)];
            out->terminal_rescaled[i] = rep.terminal[static_cast<std::size_t>(i)];
        }
        out->terminal_residual = rep.terminal_residual;
        out->period = rep.osc.period;
        out->amplitude_drift = rep.osc.amplitude_drift;
        out->peak_count = rep.osc.peak_count;
        out->complete = traj.complete ? 1 : 0;
        copy_str(out->detail, sizeof out->detail, rep.detail.c_str());
    });
}

cw_status cw_hopf_scan(const cw_model* m, double dilution, double s_min, double s_max, int n,
                       cw_hopf_point* out_points, double* out_crossings, int crossings_cap,
                       int* n_crossings, int* real_negative) {
    if (m == nullptr || out_points == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::HopfScanResult res =
            chemoweb::hopf_scan(dilution, s_min, s_max, n, m->bundle.web, m->bundle.p.y3y4);
        for (std::size_t k = 0; k < res.points.size(); ++k) {
            const chemoweb::HopfPoint& p = res.points[k];
            out_points[k].S_ch_in = p.S_ch_in;
            out_points[k].ss3_exists = p.ss3_exists ? 1 : 0;
            out_points[k].max_real_part = p.max_real_part;
            out_points[k].complex_max_real = p.complex_max_real;
        }
        if (n_crossings != nullptr) *n_crossings = static_cast<int>(res.crossings.size());
        if (out_crossings != nullptr) {
            for (std::size_t k = 0;
                 k < res.crossings.size() && k < static_cast<std::size_t>(crossings_cap); ++k) {
                out_crossings[k] = res.crossings[k];
            }
        }
        if (real_negative != nullptr) *real_negative = res.real_eigs_stayed_negative ? 1 : 0;
    });
}

cw_status cw_check_assumptions(const cw_model* m, int grid_points, int* all_passed,
                               char* report_text, size_t cap, size_t* needed) {
    if (m == nullptr || all_passed == nullptr) return invalid("null argument");
    return guarded([&] {
        chemoweb::GrowthAssumptionReport rep =
            chemoweb::check_growth_assumptions(m->bundle.web, grid_points > 0 ? grid_points : 20);
        *all_passed = rep.all_passed() ? 1 : 0;
        std::ostringstream text;
        for (const chemoweb::GrowthAssumption& a : rep.assumptions) {
            text << (a.passed ? "PASS" : "FAIL") << "  " << a.name;
            if (!a.note.empty()) text << " -- " << a.note;
            text << '\n';
        }
        cw_status st = return_text(text.str(), report_text, cap, needed);
        if (st != CW_OK) throw chemoweb::invalid_parameter_error(g_last_error);
    });
}

} // extern "C"
