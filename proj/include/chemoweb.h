/* C interface to the chlorophenol-phenol-hydrogen chemostat food-web library.
 *
 * All functions return a cw_status; on any failure cw_last_error() holds a
 * human-readable message for the calling thread.  Models are opaque handles
 * created from a built-in parameter case or a JSON parameter document and
 * freed with cw_model_destroy.  Substrate inflows and state vectors cross
 * this interface in laboratory units (kgCOD/m3, 1/d); rescaled quantities
 * are available where noted.
 */
#ifndef CHEMOWEB_H
#define CHEMOWEB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cw_status {
    CW_OK = 0,
    CW_ERR_INVALID = 1,     /* argument or parameter value out of range */
    CW_ERR_PARSE = 2,       /* parameter document not understood */
    CW_ERR_DOMAIN = 3,      /* quantity requested outside its domain */
    CW_ERR_NO_SOLUTION = 4, /* equation has no solution there */
    CW_ERR_REGIME = 5,      /* recycle fraction >= 1: no populated state */
    CW_ERR_METHOD = 6,      /* analytic rule asked outside its hypotheses */
    CW_ERR_NUMERIC = 7,     /* iteration failed to converge */
    CW_ERR_IO = 8,          /* file could not be read or written */
    CW_ERR_INTERNAL = 9
} cw_status;

typedef struct cw_model cw_model;

/* Message of the calling thread's most recent failure (empty string if none).
 * The pointer stays valid until the next failing call on the same thread. */
const char* cw_last_error(void);

/* maintenance != 0 keeps the decay terms; 0 zeroes them. */
cw_status cw_model_create_case(char case_tag, int maintenance, cw_model** out);
cw_status cw_model_create_json(const char* json_text, cw_model** out);
cw_status cw_model_create_json_file(const char* path, cw_model** out);
void cw_model_destroy(cw_model* m);

/* Laboratory parameter set as a JSON document. Returns the required buffer
 * size (including NUL) via *needed; copies when cap suffices. */
cw_status cw_model_params_json(const cw_model* m, char* buf, size_t cap, size_t* needed);

/* Rescaled parameters, in the order
 * m0,K0,L0,m1,K1,Ki,m2,K2,a0,a1,a2,omega,y3y4. */
cw_status cw_model_rescaled(const cw_model* m, double out[13]);

/* ---- critical dilution rates ------------------------------------------ */

typedef struct cw_criticals {
    double d1;        /* hydrogen window closes */
    char i2_kind[12]; /* "from_zero" | "empty" | "interior" */
    double d2_min;    /* coexistence dilution range (NaN when empty) */
    double d2_max;
    double d3;        /* first slope flip (NaN when the slope never flips) */
    int i3_equals_i2; /* slope negative on the whole coexistence range */
    int i3_empty;     /* slope positive on the whole range (or no range) */
    char regime[8];   /* "a_or_b" | "c" | "d" */
} cw_criticals;

cw_status cw_criticals_compute(const cw_model* m, cw_criticals* out);

/* ---- steady states ----------------------------------------------------- */

typedef struct cw_steady_state {
    char kind[8];   /* "SS1" | "SS2b" | "SS2s" | "SS3" */
    double lab[6];  /* X_ch,X_ph,X_h2,S_ch,S_ph,S_h2 */
    double rescaled[6];
    char stability; /* 'S' | 'U' | 'M' */
    double max_real_part; /* numeric verdicts only; NaN on the analytic path */
    double eig_real[6];   /* numeric verdicts only; NaN otherwise */
    double eig_imag[6];
    double residual; /* sup-norm of the steady-state equations */
} cw_steady_state;

/* Writes the states existing at the operating point, count via *n_out;
 * CW_ERR_INVALID when more states exist than cap (4 always suffices).
 * numeric != 0 selects eigenvalue stability verdicts; 0 selects the
 * closed-form rules, which require a decay-free model (CW_ERR_METHOD
 * otherwise). */
cw_status cw_steady_states(const cw_model* m, double dilution, double S_ch_in, int numeric,
                           cw_steady_state* out, int cap, int* n_out);

/* ---- operating diagram ------------------------------------------------- */

/* Boundary curves at one dilution, in laboratory inflow units. */
cw_status cw_gamma1(const cw_model* m, double dilution, double* out);
cw_status cw_gamma2(const cw_model* m, double dilution, double* out);
cw_status cw_gamma3(const cw_model* m, double dilution, int numeric, double* out);

/* Region of one operating point: out_label gets "J1".."J5". */
cw_status cw_classify_point(const cw_model* m, double dilution, double S_ch_in, int numeric,
                            char out_label[4], int* near_boundary);

typedef struct cw_grid_spec {
    int n_d;      /* >= 2 */
    int n_s;      /* >= 2 */
    double d_min; /* > 0 */
    double d_max; /* <= 0: auto, 1.2x the window-closure dilution */
    double s_min; /* > 0, laboratory units */
    double s_max;
    int log_s; /* != 0: logarithmic inflow axis */
} cw_grid_spec;

/* Scans the grid; writes the per-cell CSV and/or the JSON summary to the
 * given paths (either may be NULL to skip).  case_tag is a free-form name
 * echoed into the summary.  out_labels, if non-NULL, receives the distinct
 * region labels present, "J1".."J5" in order, *n_labels telling how many. */
cw_status cw_diagram_scan(const cw_model* m, const cw_grid_spec* spec, int numeric,
                          const char* csv_path, const char* json_path, const char* case_tag,
                          char out_labels[5][4], int* n_labels);

/* ---- simulation -------------------------------------------------------- */

typedef struct cw_sim_spec {
    double dilution;
    double S_ch_in; /* laboratory units; phenol and hydrogen feed are zero */
    double t_end;
    double rel_tol; /* <= 0: default 1e-8 */
    double abs_tol; /* <= 0: default 1e-12 */
    int samples;    /* <= 0: default 2001 */
    int has_initial;
    double initial[6]; /* laboratory coordinates, used when has_initial */
} cw_sim_spec;

typedef struct cw_sim_report {
    /* "converged_SS1" | "converged_SS2" | "converged_SS3" | "limit_cycle" |
     * "growing_oscillation_to_SS1" | "undecided" */
    char outcome[32];
    double terminal_lab[6];
    double terminal_rescaled[6];
    double terminal_residual;
    double period;          /* NaN unless trailing oscillations were found */
    double amplitude_drift; /* relative first-half/second-half change */
    int peak_count;
    int complete; /* 0 when integration stopped early */
    char detail[256];
} cw_sim_report;

/* Integrates and classifies the long-run behaviour.  trajectory_csv_path may
 * be NULL; rescaled_csv selects the trajectory's coordinate system. */
cw_status cw_simulate(const cw_model* m, const cw_sim_spec* spec,
                      const char* trajectory_csv_path, int rescaled_csv, cw_sim_report* out);

/* ---- Hopf scan --------------------------------------------------------- */

typedef struct cw_hopf_point {
    double S_ch_in;
    int ss3_exists;
    double max_real_part;    /* NaN when absent */
    double complex_max_real; /* largest real part among complex pairs */
} cw_hopf_point;

/* Sweeps the coexistence spectrum over n evenly spaced inflows.  out_points
 * must hold n entries.  Crossings of the leading complex pair are written to
 * out_crossings (up to crossings_cap; total found via *n_crossings).
 * *real_negative is set to 1 when every real eigenvalue stayed negative at
 * every point where coexistence exists (the Hopf signature). */
cw_status cw_hopf_scan(const cw_model* m, double dilution, double s_min, double s_max, int n,
                       cw_hopf_point* out_points, double* out_crossings, int crossings_cap,
                       int* n_crossings, int* real_negative);

/* ---- growth assumptions ------------------------------------------------ */

/* Checks the qualitative assumptions on the kinetics.  *all_passed gets
 * 0/1; report_text (optional) receives one line per assumption. */
cw_status cw_check_assumptions(const cw_model* m, int grid_points, int* all_passed,
                               char* report_text, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* CHEMOWEB_H */
