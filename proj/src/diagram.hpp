#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "equilibria.hpp"
#include "stability.hpp"

namespace chemoweb {

// Operating-diagram regions of the (inflow, dilution) control plane:
//   J1  washout only
//   J2  hydrogen-free pair exists, its stable branch attracts
//   J3  coexistence exists and is stable
//   J4  hydrogen-free pair exists but both branches repel (no coexistence)
//   J5  coexistence exists but is unstable (oscillations)
enum class Region { j1, j2, j3, j4, j5 };

const char* region_label(Region r);

// Index order for the per-state table below.
enum StateIndex : int { idx_ss1 = 0, idx_ss2_flat = 1, idx_ss2_sharp = 2, idx_ss3 = 3 };

struct StateStability {
    bool exists = false;
    Verdict verdict = Verdict::unstable;
    double max_real_part = std::numeric_limits<double>::quiet_NaN();  // numeric path only
};

struct RegionLabel {
    Region region = Region::j1;
    std::array<StateStability, 4> states{};
    bool near_boundary = false;
};

// Classify one operating point.  The inflow is in laboratory units and is
// rescaled internally.  numeric_stability selects eigenvalue verdicts (the
// only valid route with maintenance); the analytic route requires a
// decay-free web and throws wrong_method_error otherwise.
RegionLabel classify_point(double dilution, double S_ch_in, const FoodWeb& web, double y3y4,
                           bool numeric_stability);

// Boundary curves in laboratory inflow units.  gamma1/gamma2 throw
// domain_error outside their dilution ranges; gamma3 throws no_solution_error
// when the stability of coexistence never flips along the inflow axis.
double gamma1(double dilution, const FoodWeb& web, double y3y4);
double gamma2(double dilution, const FoodWeb& web, double y3y4);
double gamma3_locus(double dilution, const FoodWeb& web, double y3y4, bool numeric_stability);

struct GridSpec {
    int n_d = 200;
    int n_s = 200;
    double d_min = 1e-3;
    double d_max = 0.0;  // <= 0: auto, 1.2x the window-closure dilution
    double s_min = 1e-3;
    double s_max = 20.0;
    bool log_s = true;  // logarithmic inflow axis (linear otherwise)
};

struct DiagramGrid {
    GridSpec spec;
    std::vector<double> d_axis;  // strictly increasing
    std::vector<double> s_axis;  // strictly increasing, laboratory units
    std::vector<RegionLabel> cells;  // row-major, cells[i_d * n_s + i_s]
    bool numeric_stability = false;
};

DiagramGrid scan_diagram(const GridSpec& spec, const FoodWeb& web, double y3y4,
                         bool numeric_stability);

// One row per cell; fixed column order.
void write_diagram_csv(std::ostream& os, const DiagramGrid& grid);

// JSON summary: critical dilutions, sampled boundary curves, labels present.
// case_tag is a free-form parameter-set name for the header.
void write_diagram_summary_json(std::ostream& os, const DiagramGrid& grid, const FoodWeb& web,
                                double y3y4, const std::string& case_tag);

// Distinct labels on a grid, in J1..J5 order.
std::vector<Region> region_inventory(const DiagramGrid& grid);

} // namespace chemoweb
