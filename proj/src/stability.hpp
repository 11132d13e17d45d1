#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equilibria.hpp"

namespace chemoweb {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix3 = Eigen::Matrix3d;

// Verdicts within +-kMarginalBand of the stability boundary are reported as
// marginal instead of being forced to one side.
constexpr double kMarginalBand = 1e-7;

enum class Verdict { stable, unstable, marginal };
enum class VerdictMethod { analytic_decay_free, eigenvalue_numeric };

const char* verdict_label(Verdict v);  // "S", "U", "M"

struct StabilityVerdict {
    Verdict verdict;
    VerdictMethod method;
    // Largest eigenvalue real part (numeric method only, NaN otherwise).
    double max_real_part;
    std::string detail;
};

// Growth-rate partials at a state; h carries the sign-flipped hydrogen
// partial of the phenol tier so that all five are nonnegative.
struct GrowthPartials {
    double e;  // d mu_ch / d s_ch
    double f;  // d mu_ch / d s_h2
    double g;  // d mu_ph / d s_ph
    double h;  // -d mu_ph / d s_h2
    double i;  // d mu_h2 / d s_h2
};

struct JacobianBundle {
    Matrix6 full;  // rescaled coordinates, decay included
    // Reduced 3x3 biomass block on the invariant manifold reached after the
    // substrate-plus-biomass aggregates wash out; only defined for
    // decay-free webs.
    std::optional<Matrix3> biomass_block;
    GrowthPartials partials;
};

JacobianBundle jacobian(const State6& state, double dilution, const FoodWeb& web);

// Eigenvalues ordered by descending real part (ties: ascending |imag|,
// positive imaginary first).  Every eigenpair is validated against
// ||A v - lambda v|| <= 1e-8 ||A||; failure raises numeric_error rather
// than returning a doubtful spectrum.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

// Routh-Hurwitz test for x^3 + c2 x^2 + c1 x + c0: stable iff all
// coefficients and c1*c2 - c0 are positive; marginal when any tested
// quantity is within 1e-10 of zero.
Verdict routh_hurwitz_cubic(double c2, double c1, double c0);

// Coefficients (c2, c1, c0) of the characteristic polynomial of the reduced
// biomass block at a decay-free coexistence state.
struct CubicCoeffs {
    double c2, c1, c0;
};
CubicCoeffs coexistence_char_poly(const SteadyState& ss, const FoodWeb& web);

// The Routh-Hurwitz margin c1*c2 - c0 at the coexistence state for the given
// operating point, evaluated in its expanded product form.  Positive margin
// (together with the always-positive coefficients) means stability when the
// threshold slope is negative.  Decay-free only; domain_error when the
// coexistence state is absent.
double ss3_hurwitz_margin(double dilution, double s0_in, const FoodWeb& web);

// Closed-form verdicts for decay-free webs (wrong_method_error otherwise):
// washout is always stable; a methanogen-free state is stable iff the
// methanogen cannot invade and the state sits on the rising threshold
// branch; coexistence is stable iff the threshold slope is nonnegative or
// the Routh-Hurwitz margin is positive.
StabilityVerdict stability_analytic(const SteadyState& ss, const FoodWeb& web);

// Eigenvalues of the full six-dimensional Jacobian, decay included.
StabilityVerdict stability_numeric(const SteadyState& ss, const FoodWeb& web);

} // namespace chemoweb
