#pragma once

#include <string>

namespace chemoweb {

// Kinetic/stoichiometric parameters of the three-tier chlorophenol -> phenol
// -> hydrogen food web in laboratory units (substrates kgCOD/m^3, rates 1/d).
// Field names double as the keys of the JSON parameter document.
struct FullParameters {
    double km_ch   = 29.0;     // max specific uptake, chlorophenol degrader
    double Ks_ch   = 0.053;    // chlorophenol half-saturation
    double Y_ch    = 0.019;    // chlorophenol degrader yield
    double km_ph   = 26.0;     // max specific uptake, phenol degrader
    double Ks_ph   = 0.302;    // phenol half-saturation
    double Y_ph    = 0.04;     // phenol degrader yield
    double km_h2   = 35.0;     // max specific uptake, hydrogenotrophic methanogen
    double Ks_h2   = 2.5e-5;   // hydrogen half-saturation (methanogen)
    double Ks_h2_c = 1.0e-6;   // hydrogen half-saturation in the dechlorinator's uptake
    double Y_h2    = 0.06;     // methanogen yield
    double Ki_h2   = 3.5e-6;   // hydrogen inhibition constant on the phenol degrader
    double kdec_ch = 0.02;     // decay (maintenance) rates, one per tier
    double kdec_ph = 0.02;
    double kdec_h2 = 0.02;

    // Copy with decay rates zeroed when maintenance is switched off.
    FullParameters with_maintenance(bool on) const;
};

// Same model after the substrate/biomass rescaling that removes the yields
// from the equations.  mu_ch = m0*s0/(K0+s0)*s2/(L0+s2), etc.  omega is the
// fraction of the dechlorinator's substrate flux drawn back out of the
// hydrogen pool; populated steady states require omega < 1.
struct RescaledParameters {
    double m0, K0, L0;      // chlorophenol tier: max rate, substrate and hydrogen half-saturations
    double m1, K1, Ki;      // phenol tier: max rate, half-saturation, hydrogen inhibition
    double m2, K2;          // hydrogen tier: max rate, half-saturation
    double a0, a1, a2;      // decay rates (unchanged by the rescaling)
    double omega;           // hydrogen recycle fraction = y5/(y3*y4)
    double y3y4;            // inflow scale: s0_in = y3y4 * S_ch_in
};

// Stoichiometric COD fractions fixed by the reaction chain (independent of
// the kinetic parameters except through the yields).
double stoich_y3(const FullParameters& p);  // chlorophenol -> phenol
double stoich_y4(const FullParameters& p);  // phenol -> hydrogen
double stoich_y5();                         // hydrogen drawn per chlorophenol

// Validate and map laboratory parameters to the rescaled system.
// Throws invalid_parameter_error on non-positive rates or yields outside (0,1).
RescaledParameters rescale(const FullParameters& p);

// Inflow concentration maps linearly; these are the only unit conversions
// needed by the analysis layer.
double rescale_inflow(double S_ch_in, const RescaledParameters& p);
double unrescale_inflow(double s0_in, const RescaledParameters& p);

// The four parameter sets studied in the operating-diagram analysis.  Case a
// is the nominal set; b/c/d raise the dechlorinator's hydrogen half-saturation
// and (d) also slows the methanogen.
FullParameters preset_case(char tag);              // 'a'..'d'
FullParameters preset_case(const std::string& tag);

// Parse a JSON parameter document.  Omitted fields keep their nominal values;
// "kdec" sets all three decay rates at once and the per-tier keys override it.
// Unknown keys are rejected so typos cannot silently revert to defaults.
FullParameters params_from_json(const std::string& json_text);
FullParameters params_from_json_file(const std::string& path);

std::string params_to_json(const FullParameters& p);

} // namespace chemoweb
