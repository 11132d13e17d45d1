#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "params.hpp"

namespace chemoweb {

// Growth kinetics of the three tiers in rescaled units.  The analysis layer
// only touches the model through this interface, so any kinetics satisfying
// the qualitative assumptions checked by check_growth_assumptions() can be
// swapped in.  Defaults provide bracketed-bisection inverses and
// central-difference partials; saturation limits must be supplied because
// they cannot be sampled at infinity.
class GrowthModel {
public:
    virtual ~GrowthModel() = default;

    // Specific growth rates (1/d).  s_ch/s_ph/s_h2 are the rescaled
    // chlorophenol, phenol and hydrogen concentrations; all must be >= 0.
    virtual double mu_ch(double s_ch, double s_h2) const = 0;  // hydrogen-limited as well
    virtual double mu_ph(double s_ph, double s_h2) const = 0;  // hydrogen-inhibited
    virtual double mu_h2(double s_h2) const = 0;

    // Limits as the tier's own substrate -> infinity, at fixed hydrogen.
    virtual double mu_ch_sat(double s_h2) const = 0;
    virtual double mu_ph_sat(double s_h2) const = 0;
    virtual double mu_h2_sat() const = 0;
    // Limit of mu_ch_sat as hydrogen also -> infinity.
    virtual double mu_ch_sup() const = 0;

    // Partial derivatives; overridden analytically by Monod, otherwise
    // central differences with step max(1e-8, 1e-6*|s|).
    virtual double dmu_ch_ds_ch(double s_ch, double s_h2) const;
    virtual double dmu_ch_ds_h2(double s_ch, double s_h2) const;
    virtual double dmu_ph_ds_ph(double s_ph, double s_h2) const;
    virtual double dmu_ph_ds_h2(double s_ph, double s_h2) const;
    virtual double dmu_h2_ds_h2(double s_h2) const;

    // Substrate level at which the tier grows at `rate`, hydrogen fixed.
    // Throws no_solution_error when rate is at or above the saturation limit,
    // invalid_parameter_error for negative arguments.
    virtual double invert_mu_ch(double rate, double s_h2) const;
    virtual double invert_mu_ph(double rate, double s_h2) const;
    virtual double invert_mu_h2(double rate) const;

    // Hydrogen levels where the saturated rates hit `rate`: mu_ch_sat is
    // increasing in hydrogen, mu_ph_sat decreasing.  These bound the hydrogen
    // window on which populated steady states can exist.
    virtual double h2_where_ch_sat_equals(double rate) const;
    virtual double h2_where_ph_sat_equals(double rate) const;

    // Closed-form dilution at which the hydrogen window closes, when the
    // model has one (Monod does).  Generic models fall back to bisection.
    virtual double window_closure_dilution_closed_form(double a_ch, double a_ph) const;
    virtual bool has_window_closure_closed_form() const { return false; }
};

// Double-Monod kinetics with hydrogen activation on the chlorophenol tier and
// hydrogen product inhibition on the phenol tier; plain Monod on hydrogen.
class MonodGrowth final : public GrowthModel {
public:
    explicit MonodGrowth(const RescaledParameters& p);

    double mu_ch(double s_ch, double s_h2) const override;
    double mu_ph(double s_ph, double s_h2) const override;
    double mu_h2(double s_h2) const override;

    double mu_ch_sat(double s_h2) const override;
    double mu_ph_sat(double s_h2) const override;
    double mu_h2_sat() const override;
    double mu_ch_sup() const override;

    double dmu_ch_ds_ch(double s_ch, double s_h2) const override;
    double dmu_ch_ds_h2(double s_ch, double s_h2) const override;
    double dmu_ph_ds_ph(double s_ph, double s_h2) const override;
    double dmu_ph_ds_h2(double s_ph, double s_h2) const override;
    double dmu_h2_ds_h2(double s_h2) const override;

    double invert_mu_ch(double rate, double s_h2) const override;
    double invert_mu_ph(double rate, double s_h2) const override;
    double invert_mu_h2(double rate) const override;

    double h2_where_ch_sat_equals(double rate) const override;
    double h2_where_ph_sat_equals(double rate) const override;

    double window_closure_dilution_closed_form(double a_ch, double a_ph) const override;
    bool has_window_closure_closed_form() const override { return true; }

private:
    RescaledParameters p_;
};

// The rescaled food web the analysis layer operates on: kinetics plus the
// three decay rates and the hydrogen recycle fraction.
struct FoodWeb {
    const GrowthModel* growth = nullptr;
    double omega = 0.0;
    double a_ch = 0.0, a_ph = 0.0, a_h2 = 0.0;
};

// Owning bundle of a Monod food web built from laboratory parameters.
struct MonodFoodWeb {
    RescaledParameters p;
    std::unique_ptr<MonodGrowth> growth;
    FoodWeb web;

    explicit MonodFoodWeb(const FullParameters& full);
};

// One qualitative assumption on the kinetics, checked by sampling values and
// derivatives over a logarithmic substrate grid.
struct GrowthAssumption {
    std::string name;
    bool passed = true;
    std::string note;  // first violation found, if any
};

struct GrowthAssumptionReport {
    std::vector<GrowthAssumption> assumptions;  // fixed order, 8 entries
    bool all_passed() const;
};

// Sign checks of H-type growth assumptions: rates vanish without substrate,
// are positive and finite otherwise, monotone the right way in each argument,
// saturation limits monotone, and the inflow-threshold function unimodal on
// the hydrogen window (the last one needs the food-web context).
GrowthAssumptionReport check_growth_assumptions(const FoodWeb& web, int grid_points = 20);

} // namespace chemoweb
