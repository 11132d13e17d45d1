#include "params.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace chemoweb {

using nlohmann::json;

FullParameters FullParameters::with_maintenance(bool on) const {
    FullParameters q = *this;
    if (!on) {
        q.kdec_ch = 0.0;
        q.kdec_ph = 0.0;
        q.kdec_h2 = 0.0;
    }
    return q;
}

double stoich_y3(const FullParameters& p) { return 224.0 / 208.0 * (1.0 - p.Y_ch); }
double stoich_y4(const FullParameters& p) { return 32.0 / 224.0 * (1.0 - p.Y_ph); }
double stoich_y5() { return 16.0 / 208.0; }

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw invalid_parameter_error(std::string(name) + " must be positive and finite");
}

void require_yield(double v, const char* name) {
    // Yields of exactly 0 or 1 make the rescaling singular (division by 1-Y
    // or by Y), so the open interval is enforced.
    if (!(v > 0.0 && v < 1.0))
        throw invalid_parameter_error(std::string(name) + " must lie strictly between 0 and 1");
}

void require_decay(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw invalid_parameter_error(std::string(name) + " must be >= 0 and finite");
}

} // namespace

RescaledParameters rescale(const FullParameters& p) {
    require_positive(p.km_ch, "km_ch");
    require_positive(p.Ks_ch, "Ks_ch");
    require_positive(p.km_ph, "km_ph");
    require_positive(p.Ks_ph, "Ks_ph");
    require_positive(p.km_h2, "km_h2");
    require_positive(p.Ks_h2, "Ks_h2");
    require_positive(p.Ks_h2_c, "Ks_h2_c");
    require_positive(p.Ki_h2, "Ki_h2");
    require_yield(p.Y_ch, "Y_ch");
    require_yield(p.Y_ph, "Y_ph");
    require_yield(p.Y_h2, "Y_h2");
    require_decay(p.kdec_ch, "kdec_ch");
    require_decay(p.kdec_ph, "kdec_ph");
    require_decay(p.kdec_h2, "kdec_h2");

    const double y3 = stoich_y3(p);
    const double y4 = stoich_y4(p);
    const double y5 = stoich_y5();

    RescaledParameters r{};
    r.m0 = p.Y_ch * p.km_ch;
    r.K0 = y3 * y4 * p.Ks_ch;
    r.L0 = p.Ks_h2_c;
    r.m1 = p.Y_ph * p.km_ph;
    r.K1 = y4 * p.Ks_ph;
    r.Ki = p.Ki_h2;
    r.m2 = p.Y_h2 * p.km_h2;
    r.K2 = p.Ks_h2;
    r.a0 = p.kdec_ch;
    r.a1 = p.kdec_ph;
    r.a2 = p.kdec_h2;
    r.y3y4 = y3 * y4;
    r.omega = y5 / r.y3y4;
    return r;
}

double rescale_inflow(double S_ch_in, const RescaledParameters& p) { return p.y3y4 * S_ch_in; }
double unrescale_inflow(double s0_in, const RescaledParameters& p) { return s0_in / p.y3y4; }

FullParameters preset_case(char tag) {
    FullParameters p;  // nominal values = case a
    switch (tag) {
    case 'a':
        break;
    case 'b':
        p.Ks_h2_c = 4.0e-6;
        break;
    case 'c':
        p.Ks_h2_c = 7.0e-6;
        break;
    case 'd':
        p.Ks_h2_c = 1.2e-5;
        p.Ks_h2 = 0.5e-5;
        p.km_h2 = 5.0;
        break;
    default:
        throw invalid_parameter_error(std::string("unknown case preset '") + tag +
                                      "' (expected a, b, c or d)");
    }
    return p;
}

FullParameters preset_case(const std::string& tag) {
    if (tag.size() != 1)
        throw invalid_parameter_error("unknown case preset '" + tag + "' (expected a, b, c or d)");
    return preset_case(tag[0]);
}

FullParameters params_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("parameter document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw parse_error("parameter document must be a JSON object");

    FullParameters p;
    static const std::set<std::string> known = {
        "km_ch", "Ks_ch", "Y_ch", "km_ph", "Ks_ph", "Y_ph", "km_h2", "Ks_h2",
        "Ks_h2_c", "Y_h2", "Ki_h2", "kdec", "kdec_ch", "kdec_ph", "kdec_h2"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key))
            throw parse_error("unknown parameter key '" + key + "'");
        if (!value.is_number())
            throw parse_error("parameter '" + key + "' must be a number");
    }

    auto get = [&](const char* key, double fallback) {
        return doc.contains(key) ? doc[key].get<double>() : fallback;
    };
    p.km_ch = get("km_ch", p.km_ch);
    p.Ks_ch = get("Ks_ch", p.Ks_ch);
    p.Y_ch = get("Y_ch", p.Y_ch);
    p.km_ph = get("km_ph", p.km_ph);
    p.Ks_ph = get("Ks_ph", p.Ks_ph);
    p.Y_ph = get("Y_ph", p.Y_ph);
    p.km_h2 = get("km_h2", p.km_h2);
    p.Ks_h2 = get("Ks_h2", p.Ks_h2);
    p.Ks_h2_c = get("Ks_h2_c", p.Ks_h2_c);
    p.Y_h2 = get("Y_h2", p.Y_h2);
    p.Ki_h2 = get("Ki_h2", p.Ki_h2);
    if (doc.contains("kdec")) {
        const double k = doc["kdec"].get<double>();
        p.kdec_ch = p.kdec_ph = p.kdec_h2 = k;
    }
    p.kdec_ch = get("kdec_ch", p.kdec_ch);
    p.kdec_ph = get("kdec_ph", p.kdec_ph);
    p.kdec_h2 = get("kdec_h2", p.kdec_h2);
    return p;
}

FullParameters params_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open parameter file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

std::string params_to_json(const FullParameters& p) {
    json doc;
    doc["km_ch"] = p.km_ch;
    doc["Ks_ch"] = p.Ks_ch;
    doc["Y_ch"] = p.Y_ch;
    doc["km_ph"] = p.km_ph;
    doc["Ks_ph"] = p.Ks_ph;
    doc["Y_ph"] = p.Y_ph;
    doc["km_h2"] = p.km_h2;
    doc["Ks_h2"] = p.Ks_h2;
    doc["Ks_h2_c"] = p.Ks_h2_c;
    doc["Y_h2"] = p.Y_h2;
    doc["Ki_h2"] = p.Ki_h2;
    doc["kdec_ch"] = p.kdec_ch;
    doc["kdec_ph"] = p.kdec_ph;
    doc["kdec_h2"] = p.kdec_h2;
    return doc.dump(2);
}

} // namespace chemoweb
