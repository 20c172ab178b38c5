#include "diffsearch/spec_io.hpp"

#include "diffsearch/drift.hpp"
#include "diffsearch/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace diffsearch {

namespace {

using json = nlohmann::json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedSpec, what); }

double number(const json& j, const std::string& where) {
    if (!j.is_number()) malformed(where + " must be a number");
    return j.get<double>();
}

std::vector<std::pair<double, double>> pairs(const json& j, Side side, const std::string& where) {
    if (!j.is_array()) malformed(where + " must be an array of [x, value] pairs");
    std::vector<std::pair<double, double>> out;
    for (const json& item : j) {
        if (!item.is_array() || item.size() != 2) malformed(where + " entries must be [x, value] pairs");
        const double x = number(item[0], where);
        const double v = number(item[1], where);
        if (side == Side::negative ? x > 0.0 : x < 0.0)
            malformed(where + " coordinates must lie on the " + to_string(side) + " side");
        out.emplace_back(std::fabs(x), v);
    }
    return out;
}

HalfSupportMeasure parse_half(const json& j, Side side) {
    const std::string where = side == Side::negative ? "minus" : "plus";
    if (!j.is_object()) malformed(where + " must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) malformed(where + ".kind is required");
    const std::string kind = j["kind"].get<std::string>();
    const double atom = j.contains("endpoint_atom") ? number(j["endpoint_atom"], where + ".endpoint_atom") : nan;

    auto check_atom = [&](const HalfSupportMeasure& m) {
        if (!std::isnan(atom) && std::fabs(atom - m.endpoint_atom_mass()) > 1e-12)
            malformed(where + ".endpoint_atom disagrees with the mass at the support bound");
        return m;
    };
    try {
        if (kind == "closed_form") {
            if (!j.contains("family") || !j["family"].is_string()) malformed(where + ".family is required");
            const Family family = family_from_string(j["family"].get<std::string>());
            ParamMap params;
            if (j.contains("params")) {
                if (!j["params"].is_object()) malformed(where + ".params must be an object");
                for (const auto& [key, value] : j["params"].items()) params[key] = number(value, where + ".params." + key);
            }
            return check_atom(family_half(side, family, params));
        }
        if (kind == "tabulated") {
            if (!j.contains("knots")) malformed(where + ".knots is required");
            return check_atom(HalfSupportMeasure::tabulated(side, pairs(j["knots"], side, where + ".knots")));
        }
        if (kind == "discrete") {
            if (!j.contains("atoms")) malformed(where + ".atoms is required");
            return check_atom(HalfSupportMeasure::discrete(side, pairs(j["atoms"], side, where + ".atoms")));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedSpec) throw;
        malformed(where + ": " + e.what());
    }
    malformed(where + ".kind must be closed_form, tabulated or discrete");
}

json half_json(const HalfSupportMeasure& m) {
    const double sign = m.side() == Side::negative ? -1.0 : 1.0;
    json j;
    j["kind"] = to_string(m.kind());
    switch (m.kind()) {
    case MeasureKind::closed_form: {
        if (!m.family() || m.family()->family == Family::custom)
            throw Error(ErrorCode::BadParams, "a half built from functions has no spec form");
        j["family"] = to_string(m.family()->family);
        j["params"] = m.family()->values;
        break;
    }
    case MeasureKind::tabulated: {
        json knots = json::array();
        for (const auto& [r, tail] : m.knots()) knots.push_back({r == 0.0 ? 0.0 : sign * r, tail});
        j["knots"] = knots;
        break;
    }
    case MeasureKind::discrete: {
        json atoms = json::array();
        for (const auto& [r, mass] : m.atoms()) atoms.push_back({sign * r, mass});
        j["atoms"] = atoms;
        break;
    }
    }
    j["endpoint_atom"] = m.endpoint_atom_mass();
    return j;
}

EndpointReport endpoint(const HalfSupportMeasure& m, const QuadConfig& cfg) {
    const double bound = m.support_bound();
    if (!std::isfinite(bound)) return {bound, "infinite"};
    return {bound, to_string(reachability(m, cfg))};
}

// JSON has no infinities or NaN; they are written as strings.
json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json quad_json(const QuadResult& q) {
    return {{"value", num(q.value)}, {"error", num(q.abs_error_estimate)}, {"converged", q.converged},
            {"diverged", q.diverged}};
}

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

TargetDistribution parse_target_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        malformed(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) malformed("target spec must be a JSON object");
    for (const char* key : {"p", "minus", "plus"})
        if (!j.contains(key)) malformed(std::string("missing field ") + key);
    const double p = number(j["p"], "p");
    HalfSupportMeasure minus = parse_half(j["minus"], Side::negative);
    HalfSupportMeasure plus = parse_half(j["plus"], Side::positive);
    try {
        return TargetDistribution(p, std::move(minus), std::move(plus));
    } catch (const Error& e) {
        malformed(e.what());
    }
}

TargetDistribution load_target_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) malformed("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_target_spec(os.str());
}

std::string target_spec_json(const TargetDistribution& t) {
    const json j{{"p", t.p()}, {"minus", half_json(t.minus())}, {"plus", half_json(t.plus())}};
    return j.dump(2);
}

AnalysisReport analyze(const TargetDistribution& t, double D, const QuadConfig& cfg) {
    AnalysisReport r;
    r.p = t.p();
    r.diffusion = D;
    r.infimum = infimum_value(t, D, cfg);
    r.integrals = r.infimum.integrals;
    for (const QuadResult* q : {&r.integrals.minus_integral, &r.integrals.plus_integral})
        if (!q->converged && !q->diverged)
            throw Error(ErrorCode::BudgetExhausted, "a sqrt-tail integral neither converged nor diverged");
    r.balance_rhs = balance_rhs(t.p());
    r.balance_lhs = nan;
    r.balanced = false;
    if (!r.integrals.minus_integral.diverged && !r.integrals.plus_integral.diverged) {
        r.balance_lhs = r.integrals.plus_integral.value / r.integrals.minus_integral.value;
        r.balanced = r.infimum.verdict == InfimumVerdict::finite;
    }
    switch (r.infimum.verdict) {
    case InfimumVerdict::finite: r.note = "infimum, attained when both halves have densities"; break;
    case InfimumVerdict::infinite: r.note = "every admissible drift has infinite expected search time"; break;
    case InfimumVerdict::unknown_one_sided: r.note = "exactly one sqrt-tail integral diverges; the infimum is not known"; break;
    case InfimumVerdict::unbalanced_bound: r.note = "strict upper bound, not the infimum"; break;
    }
    r.left = endpoint(t.minus(), cfg);
    r.right = endpoint(t.plus(), cfg);
    r.avgdist_bound = avgdist_lower_bound(t, D, cfg);
    return r;
}

std::string report_json(const AnalysisReport& r) {
    const json j{
        {"p", r.p},
        {"diffusion", r.diffusion},
        {"balance", {{"ratio", num(r.balance_lhs)}, {"target", num(r.balance_rhs)}, {"balanced", r.balanced}}},
        {"infimum", num(r.infimum.value)},
        {"verdict", to_string(r.infimum.verdict)},
        {"note", r.note},
        {"decomposition", {{"minus", num(r.infimum.minus_term)}, {"plus", num(r.infimum.plus_term)}}},
        {"sqrt_tail_integrals", {{"minus", quad_json(r.integrals.minus_integral)}, {"plus", quad_json(r.integrals.plus_integral)}}},
        {"reachability",
         {{"left", {{"bound", num(r.left.bound)}, {"status", r.left.status}}},
          {"right", {{"bound", num(r.right.bound)}, {"status", r.right.status}}}}},
        {"avgdist_lower_bound", num(r.avgdist_bound)},
    };
    return j.dump(2);
}

std::string report_text(const AnalysisReport& r) {
    std::ostringstream os;
    os << "p: " << g17(r.p) << "\n";
    os << "diffusion: " << g17(r.diffusion) << "\n";
    os << "sqrt_tail_minus: " << g17(r.integrals.minus_integral.value)
       << (r.integrals.minus_integral.diverged ? " (diverged)" : "") << "\n";
    os << "sqrt_tail_plus: " << g17(r.integrals.plus_integral.value)
       << (r.integrals.plus_integral.diverged ? " (diverged)" : "") << "\n";
    os << "balance_ratio: " << g17(r.balance_lhs) << "\n";
    os << "balance_target: " << g17(r.balance_rhs) << "\n";
    os << "balanced: " << (r.balanced ? "yes" : "no") << "\n";
    os << "verdict: " << to_string(r.infimum.verdict) << "\n";
    os << "value: " << g17(r.infimum.value) << "\n";
    os << "note: " << r.note << "\n";
    os << "minus_term: " << g17(r.infimum.minus_term) << "\n";
    os << "plus_term: " << g17(r.infimum.plus_term) << "\n";
    os << "left_endpoint: " << g17(r.left.bound) << " " << r.left.status << "\n";
    os << "right_endpoint: " << g17(r.right.bound) << " " << r.right.status << "\n";
    os << "avgdist_lower_bound: " << g17(r.avgdist_bound) << "\n";
    return os.str();
}

} // namespace diffsearch
