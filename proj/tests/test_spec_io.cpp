#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "diffsearch/errors.hpp"
#include "diffsearch/spec_io.hpp"

#include <cmath>

using namespace diffsearch;

namespace {

const double ln2 = std::log(2.0);

ErrorCode parse_error(const std::string& text) {
    try {
        (void)parse_target_spec(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::BadParams;
}

} // namespace

TEST_CASE("catalog entries survive a spec round trip bit for bit") {
    const std::vector<TargetDistribution> entries{
        catalog("degenerate", {{"A", 1.5}}), catalog("uniform", {{"A", 1.0}}),
        catalog("exponential", {{"lambda", 2.0}}), catalog("gaussian", {{"sigma", 0.7}}),
        catalog("pareto", {{"alpha", 4.0}, {"A0", 1.0}})};
    for (const TargetDistribution& t : entries) {
        const std::string spec = target_spec_json(t);
        const TargetDistribution back = parse_target_spec(spec);
        CHECK(target_spec_json(back) == spec);
        CHECK(report_text(analyze(back, 1.0)) == report_text(analyze(t, 1.0)));
    }
}

TEST_CASE("tabulated and discrete halves round trip") {
    const TargetDistribution t(0.4, HalfSupportMeasure::discrete(Side::negative, {{0.5, 0.25}, {1.5, 0.75}}),
                               HalfSupportMeasure::tabulated(Side::positive, {{0.0, 1.0}, {0.5, 0.6}, {2.0, 0.1}}));
    const std::string spec = target_spec_json(t);
    CHECK(spec.find("-1.5") != std::string::npos);
    const TargetDistribution back = parse_target_spec(spec);
    CHECK(back.p() == 0.4);
    CHECK(back.minus().atoms() == t.minus().atoms());
    CHECK(back.plus().knots() == t.plus().knots());
    CHECK(back.plus().endpoint_atom_mass() == doctest::Approx(0.1));
    CHECK(target_spec_json(back) == spec);
}

TEST_CASE("signed coordinates in specs") {
    const TargetDistribution t = parse_target_spec(R"({"p": 0.5,
        "minus": {"kind": "tabulated", "knots": [[0, 1], [-2, 0]]},
        "plus": {"kind": "discrete", "atoms": [[1, 0.5], [3, 0.5]], "endpoint_atom": 0.5}})");
    CHECK(t.minus().extent() == 2.0);
    CHECK(t.minus().tail(-1.0) == doctest::Approx(0.5));
    CHECK(t.plus().support_bound() == 3.0);
}

TEST_CASE("malformed specs") {
    CHECK(parse_error("not json") == ErrorCode::MalformedSpec);
    CHECK(parse_error("[1, 2]") == ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": 0.5, "minus": {"kind": "closed_form", "family": "uniform", "params": {"A": 1}}})") ==
          ErrorCode::MalformedSpec);
    const std::string uniform = R"({"kind": "closed_form", "family": "uniform", "params": {"A": 1}})";
    CHECK(parse_error(R"({"p": 1.5, "minus": )" + uniform + R"(, "plus": )" + uniform + "}") ==
          ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": "half", "minus": )" + uniform + R"(, "plus": )" + uniform + "}") ==
          ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": 0.5, "minus": {"kind": "weird"}, "plus": )" + uniform + "}") ==
          ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": 0.5, "minus": {"kind": "closed_form", "family": "cauchy"}, "plus": )" + uniform + "}") ==
          ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": 0.5, "minus": {"kind": "closed_form", "family": "uniform", "params": {"A": -1}}, "plus": )" +
                      uniform + "}") == ErrorCode::MalformedSpec);
    // knots on the wrong side of the origin
    CHECK(parse_error(R"({"p": 0.5, "minus": {"kind": "tabulated", "knots": [[0, 1], [2, 0]]}, "plus": )" + uniform +
                      "}") == ErrorCode::MalformedSpec);
    // atoms that do not sum to one
    CHECK(parse_error(R"({"p": 0.5, "minus": )" + uniform +
                      R"(, "plus": {"kind": "discrete", "atoms": [[1, 0.3]]}})") == ErrorCode::MalformedSpec);
    // endpoint atom disagreeing with the knots
    CHECK(parse_error(R"({"p": 0.5, "minus": )" + uniform +
                      R"(, "plus": {"kind": "tabulated", "knots": [[0, 1], [1, 0.2]], "endpoint_atom": 0.5}})") ==
          ErrorCode::MalformedSpec);
    CHECK(parse_error(R"({"p": 0.5, "minus": )" + uniform +
                      R"(, "plus": {"kind": "tabulated", "knots": [[0, 1], [1, 0.2], [0.5, 0]]}})") ==
          ErrorCode::MalformedSpec);
}

TEST_CASE("analysis reports") {
    const AnalysisReport g = analyze(catalog("gaussian", {{"sigma", 1.0}}), 1.0);
    CHECK(g.infimum.verdict == InfimumVerdict::finite);
    CHECK(g.balanced);
    CHECK(g.infimum.value == doctest::Approx(2.0 / ln2 * 2.0 * 0.92191543882745 * 0.92191543882745).epsilon(1e-7));
    CHECK(g.left.status == "infinite");

    const AnalysisReport heavy = analyze(parse_target_spec(R"({"p": 0.5,
        "minus": {"kind": "closed_form", "family": "pareto", "params": {"alpha": 1, "A0": 1}},
        "plus": {"kind": "closed_form", "family": "pareto", "params": {"alpha": 1, "A0": 1}}})"),
                                         1.0);
    CHECK(heavy.infimum.verdict == InfimumVerdict::infinite);
    CHECK(std::isnan(heavy.balance_lhs));

    const AnalysisReport one = analyze(parse_target_spec(R"({"p": 0.5,
        "minus": {"kind": "closed_form", "family": "uniform", "params": {"A": 1}},
        "plus": {"kind": "closed_form", "family": "pareto", "params": {"alpha": 1.5, "A0": 1}}})"),
                                       1.0);
    CHECK(one.infimum.verdict == InfimumVerdict::unknown_one_sided);

    const AnalysisReport unb = analyze(parse_target_spec(R"({"p": 0.3333333333333333,
        "minus": {"kind": "closed_form", "family": "uniform", "params": {"A": 2}},
        "plus": {"kind": "closed_form", "family": "uniform", "params": {"A": 1}}})"),
                                       1.0);
    CHECK(unb.infimum.verdict == InfimumVerdict::unbalanced_bound);
    CHECK(unb.note.find("not the infimum") != std::string::npos);
    CHECK(unb.left.status == "reachable");
    CHECK(report_json(unb).find("\"verdict\": \"unbalanced_bound\"") != std::string::npos);
    CHECK(report_text(unb).find("verdict: unbalanced_bound\n") != std::string::npos);

    // a piecewise-linear tail vanishes to first order at the bound, so the bound is reachable
    const AnalysisReport quad = analyze(parse_target_spec(R"({"p": 0.5,
        "minus": {"kind": "closed_form", "family": "uniform", "params": {"A": 1}},
        "plus": {"kind": "tabulated", "knots": [[0, 1], [0.5, 0.25], [0.75, 0.0625], [0.875, 0.015625], [1, 0]]}})"),
                                        1.0);
    CHECK(quad.right.status == "reachable");
}
