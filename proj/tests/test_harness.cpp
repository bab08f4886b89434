#include "doctest.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sesum/dist.hpp"
#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"
#include "sesum/study.hpp"
#include "sesum/svg.hpp"
#include "sesum/weights.hpp"

using namespace sesum;

namespace {

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1))
        ++count;
    return count;
}

// minimal well-formedness scan: matched tags, one root element, complete decl
bool xml_well_formed(const std::string& s) {
    std::vector<std::string> stack;
    bool seen_root = false;
    std::size_t i = 0;
    while (true) {
        const auto lt = s.find('<', i);
        if (lt == std::string::npos) break;
        if (s.compare(lt, 2, "<?") == 0) {
            const auto end = s.find("?>", lt);
            if (end == std::string::npos) return false;
            i = end + 2;
            continue;
        }
        const auto gt = s.find('>', lt);
        if (gt == std::string::npos) return false;
        if (s[lt + 1] == '/') {
            const std::string name = s.substr(lt + 2, gt - lt - 2);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else {
            std::size_t name_end = lt + 1;
            while (name_end < gt && !std::isspace(static_cast<unsigned char>(s[name_end])) &&
                   s[name_end] != '/')
                ++name_end;
            const std::string name = s.substr(lt + 1, name_end - lt - 1);
            const bool self_closing = s[gt - 1] == '/';
            if (stack.empty()) {
                if (seen_root) return false;
                seen_root = true;
                if (name != "svg") return false;
            }
            if (!self_closing) stack.push_back(name);
        }
        i = gt + 1;
    }
    return stack.empty() && seen_root;
}

// points attribute of the dashed (reference) polyline
std::string dashed_polyline_points(const std::string& svg) {
    const auto dash = svg.find("stroke-dasharray");
    if (dash == std::string::npos) return "";
    const auto tag_start = svg.rfind("<polyline", dash);
    if (tag_start == std::string::npos) return "";
    const auto tag_end = svg.find('>', tag_start);
    std::string tag = svg.substr(tag_start, tag_end - tag_start);
    const auto p = tag.find("points=\"");
    if (p == std::string::npos) return "";
    const auto q = tag.find('"', p + 8);
    return tag.substr(p + 8, q - p - 8);
}

StudyRow make_row(std::size_t n, double norm, double pred, const std::string& est) {
    StudyRow row{};
    row.n = n;
    row.a_max = 1.0 / static_cast<double>(n);
    row.sum_weights = 1.0;
    row.x = 3.0;
    row.estimator = est;
    row.normalized_rate = norm;
    row.predicted_rate = pred;
    row.log_p_hat = norm / std::sqrt(row.a_max);
    row.p_hat = std::exp(row.log_p_hat);
    row.samples = 1000;
    row.seed = 1;
    return row;
}

} // namespace

TEST_CASE("config text parses every accepted key") {
    const std::string text =
        "# full example\n"
        "dist.kappa = 2.0\n"
        "dist.r = 0.4\n"
        "family.kind = remainder\n"
        "family.p = 2.5\n"
        "study.x = 4.0   # comments strip mid-line too\n"
        "study.n_grid = 10, 20 40\n"
        "study.samples = 5000\n"
        "study.estimator = both\n"
        "study.seed = 99\n"
        "study.truncation_tol = 1e-4\n"
        "bounds.epsilon = 0.2\n"
        "bounds.quad_rel_tol = 1e-8\n";
    const ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.dist.kappa == 2.0);
    CHECK(cfg.dist.r == 0.4);
    CHECK(cfg.x == 4.0);
    CHECK(cfg.n_grid == std::vector<std::size_t>{10, 20, 40});
    CHECK(cfg.samples == 5000);
    CHECK(cfg.estimator == EstimatorChoice::both);
    CHECK(cfg.seed == 99);
    CHECK(cfg.truncation_tol == 1e-4);
    CHECK(cfg.effective_truncation_tol() == 1e-4);
    CHECK(cfg.bounds.epsilon == 0.2);
    CHECK(cfg.bounds.quad_rel_tol == 1e-8);
    // the decay exponent reached the family: a_max(n) = n^{-p} / zeta_tail(p, n)
    const WeightVector wv = realize(cfg.family, 10, 1e-2);
    CHECK(wv.a_max ==
          doctest::Approx(std::pow(10.0, -2.5) / zeta_tail(2.5, 10)).epsilon(1e-12));
}

TEST_CASE("config text defaults survive a minimal input") {
    const ExperimentConfig cfg = parse_config_text("study.n_grid = 50\n");
    CHECK(cfg.dist.kappa == 1.0);
    CHECK(cfg.dist.r == 0.5);
    CHECK(cfg.x == 3.0);
    CHECK(cfg.samples == 100000);
    CHECK(cfg.estimator == EstimatorChoice::largest_jump);
    CHECK(cfg.seed == 1);
    CHECK(cfg.truncation_tol == 0.0);
    // automatic truncation tolerance scales with the regime gap: 1e-9 * (x - 2) / 2
    CHECK(cfg.effective_truncation_tol() == doctest::Approx(5e-10).epsilon(1e-12));
    CHECK(limit_sum(cfg.family).value == 1.0);
    CHECK(realize(cfg.family, 4, 0.0).a_max == 0.25);
    CHECK(parse_config_text("").n_grid.empty());
}

TEST_CASE("config text rejects malformed and out-of-regime input") {
    CHECK_THROWS_WITH_AS(parse_config_text("study.x = 3\nstudy.x = 4\n"),
                         "config: duplicate key study.x", config_error);
    CHECK_THROWS_WITH_AS(parse_config_text("study.foo = 1\n"),
                         "config: unknown key study.foo", config_error);
    CHECK_THROWS_WITH_AS(parse_config_text("study.n_grid = 100 25\n"),
                         "study.n_grid must be strictly increasing", config_error);
    CHECK_THROWS_WITH_AS(parse_config_text("study.n_grid = 50 50\n"),
                         "study.n_grid must be strictly increasing", config_error);
    // default family/dist have D*E[X] = 2; x must exceed it already at load time
    CHECK_THROWS_WITH_AS(parse_config_text("study.x = 2\n"),
                         "study.x must exceed D*E[X] = 2", config_error);
    CHECK_THROWS_AS(parse_config_text("dist.kappa = abc\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("dist.kappa 2\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("study.x =\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("study.samples = abc\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("study.estimator = fastest\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("family.kind = zeta\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("family.kind = explicit\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("dist.r = 1.5\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("dist.r = 1.0\n"), config_error);
}

TEST_CASE("config files parse like config text") {
    const std::string path = "/tmp/sesum_test_config.txt";
    {
        std::ofstream out(path);
        out << "study.x = 4.5\nstudy.n_grid = 5\n";
    }
    const ExperimentConfig cfg = parse_config_file(path);
    CHECK(cfg.x == 4.5);
    CHECK(cfg.n_grid == std::vector<std::size_t>{5});
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_config_file("/tmp/sesum_no_such_config.txt"), config_error);
}

TEST_CASE("run_study validates the experiment before sampling") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run_study(cfg), config_error); // empty n_grid
    cfg.n_grid = {4, 8};
    cfg.samples = 0;
    CHECK_THROWS_AS(run_study(cfg), config_error);
    cfg.samples = 100;
    cfg.x = 2.0; // not above D*E[X]
    CHECK_THROWS_AS(run_study(cfg), config_error);
}

TEST_CASE("a small study produces coherent rows, csv and summary") {
    ExperimentConfig cfg;
    cfg.n_grid = {4, 8};
    cfg.samples = 4000;
    cfg.estimator = EstimatorChoice::both;
    cfg.seed = 7;
    const StudyResult res = run_study(cfg);
    REQUIRE(res.rows.size() == 4);
    CHECK(res.rows[0].n == 4);
    CHECK(res.rows[0].estimator == "naive");
    CHECK(res.rows[1].n == 4);
    CHECK(res.rows[1].estimator == "largest_jump");
    CHECK(res.rows[2].n == 8);
    CHECK(res.rows[3].n == 8);
    for (const StudyRow& row : res.rows) {
        CHECK(row.x == 3.0);
        CHECK(row.samples == 4000);
        CHECK(row.seed == 7);
        CHECK(row.a_max == doctest::Approx(1.0 / static_cast<double>(row.n)).epsilon(1e-15));
        CHECK(row.sum_weights == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(row.predicted_rate == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(row.p_hat > 0.0);
        CHECK(row.normalized_rate ==
              doctest::Approx(pow_r(row.a_max, 0.5) * row.log_p_hat).epsilon(1e-12));
        // certified bounds must bracket the estimate up to sampling error
        const double logslack = 4.0 * row.std_err / row.p_hat;
        CHECK(row.log_lower_bound <= row.log_p_hat + logslack);
        CHECK(row.log_p_hat - logslack <= row.log_upper_bound);
        CHECK(row.elapsed_seconds >= 0.0);
    }
    // bounds depend on n only: shared across the two estimator rows
    CHECK(res.rows[0].log_upper_bound == res.rows[1].log_upper_bound);
    CHECK(res.rows[0].log_lower_bound == res.rows[1].log_lower_bound);

    double gap = 0.0;
    for (const StudyRow& row : res.rows)
        if (row.n == 8)
            gap = std::max(gap, std::fabs(row.normalized_rate - row.predicted_rate) /
                                    std::fabs(row.predicted_rate));
    CHECK(res.max_rel_gap_at_final_n == doctest::Approx(gap).epsilon(1e-15));
    CHECK(res.summary ==
          "final n = 8: max |normalized_rate - predicted|/|predicted| = " + format_double(gap));

    const std::string csv = study_csv(res.rows);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "n,a_max,sum_weights,x,estimator,p_hat,stderr,log_p_hat,normalized_rate,"
          "predicted_rate,log_lower_bound,log_upper_bound,samples,elapsed_seconds,seed");
    // timing is suppressed by default so output is reproducible
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    std::size_t data_lines = 0;
    while (std::getline(lines, line)) {
        ++data_lines;
        std::vector<std::string> fields;
        std::istringstream fs(line);
        std::string f;
        while (std::getline(fs, f, ',')) fields.push_back(f);
        REQUIRE(fields.size() == 15);
        CHECK(fields[13] == "0");
    }
    CHECK(data_lines == 4);

    // identical configs give byte-identical csv regardless of worker count
    const StudyResult rerun = run_study(cfg, 3);
    CHECK(study_csv(rerun.rows) == csv);

    // round trip of the replot-relevant columns
    const std::vector<StudyRow> parsed = parse_study_csv(csv);
    REQUIRE(parsed.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(parsed[i].n == res.rows[i].n);
        CHECK(parsed[i].estimator == res.rows[i].estimator);
        CHECK(parsed[i].normalized_rate == res.rows[i].normalized_rate);
        CHECK(parsed[i].predicted_rate == res.rows[i].predicted_rate);
    }

    // the study rows plot directly: reference line plus one polyline per estimator
    const SvgChart chart = emit_svg(res.rows);
    CHECK(chart.notices.empty());
    CHECK(xml_well_formed(chart.svg));
    CHECK(count_occurrences(chart.svg, "<polyline") == 3);
    CHECK(count_occurrences(chart.svg, "<circle") == 4);
}

TEST_CASE("csv parsing is header-driven and rejects incomplete input") {
    const std::vector<StudyRow> rows =
        parse_study_csv("n,estimator,normalized_rate,predicted_rate\n4,naive,-0.5,-1\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 4);
    CHECK(rows[0].estimator == "naive");
    CHECK(rows[0].normalized_rate == -0.5);
    CHECK(rows[0].predicted_rate == -1.0);

    CHECK_THROWS_AS(parse_study_csv(""), config_error);
    CHECK_THROWS_AS(parse_study_csv("n,estimator,normalized_rate\n4,naive,-0.5\n"), config_error);
    CHECK_THROWS_AS(
        parse_study_csv("n,estimator,normalized_rate,predicted_rate\n4,naive,-0.5\n"),
        config_error);

    // infinities survive the round trip
    StudyRow row = make_row(25, -std::numeric_limits<double>::infinity(), -1.0, "largest_jump");
    const std::vector<StudyRow> back = parse_study_csv(study_csv({row}));
    REQUIRE(back.size() == 1);
    CHECK(std::isinf(back[0].normalized_rate));
    CHECK(back[0].normalized_rate < 0.0);
}

TEST_CASE("format_double is 17-digit round-trippable shorthand") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-1.0) == "-1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {3.141592653589793, -2.2250738585072014e-308, 1.7976931348623157e308}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("svg chart: reference line, one polyline per estimator, point markers") {
    std::vector<StudyRow> rows;
    rows.push_back(make_row(10, -0.5, -1.0, "largest_jump"));
    rows.push_back(make_row(100, -0.7, -1.0, "largest_jump"));
    rows.push_back(make_row(1000, -0.8, -1.0, "largest_jump"));
    rows.push_back(make_row(10000, -0.9, -1.0, "largest_jump"));
    const SvgChart chart = emit_svg(rows);
    CHECK(chart.notices.empty());
    CHECK_FALSE(chart.svg.empty());
    CHECK(xml_well_formed(chart.svg));
    CHECK(count_occurrences(chart.svg, "<polyline") == 2);
    CHECK(count_occurrences(chart.svg, "<circle") == 4);
    CHECK(chart.svg.find("reference -1") != std::string::npos);
    CHECK(chart.svg.find("largest_jump") != std::string::npos);

    // the reference polyline is dashed and horizontal
    std::string pts = dashed_polyline_points(chart.svg);
    REQUIRE_FALSE(pts.empty());
    for (char& c : pts)
        if (c == ',') c = ' ';
    std::istringstream in(pts);
    double xx, yy, y0;
    REQUIRE((in >> xx >> y0));
    std::size_t npts = 1;
    while (in >> xx >> yy) {
        ++npts;
        CHECK(yy == doctest::Approx(y0).epsilon(1e-12));
    }
    CHECK(npts >= 2);

    // deterministic output
    CHECK(emit_svg(rows).svg == chart.svg);

    // a non-finite row is skipped with a notice, not plotted
    rows.push_back(make_row(20000, std::nan(""), -1.0, "largest_jump"));
    const SvgChart chart2 = emit_svg(rows);
    REQUIRE(chart2.notices.size() == 1);
    CHECK(chart2.notices[0] ==
          "skipped n=20000 estimator=largest_jump: normalized_rate is not finite");
    CHECK(count_occurrences(chart2.svg, "<polyline") == 2);
    CHECK(count_occurrences(chart2.svg, "<circle") == 4);
    CHECK(xml_well_formed(chart2.svg));
}

TEST_CASE("svg chart needs two plottable rows") {
    std::vector<StudyRow> one;
    one.push_back(make_row(10, -0.5, -1.0, "naive"));
    const SvgChart c1 = emit_svg(one);
    CHECK(c1.svg.empty());
    REQUIRE(c1.notices.size() == 1);
    CHECK(c1.notices[0] == "chart skipped: need at least two plottable rows, have 1");

    const SvgChart c0 = emit_svg({});
    CHECK(c0.svg.empty());
    REQUIRE(c0.notices.size() == 1);
    CHECK(c0.notices[0] == "chart skipped: need at least two plottable rows, have 0");
}
