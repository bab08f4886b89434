// Command-line front end: exceedance tails, decay rates, certified bounds,
// rare-event estimates, full n-grid studies and SVG charts.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "sesum/errors.hpp"
#include "sesum/mc.hpp"
#include "sesum/study.hpp"
#include "sesum/svg.hpp"
#include "sesum/theory.hpp"

namespace {

using namespace sesum;

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << content;
}

WeightVector realize_for(const ExperimentConfig& cfg, std::size_t n) {
    return realize(cfg.family, n, cfg.effective_truncation_tol());
}

int run(int argc, char** argv) {
    CLI::App app{"weighted-sum rare-event toolkit for stretched-exponential tails"};
    app.require_subcommand(1);

    double kappa = 1.0, r = 0.5, t = 1.0, x = 3.0, D = 1.0;
    std::string config_path, out_path, in_path, svg_path;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::uint64_t samples = 0;
    std::size_t n_override = 0;
    int workers = 0;
    bool timings = false;
    std::string estimator_name;

    auto* c_tail = app.add_subcommand("tail", "P(X > t) for the stretched-exponential law");
    c_tail->add_option("--kappa", kappa, "tail exponent scale")->check(CLI::PositiveNumber);
    c_tail->add_option("--r", r, "tail exponent power, in (0,1)");
    c_tail->add_option("--t", t, "threshold")->required();

    auto* c_rate = app.add_subcommand("rate", "limiting decay rate kappa*(x - D*E[X])^r");
    c_rate->add_option("--kappa", kappa, "tail exponent scale")->check(CLI::PositiveNumber);
    c_rate->add_option("--r", r, "tail exponent power, in (0,1)");
    c_rate->add_option("--x", x, "threshold")->required();
    c_rate->add_option("--D", D, "limit of the weight sums");

    auto* c_bounds = app.add_subcommand("bounds", "certified finite-n bounds on log P(sum > x)");
    c_bounds->add_option("--config", config_path, "experiment config file")->required();
    c_bounds->add_option("--n", n_override, "weight family size (default: first study.n_grid entry)");

    auto* c_est = app.add_subcommand("estimate", "one rare-event estimate");
    c_est->add_option("--config", config_path, "experiment config file")->required();
    c_est->add_option("--n", n_override, "weight family size (default: first study.n_grid entry)");
    c_est->add_option("--estimator", estimator_name, "naive | largest_jump (default: from config)");
    c_est->add_option("--samples", samples, "override study.samples");
    c_est->add_option("--seed", seed, "override study.seed")->each([&](const std::string&) { have_seed = true; });
    c_est->add_option("--workers", workers, "worker threads (affects wall time only)");

    auto* c_study = app.add_subcommand("study", "run the full n-grid study and emit CSV");
    c_study->add_option("--config", config_path, "experiment config file")->required();
    c_study->add_option("--out", out_path, "CSV output path (default: stdout)");
    c_study->add_option("--svg", svg_path, "also write an SVG chart here");
    c_study->add_option("--seed", seed, "override study.seed")->each([&](const std::string&) { have_seed = true; });
    c_study->add_option("--workers", workers, "worker threads (affects wall time only)");
    c_study->add_flag("--timings", timings, "write wall-clock timings into the CSV (breaks bit-reproducibility)");

    auto* c_svg = app.add_subcommand("svg", "chart normalized rates from a study CSV");
    c_svg->add_option("--in", in_path, "study CSV input")->required();
    c_svg->add_option("--out", out_path, "SVG output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (c_tail->parsed()) {
        const StretchedExpParams p{kappa, r};
        p.validate();
        std::cout << format_double(tail(p, t)) << "\n";
        return 0;
    }

    if (c_rate->parsed()) {
        const StretchedExpParams p{kappa, r};
        p.validate();
        std::cout << format_double(rate_function(p, x, D)) << "\n";
        return 0;
    }

    if (c_bounds->parsed()) {
        const ExperimentConfig cfg = parse_config_file(config_path);
        if (cfg.n_grid.empty() && n_override == 0)
            throw config_error("bounds: give --n or a study.n_grid in the config");
        const std::size_t n = n_override ? n_override : cfg.n_grid.front();
        const WeightVector wv = realize_for(cfg, n);
        const BoundReport rep = certified_bounds(wv, cfg.dist, cfg.x, cfg.bounds);
        const ClosedFormBound cf = closed_form_upper_bound(wv, cfg.dist, cfg.x, cfg.bounds);
        std::cout << "n " << n << "\n"
                  << "a_max " << format_double(wv.a_max) << "\n"
                  << "A " << format_double(rep.A_used) << "\n"
                  << "log_lower " << format_double(rep.log_lower) << "\n"
                  << "log_upper " << format_double(rep.log_upper) << "\n"
                  << "lambda " << format_double(rep.lambda_used) << "\n"
                  << "sup_part " << format_double(rep.log_sup_part) << "\n"
                  << "chernoff_part " << format_double(rep.log_chernoff_part) << "\n"
                  << "jump_part " << format_double(rep.log_jump_part) << "\n"
                  << "chebyshev_q " << format_double(rep.chebyshev_q) << "\n"
                  << "closed_form_log_upper " << format_double(cf.log_bound) << "\n"
                  << "closed_form_certified " << (cf.certified() ? "yes" : "no") << "\n";
        return 0;
    }

    if (c_est->parsed()) {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (have_seed) cfg.seed = seed;
        if (samples) cfg.samples = samples;
        if (!estimator_name.empty()) {
            if (estimator_name == "naive") cfg.estimator = EstimatorChoice::naive;
            else if (estimator_name == "largest_jump") cfg.estimator = EstimatorChoice::largest_jump;
            else throw config_error("estimate: unknown estimator " + estimator_name);
        }
        if (cfg.n_grid.empty() && n_override == 0)
            throw config_error("estimate: give --n or a study.n_grid in the config");
        const std::size_t n = n_override ? n_override : cfg.n_grid.front();
        const double d_mean = limit_sum(cfg.family).value * mean(cfg.dist);
        if (!(cfg.x > d_mean))
            throw config_error("study.x must exceed D*E[X] = " + format_double(d_mean));
        const WeightVector wv = realize_for(cfg, n);
        const bool lj = cfg.estimator != EstimatorChoice::naive;
        const RareEventEstimate est = lj
            ? largest_jump_mc(wv, cfg.dist, cfg.x, cfg.samples, cfg.seed, workers)
            : naive_mc(wv, cfg.dist, cfg.x, cfg.samples, cfg.seed, workers);
        std::cout << "estimator " << (lj ? "largest_jump" : "naive") << "\n"
                  << "p_hat " << format_double(est.p_hat) << "\n"
                  << "stderr " << format_double(est.std_err) << "\n"
                  << "log_p_hat " << format_double(est.log_p_hat) << "\n"
                  << "normalized_rate " << format_double(est.normalized_rate) << "\n"
                  << "relative_error " << format_double(est.relative_error) << "\n"
                  << "samples " << est.samples << "\n"
                  << "elapsed_seconds " << format_double(est.elapsed_seconds) << "\n";
        return 0;
    }

    if (c_study->parsed()) {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (have_seed) cfg.seed = seed;
        const StudyResult result = run_study(cfg, workers);
        write_output(out_path, study_csv(result.rows, timings));
        std::ostream& info = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
        info << result.summary << "\n";
        if (timings) {
            double total = 0.0;
            for (const auto& row : result.rows) total += row.elapsed_seconds;
            info << "total sampling seconds: " << format_double(total) << "\n";
        }
        if (!svg_path.empty()) {
            const SvgChart chart = emit_svg(result.rows);
            if (!chart.svg.empty()) write_output(svg_path, chart.svg);
            for (const auto& msg : chart.notices) info << "svg: " << msg << "\n";
        }
        return 0;
    }

    if (c_svg->parsed()) {
        std::ifstream in(in_path);
        if (!in) throw config_error("cannot open csv input: " + in_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const SvgChart chart = emit_svg(parse_study_csv(buf.str()));
        for (const auto& msg : chart.notices) std::cerr << "svg: " << msg << "\n";
        if (!chart.svg.empty()) write_output(out_path, chart.svg);
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}
