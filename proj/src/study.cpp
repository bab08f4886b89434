#include "sesum/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"

namespace sesum {

double ExperimentConfig::effective_truncation_tol() const {
    if (truncation_tol > 0.0) return truncation_tol;
    const double m = mean(dist);
    const double d = limit_sum(family).value;
    const double gap = x - d * m;
    if (!(gap > 0.0)) return 1e-9; // regime violation is reported elsewhere
    return 1e-9 * gap / m;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error(key + ": not a number: " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw config_error(key + ": not a nonnegative integer: " + v);
    }
}

std::vector<std::size_t> parse_grid(const std::string& key, std::string v) {
    for (char& c : v)
        if (c == ',') c = ' ';
    std::istringstream in(v);
    std::vector<std::size_t> grid;
    std::string tok;
    while (in >> tok) grid.push_back(parse_u64(key, tok));
    return grid;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key or value");
        if (!kv.emplace(key, val).second)
            throw config_error("config: duplicate key " + key);
    }

    ExperimentConfig cfg;
    std::string family_kind = "cramer";
    double family_p = 2.0;
    std::string weights_file;

    for (const auto& [key, val] : kv) {
        if (key == "dist.kappa") cfg.dist.kappa = parse_double(key, val);
        else if (key == "dist.r") cfg.dist.r = parse_double(key, val);
        else if (key == "family.kind") family_kind = val;
        else if (key == "family.p") family_p = parse_double(key, val);
        else if (key == "family.weights_file") weights_file = val;
        else if (key == "study.x") cfg.x = parse_double(key, val);
        else if (key == "study.n_grid") cfg.n_grid = parse_grid(key, val);
        else if (key == "study.samples") cfg.samples = parse_u64(key, val);
        else if (key == "study.seed") cfg.seed = parse_u64(key, val);
        else if (key == "study.truncation_tol") cfg.truncation_tol = parse_double(key, val);
        else if (key == "study.estimator") {
            if (val == "naive") cfg.estimator = EstimatorChoice::naive;
            else if (val == "largest_jump") cfg.estimator = EstimatorChoice::largest_jump;
            else if (val == "both") cfg.estimator = EstimatorChoice::both;
            else throw config_error("study.estimator: unknown estimator " + val);
        } else if (key == "bounds.epsilon") cfg.bounds.epsilon = parse_double(key, val);
        else if (key == "bounds.quad_rel_tol") cfg.bounds.quad_rel_tol = parse_double(key, val);
        else throw config_error("config: unknown key " + key);
    }

    try {
        cfg.dist.validate();
    } catch (const std::domain_error& e) {
        throw config_error(std::string("dist: ") + e.what());
    }

    if (family_kind == "cramer") cfg.family = WeightFamily::cramer();
    else if (family_kind == "remainder") cfg.family = WeightFamily::remainder(family_p);
    else if (family_kind == "moving_average") cfg.family = WeightFamily::moving_average(family_p);
    else if (family_kind == "explicit") {
        if (weights_file.empty()) throw config_error("family.kind=explicit needs family.weights_file");
        cfg.family = load_weight_file(weights_file);
    } else {
        throw config_error("family.kind: unknown family " + family_kind);
    }

    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw config_error("study.n_grid must be strictly increasing");
    // The supercritical regime needs x above the limiting mean; only checkable at
    // load when the family's limit sum is a real limit, not a realized echo.
    const LimitSum d = limit_sum(cfg.family);
    if (d.analytic && !(cfg.x > d.value * mean(cfg.dist)))
        throw config_error("study.x must exceed D*E[X] = " + format_double(d.value * mean(cfg.dist)));
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

StudyRow make_row(const ExperimentConfig& cfg, const WeightVector& wv, const char* name,
                  const RareEventEstimate& est, const BoundReport& rep, double predicted) {
    StudyRow row;
    row.n = wv.n;
    row.a_max = wv.a_max;
    row.sum_weights = wv.sum;
    row.x = cfg.x;
    row.estimator = name;
    row.p_hat = est.p_hat;
    row.std_err = est.std_err;
    row.log_p_hat = est.log_p_hat;
    row.normalized_rate = est.normalized_rate;
    row.predicted_rate = predicted;
    row.log_lower_bound = rep.log_lower;
    row.log_upper_bound = rep.log_upper;
    row.samples = est.samples;
    row.elapsed_seconds = est.elapsed_seconds;
    row.seed = cfg.seed;
    return row;
}

} // namespace

StudyResult run_study(const ExperimentConfig& cfg, int workers) {
    if (cfg.n_grid.empty()) throw config_error("study.n_grid must contain at least one size");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw config_error("study.n_grid must be strictly increasing");
    if (cfg.samples == 0) throw config_error("study.samples must be positive");

    const StretchedExpParams& p = cfg.dist;
    const double mean_x = mean(p);
    const LimitSum d = limit_sum(cfg.family);
    // Regime check before any sampling: below or at D*E[X] the normalized rates
    // the study reports are meaningless.
    if (!(cfg.x > d.value * mean_x))
        throw config_error("study.x must exceed D*E[X] = " + format_double(d.value * mean_x));

    const double tol = cfg.effective_truncation_tol();
    const double predicted = -rate_function(p, cfg.x, d.value);

    StudyResult result;
    for (std::size_t n : cfg.n_grid) {
        const WeightVector wv = realize(cfg.family, n, tol);
        const BoundReport rep = certified_bounds(wv, p, cfg.x, cfg.bounds);
        if (cfg.estimator == EstimatorChoice::naive || cfg.estimator == EstimatorChoice::both) {
            const auto est = naive_mc(wv, p, cfg.x, cfg.samples, cfg.seed, workers);
            result.rows.push_back(make_row(cfg, wv, "naive", est, rep, predicted));
        }
        if (cfg.estimator == EstimatorChoice::largest_jump || cfg.estimator == EstimatorChoice::both) {
            const auto est = largest_jump_mc(wv, p, cfg.x, cfg.samples, cfg.seed, workers);
            result.rows.push_back(make_row(cfg, wv, "largest_jump", est, rep, predicted));
        }
    }

    const std::size_t final_n = cfg.n_grid.back();
    double gap = 0.0;
    for (const auto& row : result.rows) {
        if (row.n != final_n) continue;
        const double g = std::fabs(row.normalized_rate - row.predicted_rate) / std::fabs(row.predicted_rate);
        gap = std::max(gap, g);
    }
    result.max_rel_gap_at_final_n = gap;
    std::ostringstream s;
    s << "final n = " << final_n << ": max |normalized_rate - predicted|/|predicted| = "
      << format_double(gap);
    result.summary = s.str();
    return result;
}

std::string study_csv(const std::vector<StudyRow>& rows, bool include_timings) {
    std::ostringstream out;
    out << "n,a_max,sum_weights,x,estimator,p_hat,stderr,log_p_hat,normalized_rate,"
           "predicted_rate,log_lower_bound,log_upper_bound,samples,elapsed_seconds,seed\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.a_max) << ',' << format_double(r.sum_weights) << ','
            << format_double(r.x) << ',' << r.estimator << ',' << format_double(r.p_hat) << ','
            << format_double(r.std_err) << ',' << format_double(r.log_p_hat) << ','
            << format_double(r.normalized_rate) << ',' << format_double(r.predicted_rate) << ','
            << format_double(r.log_lower_bound) << ',' << format_double(r.log_upper_bound) << ','
            << r.samples << ',' << format_double(include_timings ? r.elapsed_seconds : 0.0) << ','
            << r.seed << '\n';
    }
    return out.str();
}

std::vector<StudyRow> parse_study_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw config_error("csv: empty input");
    std::vector<std::string> head;
    {
        std::istringstream h(line);
        std::string col;
        while (std::getline(h, col, ',')) head.push_back(trim(col));
    }
    auto col_of = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end()) throw config_error("csv: missing column " + name);
        return std::size_t(it - head.begin());
    };
    const std::size_t c_n = col_of("n"), c_est = col_of("estimator"),
                      c_norm = col_of("normalized_rate"), c_pred = col_of("predicted_rate");

    std::vector<StudyRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() < head.size())
            throw config_error("csv line " + std::to_string(lineno) + ": expected " +
                               std::to_string(head.size()) + " columns");
        StudyRow row{};
        row.n = parse_u64("n", cells[c_n]);
        row.estimator = cells[c_est];
        row.normalized_rate = std::strtod(cells[c_norm].c_str(), nullptr);
        row.predicted_rate = std::strtod(cells[c_pred].c_str(), nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sesum
