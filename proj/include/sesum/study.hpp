#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sesum/dist.hpp"
#include "sesum/mc.hpp"
#include "sesum/theory.hpp"
#include "sesum/weights.hpp"

namespace sesum {

enum class EstimatorChoice { naive, largest_jump, both };

// One experiment: a distribution, a weight family, a threshold and an n-grid.
// Parsed from flat "dotted.key = value" text; see parse_config_text for the keys.
struct ExperimentConfig {
    StretchedExpParams dist;
    WeightFamily family = WeightFamily::cramer();
    std::vector<std::size_t> n_grid;
    double x = 3.0;
    std::uint64_t samples = 100000;
    EstimatorChoice estimator = EstimatorChoice::largest_jump;
    std::uint64_t seed = 1;
    double truncation_tol = 0.0; // <= 0: 1e-9 * (x - D*E[X]) / E[X]
    BoundConfig bounds;

    double effective_truncation_tol() const;
};

// Accepted keys (unknown keys are an error):
//   dist.kappa, dist.r
//   family.kind = cramer | remainder | moving_average | explicit
//   family.p, family.weights_file
//   study.x, study.n_grid (comma or space separated), study.samples,
//   study.estimator = naive | largest_jump | both, study.seed, study.truncation_tol
//   bounds.epsilon, bounds.quad_rel_tol
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct StudyRow {
    std::size_t n;
    double a_max;
    double sum_weights;
    double x;
    std::string estimator;
    double p_hat;
    double std_err;
    double log_p_hat;
    double normalized_rate;
    double predicted_rate;
    double log_lower_bound;
    double log_upper_bound;
    std::uint64_t samples;
    double elapsed_seconds;
    std::uint64_t seed;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    // max over rows at the final grid point of |normalized_rate - predicted|/|predicted|
    double max_rel_gap_at_final_n = 0.0;
    std::string summary;
};

// Runs every (n, estimator) cell. The regime requirement x > D*E[X] is validated
// before any sampling. Worker count never changes numeric output.
StudyResult run_study(const ExperimentConfig& cfg, int workers = 0);

// CSV with a fixed 15-column schema; all reals at 17 significant digits. Timing is a
// wall-clock measurement and therefore not reproducible, so the elapsed_seconds
// column is written as 0 unless include_timings is set; everything else is
// bit-identical for identical configs regardless of worker count.
std::string study_csv(const std::vector<StudyRow>& rows, bool include_timings = false);

// Parse rows back out of study_csv output (header-driven; extra columns ignored).
std::vector<StudyRow> parse_study_csv(const std::string& text);

std::string format_double(double v); // shared %.17g formatting

} // namespace sesum
