#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mqreg/types.hpp"

namespace mqreg {

enum class Family { normal, lognormal, t3, cauchy, contaminated_normal };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

// Error-distribution scenario. An intercept-only beta gives a null model;
// two coefficients add a single N(1,1) covariate.
struct ScenarioSpec {
    Family family = Family::normal;
    double alpha = 0.0;  // contamination share, contaminated_normal only
    std::vector<double> beta = {0.0};
    int n = 10000;
    int reps = 100;
    std::uint64_t seed = 1;

    void validate() const;
    std::string label() const;  // e.g. "normal" or "contaminated_normal(0.20)"
};

// Deterministic draw of one replicate's dataset. Streams are keyed by
// (seed, replicate, stream), so replicates are order-free.
Dataset generate(const ScenarioSpec& spec, int replicate);

// Share of residuals with |eps_i| > c * sigma; ties count as not Huberised.
double huberised_proportion(const MQFit& fit, double c);

// Order-statistic sample quantile with linear interpolation.
double sample_quantile(std::vector<double> y, double q);

// Sample expectile: root of the asymmetric-squared-loss estimating equation.
double sample_expectile(const std::vector<double>& y, double q);

// Null-model distances (beta0 - quantile_ref, beta0 - expectile_ref).
std::pair<double, double> transition_distance(const MQFit& fit, double quantile_ref,
                                              double expectile_ref);

struct StudyRecord {
    std::string scenario;
    std::string method;
    double q = 0.0;
    double c = 0.0;
    int replicate = 0;
    std::string stat;
    double value = 0.0;
};
using StudyResult = std::vector<StudyRecord>;

// Long-format CSV: scenario,method,q,c,replicate,stat,value.
void write_study_csv(const StudyResult& result, std::ostream& os);

struct ScaleStudyConfig {
    std::vector<Family> families = {Family::normal, Family::lognormal, Family::t3};
    std::vector<double> c_values = {0.5, 1.3, 3.0};
    std::vector<double> q_values;  // empty -> 0.01..0.99
    std::vector<ScaleMethod> methods = {ScaleMethod::nMAD, ScaleMethod::cMAD, ScaleMethod::ML,
                                        ScaleMethod::MM};
    int n = 10000;
    int reps = 100;
    std::uint64_t seed = 1;
    int avar_sample_n = 100000;  // single-sample plug-in; 10^6 with --full, 0 disables
    int threads = 0;
};

// Null-model comparison of the four scale estimators: per-cell replicate
// means/sds of beta0, sigma, the Huberised proportion and the transition
// distances, plus a single large-sample asymptotic variance of beta0.
StudyResult run_scale_study(const ScaleStudyConfig& config);

struct TuningScenario {
    Family family = Family::contaminated_normal;
    double alpha = 0.0;
};

struct TuningStudyConfig {
    std::vector<TuningScenario> scenarios = {{Family::contaminated_normal, 0.0},
                                             {Family::contaminated_normal, 0.05},
                                             {Family::contaminated_normal, 0.20},
                                             {Family::t3, 0.0},
                                             {Family::cauchy, 0.0}};
    std::vector<double> q_values = {0.25, 0.5, 0.75};
    std::vector<double> fixed_c = {1.345, 4.0};
    bool run_av = true;
    bool run_inv = true;
    int n = 1000;
    int reps = 100;
    std::uint64_t seed = 1;
    double inv_c_step = 0.1;
    std::vector<double> inv_q_grid;  // empty -> 0.01..0.99
    int threads = 0;
};

// Per-replicate coefficient estimates, analytic standard errors and selected
// tuning constants for the fixed and data-driven methods.
StudyResult run_tuning_study(const TuningStudyConfig& config);

// MAD-of-estimates and median-SE summary over the replicates, emitted as
// additional records (replicate = -1, stats mad_* / median_se_* / median_c).
StudyResult summarize_tuning(const StudyResult& per_replicate);

}  // namespace mqreg
