#include "mqreg/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "mqreg/fit.hpp"
#include "mqreg/inference.hpp"
#include "mqreg/normal.hpp"
#include "mqreg/parallel.hpp"
#include "mqreg/tuning.hpp"

namespace mqreg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kContaminationVar = 150.0;  // mixture component N(0, 150)

// Splitmix64 keyed by (seed, replicate, stream); replicates are order-free.
struct Rng {
    std::uint64_t state;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    Rng(std::uint64_t seed, int replicate, int stream) {
        std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(replicate) + 1));
        state = mix(h + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1));
    }

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        return mix(state);
    }

    double uniform() {  // open (0,1), exact across platforms
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
    }

    double normal() { return normal_quantile(uniform()); }
};

void fmt_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::lognormal: return "lognormal";
        case Family::t3: return "t3";
        case Family::cauchy: return "cauchy";
        case Family::contaminated_normal: return "contaminated_normal";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    if (name == "normal") return Family::normal;
    if (name == "lognormal") return Family::lognormal;
    if (name == "t3") return Family::t3;
    if (name == "cauchy") return Family::cauchy;
    if (name == "contaminated_normal") return Family::contaminated_normal;
    throw std::invalid_argument("unknown family: " + name);
}

void ScenarioSpec::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("ScenarioSpec: alpha in [0,1)");
    if (n < 10) throw std::invalid_argument("ScenarioSpec: n >= 10 required");
    if (reps < 1) throw std::invalid_argument("ScenarioSpec: reps >= 1 required");
    if (beta.empty() || beta.size() > 2) {
        throw std::invalid_argument("ScenarioSpec: beta must have 1 or 2 entries");
    }
}

std::string ScenarioSpec::label() const {
    if (family == Family::contaminated_normal) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "contaminated_normal(%.2f)", alpha);
        return buf;
    }
    return to_string(family);
}

Dataset generate(const ScenarioSpec& spec, int replicate) {
    spec.validate();
    const int n = spec.n;
    Rng covariate_rng(spec.seed, replicate, 0);
    Rng error_rng(spec.seed, replicate, 1);
    Rng select_rng(spec.seed, replicate, 2);

    Dataset data;
    const auto p = static_cast<Eigen::Index>(spec.beta.size());
    data.X = Eigen::MatrixXd::Ones(n, p);
    if (p == 2) {
        for (int i = 0; i < n; ++i) data.X(i, 1) = 1.0 + covariate_rng.normal();
    }

    Eigen::VectorXd eps(n);
    switch (spec.family) {
        case Family::normal:
            for (int i = 0; i < n; ++i) eps[i] = error_rng.normal();
            break;
        case Family::lognormal:
            for (int i = 0; i < n; ++i) eps[i] = std::exp(error_rng.normal());
            break;
        case Family::t3:
            for (int i = 0; i < n; ++i) {
                double z = error_rng.normal();
                double a = error_rng.normal(), b = error_rng.normal(), c = error_rng.normal();
                eps[i] = z / std::sqrt((a * a + b * b + c * c) / 3.0);
            }
            break;
        case Family::cauchy:
            for (int i = 0; i < n; ++i) eps[i] = std::tan(kPi * (error_rng.uniform() - 0.5));
            break;
        case Family::contaminated_normal:
            for (int i = 0; i < n; ++i) {
                double z = error_rng.normal();
                if (select_rng.uniform() < spec.alpha) z *= std::sqrt(kContaminationVar);
                eps[i] = z;
            }
            break;
    }

    Eigen::VectorXd coef = Eigen::Map<const Eigen::VectorXd>(spec.beta.data(), p);
    data.y = data.X * coef + eps;
    return data;
}

double huberised_proportion(const MQFit& fit, double c) {
    const auto n = fit.residuals.size();
    Eigen::Index count = 0;
    const double threshold = c * fit.sigma;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(fit.residuals[i]) > threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

double sample_quantile(std::vector<double> y, double q) {
    if (y.empty()) throw std::invalid_argument("sample_quantile: empty sample");
    std::sort(y.begin(), y.end());
    double h = (static_cast<double>(y.size()) - 1.0) * q;
    auto lo = static_cast<size_t>(h);
    if (lo + 1 >= y.size()) return y.back();
    return y[lo] + (h - static_cast<double>(lo)) * (y[lo + 1] - y[lo]);
}

double sample_expectile(const std::vector<double>& y, double q) {
    if (y.empty()) throw std::invalid_argument("sample_expectile: empty sample");
    auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) return lo;
    // g(m) = sum of asymmetric-squared-loss scores, strictly decreasing in m.
    auto g = [&](double m) {
        double s = 0.0;
        for (double v : y) s += (v > m ? 2.0 * q : 2.0 * (1.0 - q)) * (v - m);
        return s;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (std::abs(lo) + std::abs(hi) + 1.0); ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> transition_distance(const MQFit& fit, double quantile_ref,
                                              double expectile_ref) {
    return {fit.beta[0] - quantile_ref, fit.beta[0] - expectile_ref};
}

void write_study_csv(const StudyResult& result, std::ostream& os) {
    std::string out = "scenario,method,q,c,replicate,stat,value\n";
    for (const auto& r : result) {
        out += r.scenario;
        out += ',';
        out += r.method;
        out += ',';
        fmt_value(out, r.q);
        out += ',';
        fmt_value(out, r.c);
        out += ',';
        out += std::to_string(r.replicate);
        out += ',';
        out += r.stat;
        out += ',';
        fmt_value(out, r.value);
        out += '\n';
    }
    os << out;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    return median(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

// Normalized MAD, comparable with a standard deviation.
double nmad_of(const std::vector<double>& v) {
    double m = median_of(v);
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - m);
    return median_of(dev) / kMadConsistency;
}

}  // namespace

StudyResult run_scale_study(const ScaleStudyConfig& config) {
    std::vector<double> qs = config.q_values.empty() ? default_q_grid() : config.q_values;

    struct Cell {
        std::vector<double> beta0, sigma, hub, dist_q, dist_e;
        int failed = 0;
    };
    const size_t n_methods = config.methods.size();
    const size_t n_q = qs.size();
    const size_t n_c = config.c_values.size();
    auto cell_index = [&](size_t m, size_t k, size_t j) { return (m * n_q + k) * n_c + j; };

    StudyResult out;
    for (Family family : config.families) {
        ScenarioSpec spec;
        spec.family = family;
        spec.n = config.n;
        spec.reps = config.reps;
        spec.seed = config.seed;

        std::vector<std::vector<Cell>> per_rep(config.reps);
        parallel_for(
            config.reps,
            [&](int rep) {
                Dataset data = generate(spec, rep);
                std::vector<double> y_vec(data.y.data(), data.y.data() + data.y.size());
                std::vector<Cell>& cells = per_rep[rep];
                cells.resize(n_methods * n_q * n_c);
                for (size_t k = 0; k < n_q; ++k) {
                    double q_ref = sample_quantile(y_vec, qs[k]);
                    double e_ref = sample_expectile(y_vec, qs[k]);
                    for (size_t m = 0; m < n_methods; ++m) {
                        for (size_t j = 0; j < n_c; ++j) {
                            Cell& cell = cells[cell_index(m, k, j)];
                            MQConfig cfg;
                            cfg.q = qs[k];
                            cfg.c = config.c_values[j];
                            cfg.scale = config.methods[m];
                            try {
                                MQFit f = fit(data, cfg);
                                auto [dq, de] = transition_distance(f, q_ref, e_ref);
                                cell.beta0.push_back(f.beta[0]);
                                cell.sigma.push_back(f.sigma);
                                cell.hub.push_back(huberised_proportion(f, cfg.c));
                                cell.dist_q.push_back(dq);
                                cell.dist_e.push_back(de);
                            } catch (const std::exception&) {
                                cell.failed += 1;
                            }
                        }
                    }
                }
            },
            config.threads);

        // Single large-sample plug-in asymptotic variance per cell.
        std::vector<Eigen::MatrixXd> avar(n_methods * n_q * n_c);
        std::vector<double> avar_beta0(n_methods * n_q * n_c,
                                       std::numeric_limits<double>::quiet_NaN());
        if (config.avar_sample_n > 0) {
            ScenarioSpec big = spec;
            big.n = config.avar_sample_n;
            Dataset data = generate(big, config.reps);  // replicate id past the study range
            parallel_for(
                static_cast<int>(n_methods * n_q * n_c),
                [&](int idx) {
                    size_t j = idx % n_c;
                    size_t k = (idx / n_c) % n_q;
                    size_t m = idx / (n_c * n_q);
                    MQConfig cfg;
                    cfg.q = qs[k];
                    cfg.c = config.c_values[j];
                    cfg.scale = config.methods[m];
                    try {
                        MQFit f = fit(data, cfg);
                        avar_beta0[idx] = sandwich_cov(data, f, cfg.q, cfg.c).cov(0, 0);
                    } catch (const std::exception&) {
                    }
                },
                config.threads);
        }

        const std::string scenario = spec.label();
        for (size_t m = 0; m < n_methods; ++m) {
            for (size_t k = 0; k < n_q; ++k) {
                for (size_t j = 0; j < n_c; ++j) {
                    Cell merged;
                    for (int rep = 0; rep < config.reps; ++rep) {
                        const Cell& cell = per_rep[rep][cell_index(m, k, j)];
                        merged.failed += cell.failed;
                        auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
                            dst.insert(dst.end(), src.begin(), src.end());
                        };
                        append(merged.beta0, cell.beta0);
                        append(merged.sigma, cell.sigma);
                        append(merged.hub, cell.hub);
                        append(merged.dist_q, cell.dist_q);
                        append(merged.dist_e, cell.dist_e);
                    }
                    auto emit = [&](const std::string& stat, double value) {
                        out.push_back({scenario, to_string(config.methods[m]), qs[k],
                                       config.c_values[j], -1, stat, value});
                    };
                    if (!merged.beta0.empty()) {
                        emit("mean_beta0", mean_of(merged.beta0));
                        emit("sd_beta0", sd_of(merged.beta0));
                        emit("mean_sigma", mean_of(merged.sigma));
                        emit("sd_sigma", sd_of(merged.sigma));
                        emit("mean_hub_prop", mean_of(merged.hub));
                        emit("mean_dist_quantile", mean_of(merged.dist_q));
                        emit("sd_dist_quantile", sd_of(merged.dist_q));
                        emit("mean_dist_expectile", mean_of(merged.dist_e));
                        emit("sd_dist_expectile", sd_of(merged.dist_e));
                    }
                    emit("n_failed", merged.failed);
                    size_t idx = cell_index(m, k, j);
                    if (config.avar_sample_n > 0 && !std::isnan(avar_beta0[idx])) {
                        emit("avar_beta0", avar_beta0[idx]);
                    }
                }
            }
        }
    }
    return out;
}

StudyResult run_tuning_study(const TuningStudyConfig& config) {
    std::vector<double> inv_q_grid =
        config.inv_q_grid.empty() ? default_q_grid() : config.inv_q_grid;

    StudyResult out;
    for (const TuningScenario& sc : config.scenarios) {
        ScenarioSpec spec;
        spec.family = sc.family;
        spec.alpha = sc.alpha;
        spec.beta = {100.0, 4.0};
        spec.n = config.n;
        spec.reps = config.reps;
        spec.seed = config.seed;
        const std::string scenario = spec.label();

        std::vector<StudyResult> per_rep(config.reps);
        parallel_for(
            config.reps,
            [&](int rep) {
                Dataset data = generate(spec, rep);
                StudyResult& rows = per_rep[rep];

                auto record_fit = [&](const std::string& method, double q, double c_field,
                                      double c_fit) {
                    MQConfig cfg;
                    cfg.q = q;
                    cfg.c = c_fit;
                    cfg.scale = ScaleMethod::cMAD;
                    MQFit f = fit(data, cfg);
                    CovarianceEstimate cov = sandwich_cov(data, f, q, c_fit);
                    rows.push_back({scenario, method, q, c_field, rep, "beta0", f.beta[0]});
                    rows.push_back({scenario, method, q, c_field, rep, "beta1", f.beta[1]});
                    rows.push_back({scenario, method, q, c_field, rep, "se_beta0", cov.se[0]});
                    rows.push_back({scenario, method, q, c_field, rep, "se_beta1", cov.se[1]});
                };

                double c_inv = 0.0;
                if (config.run_inv) {
                    TuningResult inv = select_c_inv(data, inv_q_grid,
                                                    CGrid{0.5, 4.0, config.inv_c_step});
                    c_inv = inv.c_opt;
                }

                for (double q : config.q_values) {
                    for (double c : config.fixed_c) {
                        char label[32];
                        std::snprintf(label, sizeof(label), "MQ(c=%g)", c);
                        try {
                            record_fit(label, q, c, c);
                        } catch (const std::exception&) {
                            rows.push_back({scenario, label, q, c, rep, "fit_failed", 1.0});
                        }
                    }
                    if (config.run_av) {
                        try {
                            TuningResult av = select_c_av(data, q);
                            record_fit("MQ AV", q, 0.0, av.c_opt);
                            rows.push_back({scenario, "MQ AV", q, 0.0, rep, "c_sel", av.c_opt});
                        } catch (const std::exception&) {
                            rows.push_back({scenario, "MQ AV", q, 0.0, rep, "fit_failed", 1.0});
                        }
                    }
                    if (config.run_inv) {
                        try {
                            record_fit("MQ Inv", q, 0.0, c_inv);
                            rows.push_back({scenario, "MQ Inv", q, 0.0, rep, "c_sel", c_inv});
                        } catch (const std::exception&) {
                            rows.push_back({scenario, "MQ Inv", q, 0.0, rep, "fit_failed", 1.0});
                        }
                    }
                }
            },
            config.threads);

        for (int rep = 0; rep < config.reps; ++rep) {
            out.insert(out.end(), per_rep[rep].begin(), per_rep[rep].end());
        }
    }
    return out;
}

StudyResult summarize_tuning(const StudyResult& per_replicate) {
    using Key = std::tuple<std::string, std::string, double, double, std::string>;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : per_replicate) {
        if (r.replicate < 0) continue;
        groups[{r.scenario, r.method, r.q, r.c, r.stat}].push_back(r.value);
    }

    StudyResult out;
    for (const auto& [key, values] : groups) {
        const auto& [scenario, method, q, c, stat] = key;
        if (stat == "beta0" || stat == "beta1") {
            out.push_back({scenario, method, q, c, -1, "mad_" + stat, nmad_of(values)});
        } else if (stat == "se_beta0" || stat == "se_beta1") {
            out.push_back({scenario, method, q, c, -1, "median_" + stat, median_of(values)});
        } else if (stat == "c_sel") {
            out.push_back({scenario, method, q, c, -1, "median_c", median_of(values)});
        } else if (stat == "fit_failed") {
            out.push_back({scenario, method, q, c, -1, "n_failed",
                           static_cast<double>(values.size())});
        }
    }
    return out;
}

}  // namespace mqreg
