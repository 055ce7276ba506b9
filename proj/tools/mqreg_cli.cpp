// Command-line front end: fit/tune M-quantile regressions on CSV data and
// run the named simulation studies.
//
// Exit codes: 0 success, 2 parse/config failure, 3 fit failure,
// 4 selector non-convergence (trace still written).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mqreg/csv.hpp"
#include "mqreg/fit.hpp"
#include "mqreg/inference.hpp"
#include "mqreg/simlab.hpp"
#include "mqreg/tuning.hpp"

using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitFit = 3;
constexpr int kExitSelector = 4;

struct LoadedData {
    mqreg::Dataset data;
    std::vector<std::string> terms;
    int dropped_rows = 0;
};

double parse_number(const std::string& field, const std::string& column, size_t row) {
    const char* begin = field.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw mqreg::CsvError("non-numeric value '" + field + "' in column '" + column +
                              "', data row " + std::to_string(row + 1));
    }
    return v;
}

LoadedData load_dataset(const std::string& path, const std::string& response,
                        const std::vector<std::string>& covariates, bool intercept) {
    mqreg::CsvTable table = mqreg::read_csv_file(path);
    size_t y_col = table.column(response);
    std::vector<size_t> x_cols;
    for (const auto& name : covariates) x_cols.push_back(table.column(name));

    LoadedData out;
    if (intercept) out.terms.push_back("(Intercept)");
    for (const auto& name : covariates) out.terms.push_back(name);
    const size_t p = out.terms.size();
    if (p == 0) throw mqreg::CsvError("model has no terms; drop --no-intercept or add covariates");

    std::vector<double> ys;
    std::vector<std::vector<double>> xs;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        bool missing = row[y_col].empty();
        for (size_t c : x_cols) missing = missing || row[c].empty();
        if (missing) {
            ++out.dropped_rows;
            continue;
        }
        ys.push_back(parse_number(row[y_col], response, i));
        std::vector<double> x;
        if (intercept) x.push_back(1.0);
        for (size_t k = 0; k < x_cols.size(); ++k) {
            x.push_back(parse_number(row[x_cols[k]], covariates[k], i));
        }
        xs.push_back(std::move(x));
    }
    if (out.dropped_rows > 0) {
        std::cerr << "warning: dropped " << out.dropped_rows << " rows with missing values\n";
    }

    const auto n = static_cast<Eigen::Index>(ys.size());
    out.data.y.resize(n);
    out.data.X.resize(n, static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.data.y[i] = ys[i];
        for (size_t j = 0; j < p; ++j) out.data.X(i, static_cast<Eigen::Index>(j)) = xs[i][j];
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

mqreg::CGrid parse_grid(const std::string& s, double default_step) {
    mqreg::CGrid grid;
    grid.step = default_step;
    if (s.empty()) return grid;
    double lo, hi, step;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3) {
        throw std::invalid_argument("--grid expects lo:hi:step");
    }
    grid.lo = lo;
    grid.hi = hi;
    grid.step = step;
    return grid;
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write to " + path);
    os << text;
}

struct FitRow {
    mqreg::MQConfig cfg;
    mqreg::MQFit fit;
    mqreg::CovarianceEstimate cov;
};

FitRow run_fit(const mqreg::Dataset& data, double q, double c, mqreg::ScaleMethod scale) {
    FitRow row;
    row.cfg.q = q;
    row.cfg.c = c;
    row.cfg.scale = scale;
    row.fit = mqreg::fit(data, row.cfg);
    row.cov = mqreg::sandwich_cov(data, row.fit, q, c);
    return row;
}

mqreg::CsvTable fit_report_table(const std::vector<FitRow>& rows,
                                 const std::vector<std::string>& terms) {
    mqreg::CsvTable t;
    t.header = {"q", "c", "scale", "term", "estimate", "std_error",
                "sigma", "tau", "converged", "iterations"};
    for (const auto& row : rows) {
        for (Eigen::Index j = 0; j < row.fit.beta.size(); ++j) {
            t.rows.push_back({mqreg::format_double(row.cfg.q), mqreg::format_double(row.cfg.c),
                              mqreg::to_string(row.cfg.scale), terms[static_cast<size_t>(j)],
                              mqreg::format_double(row.fit.beta[j]),
                              mqreg::format_double(row.cov.se[j]),
                              mqreg::format_double(row.fit.sigma),
                              mqreg::format_double(row.cov.tau),
                              row.fit.converged ? "1" : "0", std::to_string(row.fit.n_iter)});
        }
    }
    return t;
}

json fit_report_json(const std::vector<FitRow>& rows, const std::vector<std::string>& terms) {
    json out = json::array();
    for (const auto& row : rows) {
        json coeffs = json::array();
        for (Eigen::Index j = 0; j < row.fit.beta.size(); ++j) {
            coeffs.push_back({{"term", terms[static_cast<size_t>(j)]},
                              {"estimate", row.fit.beta[j]},
                              {"std_error", row.cov.se[j]}});
        }
        out.push_back({{"q", row.cfg.q},
                       {"c", row.cfg.c},
                       {"scale", mqreg::to_string(row.cfg.scale)},
                       {"sigma", row.fit.sigma},
                       {"tau", row.cov.tau},
                       {"converged", row.fit.converged},
                       {"iterations", row.fit.n_iter},
                       {"coefficients", coeffs}});
    }
    return out;
}

std::string table_to_string(const mqreg::CsvTable& t) {
    std::ostringstream os;
    mqreg::write_csv(t, os);
    return os.str();
}

int cmd_fit(const std::string& input, const std::string& response,
            const std::string& covariates, bool no_intercept, std::vector<double> qs, double c,
            const std::string& scale_name, const std::string& out, bool as_json) {
    LoadedData loaded;
    mqreg::ScaleMethod scale;
    try {
        scale = mqreg::scale_method_from_string(scale_name);
        loaded = load_dataset(input, response, split_commas(covariates), !no_intercept);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    if (qs.empty()) qs.push_back(0.5);

    std::vector<FitRow> rows;
    try {
        for (double q : qs) rows.push_back(run_fit(loaded.data, q, c, scale));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    }

    if (as_json) {
        write_text(fit_report_json(rows, loaded.terms).dump(2) + "\n", out);
    } else {
        write_text(table_to_string(fit_report_table(rows, loaded.terms)), out);
    }
    return 0;
}

int cmd_tune(const std::string& input, const std::string& response,
             const std::string& covariates, bool no_intercept, const std::string& method,
             std::vector<double> qs, const std::string& grid_arg, const std::string& out,
             bool as_json) {
    LoadedData loaded;
    try {
        if (method != "av" && method != "inv") {
            throw std::invalid_argument("--method must be av or inv");
        }
        loaded = load_dataset(input, response, split_commas(covariates), !no_intercept);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    if (qs.empty()) qs = {0.5};

    struct Selection {
        double q;  // the local q for av; 0.5 report anchor for inv
        mqreg::TuningResult result;
        FitRow fit;
    };
    std::vector<Selection> selections;
    bool all_converged = true;
    try {
        mqreg::CGrid grid = parse_grid(grid_arg, method == "av" ? 0.02 : 0.1);
        if (method == "av") {
            for (double q : qs) {
                Selection sel;
                sel.q = q;
                sel.result = mqreg::select_c_av(loaded.data, q, grid);
                sel.fit = run_fit(loaded.data, q, sel.result.c_opt, mqreg::ScaleMethod::cMAD);
                all_converged = all_converged && sel.result.converged;
                selections.push_back(std::move(sel));
            }
        } else {
            Selection sel;
            sel.result = mqreg::select_c_inv(loaded.data, mqreg::default_q_grid(), grid);
            all_converged = sel.result.converged;
            for (double q : qs) {
                sel.q = q;
                sel.fit = run_fit(loaded.data, q, sel.result.c_opt, mqreg::ScaleMethod::cMAD);
                selections.push_back(sel);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    }

    if (as_json) {
        json doc;
        doc["method"] = method;
        doc["results"] = json::array();
        for (const auto& sel : selections) {
            json trace = json::array();
            for (const auto& [c, crit] : sel.result.trace) trace.push_back({c, crit});
            std::vector<FitRow> one = {sel.fit};
            doc["results"].push_back({{"q", sel.q},
                                      {"c_opt", sel.result.c_opt},
                                      {"converged", sel.result.converged},
                                      {"iterations", sel.result.iterations},
                                      {"trace", trace},
                                      {"fit", fit_report_json(one, loaded.terms)[0]}});
        }
        write_text(doc.dump(2) + "\n", out);
    } else {
        std::vector<FitRow> fits;
        for (const auto& sel : selections) fits.push_back(sel.fit);
        mqreg::CsvTable report = fit_report_table(fits, loaded.terms);

        mqreg::CsvTable trace;
        trace.header = {"method", "q", "c", "criterion", "selected"};
        for (const auto& sel : selections) {
            for (const auto& [c, crit] : sel.result.trace) {
                trace.rows.push_back({method, mqreg::format_double(sel.q),
                                      mqreg::format_double(c), mqreg::format_double(crit),
                                      c == sel.result.c_opt ? "1" : "0"});
            }
            if (method == "inv") break;  // one global trace
        }

        if (out.empty()) {
            std::cout << table_to_string(report) << "\n" << table_to_string(trace);
        } else {
            write_text(table_to_string(report), out);
            write_text(table_to_string(trace), out + ".trace.csv");
        }
    }
    for (const auto& sel : selections) {
        std::cerr << "selected c = " << sel.result.c_opt << (method == "av" ? " (q=" : " (global")
                  << (method == "av" ? mqreg::format_double(sel.q) + ")" : std::string(")"))
                  << "\n";
        if (method == "inv") break;
    }
    return all_converged ? 0 : kExitSelector;
}

int cmd_simulate(const std::string& study, int n, int reps, std::uint64_t seed, bool full,
                 int avar_n, const std::string& out, bool as_json) {
    mqreg::StudyResult records;
    mqreg::StudyResult summary;
    try {
        if (study == "scale") {
            mqreg::ScaleStudyConfig cfg;
            if (n > 0) cfg.n = n;
            if (reps > 0) cfg.reps = reps;
            cfg.seed = seed;
            if (full) cfg.avar_sample_n = 1000000;
            if (avar_n >= 0) cfg.avar_sample_n = avar_n;
            records = mqreg::run_scale_study(cfg);
        } else if (study == "tuning") {
            mqreg::TuningStudyConfig cfg;
            if (n > 0) cfg.n = n;
            if (reps > 0) cfg.reps = reps;
            cfg.seed = seed;
            records = mqreg::run_tuning_study(cfg);
            summary = mqreg::summarize_tuning(records);
        } else {
            std::cerr << "error: unknown study '" << study << "' (scale|tuning)\n";
            return kExitParse;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    }

    auto records_json = [](const mqreg::StudyResult& rs) {
        json arr = json::array();
        for (const auto& r : rs) {
            arr.push_back({{"scenario", r.scenario},
                           {"method", r.method},
                           {"q", r.q},
                           {"c", r.c},
                           {"replicate", r.replicate},
                           {"stat", r.stat},
                           {"value", r.value}});
        }
        return arr;
    };

    if (as_json) {
        json doc;
        doc["records"] = records_json(records);
        if (!summary.empty()) doc["summary"] = records_json(summary);
        write_text(doc.dump(2) + "\n", out);
        return 0;
    }

    std::ostringstream os;
    mqreg::write_study_csv(records, os);
    write_text(os.str(), out);
    if (!summary.empty()) {
        std::ostringstream ss;
        mqreg::write_study_csv(summary, ss);
        if (out.empty()) {
            std::cout << "\n" << ss.str();
        } else {
            write_text(ss.str(), out + ".summary.csv");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"M-quantile regression: fitting, tuning-constant selection and simulation"};
    app.require_subcommand(1);

    std::string input, response, covariates, out, scale_name = "cmad", method = "av";
    std::string grid_arg, study = "scale";
    std::vector<double> qs;
    double c = 1.345;
    bool no_intercept = false, as_json = false, full = false;
    int n = 0, reps = 0, avar_n = -1;
    std::uint64_t seed = 1;

    auto* fit_cmd = app.add_subcommand("fit", "Fit M-quantile regressions on a CSV file");
    fit_cmd->add_option("--input", input, "input CSV path")->required();
    fit_cmd->add_option("--response", response, "response column name")->required();
    fit_cmd->add_option("--covariates", covariates, "comma-separated covariate columns");
    fit_cmd->add_flag("--no-intercept", no_intercept, "drop the intercept column");
    fit_cmd->add_option("--q", qs, "quantile orders in (0,1)");
    fit_cmd->add_option("--c", c, "tuning constant");
    fit_cmd->add_option("--scale", scale_name, "scale method: nmad|cmad|ml|mm");
    fit_cmd->add_option("--out", out, "output path (default stdout)");
    fit_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

    auto* tune_cmd = app.add_subcommand("tune", "Select a data-driven tuning constant");
    tune_cmd->add_option("--input", input, "input CSV path")->required();
    tune_cmd->add_option("--response", response, "response column name")->required();
    tune_cmd->add_option("--covariates", covariates, "comma-separated covariate columns");
    tune_cmd->add_flag("--no-intercept", no_intercept, "drop the intercept column");
    tune_cmd->add_option("--method", method, "av (local) or inv (global)");
    tune_cmd->add_option("--q", qs, "quantile orders (av: one selection per q)");
    tune_cmd->add_option("--grid", grid_arg, "c search grid lo:hi:step");
    tune_cmd->add_option("--out", out, "output path (default stdout)");
    tune_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

    auto* sim_cmd = app.add_subcommand("simulate", "Run a named simulation study");
    sim_cmd->add_option("--study", study, "scale or tuning")->required();
    sim_cmd->add_option("--n", n, "sample size override");
    sim_cmd->add_option("--reps", reps, "replicate count override");
    sim_cmd->add_option("--seed", seed, "RNG seed");
    sim_cmd->add_flag("--full", full, "full-scale asymptotic-variance sample (10^6)");
    sim_cmd->add_option("--avar-n", avar_n,
                        "asymptotic-variance sample size override (0 disables)");
    sim_cmd->add_option("--out", out, "output path (default stdout)");
    sim_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        for (double q : qs) {
            if (!(q > 0.0 && q < 1.0)) {
                std::cerr << "error: q must lie in (0,1)\n";
                return kExitParse;
            }
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(input, response, covariates, no_intercept, qs, c, scale_name, out,
                           as_json);
        }
        if (tune_cmd->parsed()) {
            return cmd_tune(input, response, covariates, no_intercept, method, qs, grid_arg, out,
                            as_json);
        }
        return cmd_simulate(study, n, reps, seed, full, avar_n, out, as_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    }
}
