#pragma once

#include <utility>
#include <vector>

#include "mqreg/types.hpp"

namespace mqreg {

// Search grid for the tuning constant. Values below 0.5 are unstable and
// excluded by construction.
struct CGrid {
    double lo = 0.5;
    double hi = 4.0;
    double step = 0.02;

    void validate() const;
    std::vector<double> values() const;
};

struct TuningResult {
    double c_opt = 0.0;
    std::vector<std::pair<double, double>> trace;  // (c, criterion) at the final pass
    int iterations = 0;
    bool converged = false;
    int failed_fits = 0;  // ensemble members excluded from the criterion
};

// Partial expectation H(t) = integral_{-inf}^{t} y dF(y) for F = N(mean, sd).
double partial_expectation_normal(double t, double mean, double sd);

struct InverseMqResult {
    double value = 0.0;
    bool clamped = false;  // denominator underflowed, value pinned to 0 or 1
};

// Inverse M-quantile distribution function G_c(x; F) for normal F, evaluated
// in closed form via partial expectations. Strictly increasing in x with
// values in [0, 1].
InverseMqResult inverse_mq(double x, double f_mean, double f_sd, double sigma_q, double c);

// Local selector: maximizes the plug-in efficiency factor tau_hat over the
// grid, refitting a cMAD M-quantile model at each accepted c until the argmax
// is stable. Ties and two-cycles resolve toward the smaller c.
TuningResult select_c_av(const Dataset& data, double q, const CGrid& grid = CGrid{},
                         int max_outer = 20);

// Global selector: for each grid c fits a cMAD ensemble over q_grid, maps the
// standardized median M-quantile shifts through G_{c=4}( . ; Phi) and picks
// the c with the smallest squared deviation from the nominal orders.
// The ensemble fits run in parallel (MQREG_THREADS caps the worker count).
TuningResult select_c_inv(const Dataset& data, const std::vector<double>& q_grid,
                          const CGrid& grid = CGrid{0.5, 4.0, 0.1});

// Uniform q grid 0.01, 0.02, ..., 0.99.
std::vector<double> default_q_grid();

}  // namespace mqreg
