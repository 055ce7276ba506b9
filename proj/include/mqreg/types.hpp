#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mqreg {

struct SingularDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateScale : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateEfficiency : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Response vector plus design matrix, row-aligned. The first column is all
// ones by convention when an intercept is wanted.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;

    // Checks alignment, n >= p >= 1 and finiteness. Rank is checked at fit time.
    void validate() const;
};

enum class ScaleMethod { nMAD, cMAD, ML, MM };

std::string to_string(ScaleMethod m);
ScaleMethod scale_method_from_string(const std::string& name);

struct MQConfig {
    double q = 0.5;
    double c = 1.345;
    ScaleMethod scale = ScaleMethod::cMAD;
    int max_iter = 200;
    double tol = 1e-8;

    void validate() const;
};

struct MQFit {
    Eigen::VectorXd beta;
    double sigma = 0.0;
    Eigen::VectorXd residuals;
    bool converged = false;
    int n_iter = 0;
};

}  // namespace mqreg
