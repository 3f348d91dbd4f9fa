#ifndef TRGC_TYPES_HPP
#define TRGC_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trgc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error with a machine-readable category string ("io", "schema",
/// "unstable-model", "singular-matrix", ...). The CLI maps these to
/// `error[<category>]: <message>` on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

enum class Direction { forward, backward };

/// VAR(p) process: z_t = A_1 z_{t-1} + ... + A_p z_{t-p} + eps_t,
/// with eps_t white noise of covariance resid_cov.
struct VarModel {
    int p = 0;
    int d = 0;
    std::vector<Matrix> coeffs;  // A_1 .. A_p, each d x d
    Matrix resid_cov;            // d x d, symmetric PSD

    void validate() const;
    /// Stacked coefficient block [A_1 ... A_p], d x (d*p).
    Matrix coeff_row() const;
};

/// Univariate AR(p) model with scalar coefficients.
struct ArModel {
    int p = 0;
    std::vector<double> coeffs;  // a_1 .. a_p
    double resid_var = 0.0;
};

/// VAR(1) embedding of a VAR(p) process: Z_t = A Z_{t-1} + E_t with
/// block-companion A and the residual covariance confined to the
/// leading d x d block.
struct CompanionForm {
    int p = 0;
    int d = 0;
    Matrix matrix;     // (d*p) x (d*p)
    Matrix resid_cov;  // (d*p) x (d*p), nonzero only in top-left d x d
};

/// Cross-covariance matrices C(0) .. C(h_max) of a stationary process;
/// negative lags are implied by C(-h) = C(h)^T.
struct CrossCovSequence {
    int dim = 0;
    std::vector<Matrix> lags;  // index h -> C(h)

    int max_lag() const { return static_cast<int>(lags.size()) - 1; }
    const Matrix& at(int h) const;
    /// C(h) for any sign of h.
    Matrix at_signed(int h) const;
    /// Stacked block-Toeplitz covariance C_Z(0) of the companion state,
    /// built from lags 0..p-1.
    Matrix stacked_zero(int p) const;
};

/// Sample matrix, one row per time step, one column per channel.
struct TimeSeries {
    Matrix values;  // T x d
    std::optional<std::uint64_t> seed;

    long length() const { return values.rows(); }
    int dim() const { return static_cast<int>(values.cols()); }
    void validate() const;
    TimeSeries reversed() const;
    TimeSeries channel(int c) const;
    TimeSeries channels(int c0, int c1) const;
};

/// Percentile confidence interval.
struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double point = 0.0;
    bool excludes_zero() const { return lower > 0.0 || upper < 0.0; }
};

struct FTestResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    bool significant = false;
    long df1 = 0;
    long df2 = 0;
};

struct FTestPair {
    FTestResult x_to_y;
    FTestResult y_to_x;
    double alpha = 0.05;
};

}  // namespace trgc

#endif
