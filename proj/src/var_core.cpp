#include "trgc/var_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace trgc {

void VarModel::validate() const {
    if (p < 1) throw Error("invalid-argument", "VAR order must be >= 1");
    if (d < 1) throw Error("invalid-argument", "VAR dimension must be >= 1");
    if (static_cast<int>(coeffs.size()) != p)
        throw Error("invalid-argument", "expected " + std::to_string(p) +
                                            " coefficient matrices, got " +
                                            std::to_string(coeffs.size()));
    for (const Matrix& a : coeffs)
        if (a.rows() != d || a.cols() != d)
            throw Error("invalid-argument", "coefficient matrix is not d x d");
    if (resid_cov.rows() != d || resid_cov.cols() != d)
        throw Error("invalid-argument", "residual covariance is not d x d");
    if ((resid_cov - resid_cov.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, resid_cov.cwiseAbs().maxCoeff()))
        throw Error("invalid-argument", "residual covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(resid_cov);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw Error("invalid-argument", "residual covariance is not positive semidefinite");
}

Matrix VarModel::coeff_row() const {
    Matrix row(d, d * p);
    for (int h = 0; h < p; ++h) row.middleCols(h * d, d) = coeffs[h];
    return row;
}

const Matrix& CrossCovSequence::at(int h) const {
    if (h < 0 || h > max_lag())
        throw Error("invalid-argument", "lag " + std::to_string(h) + " out of range");
    return lags[h];
}

Matrix CrossCovSequence::at_signed(int h) const {
    return h >= 0 ? at(h) : Matrix(at(-h).transpose());
}

Matrix CrossCovSequence::stacked_zero(int p) const {
    if (p < 1) throw Error("invalid-argument", "stacked covariance needs p >= 1");
    if (max_lag() < p - 1)
        throw Error("invalid-argument", "need lags up to " + std::to_string(p - 1));
    const int d = dim;
    Matrix cz(d * p, d * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) cz.block(i * d, j * d, d, d) = at_signed(j - i);
    return cz;
}

void TimeSeries::validate() const {
    if (values.rows() < 1) throw Error("invalid-argument", "time series is empty");
    if (!values.allFinite())
        throw Error("invalid-argument", "time series contains non-finite values");
}

TimeSeries TimeSeries::reversed() const {
    TimeSeries out;
    out.values = values.colwise().reverse();
    out.seed = seed;
    return out;
}

TimeSeries TimeSeries::channel(int c) const {
    TimeSeries out;
    out.values = values.col(c);
    return out;
}

TimeSeries TimeSeries::channels(int c0, int c1) const {
    TimeSeries out;
    out.values.resize(values.rows(), 2);
    out.values.col(0) = values.col(c0);
    out.values.col(1) = values.col(c1);
    out.seed = seed;
    return out;
}

CompanionForm companion_form(const VarModel& model) {
    model.validate();
    const int d = model.d, p = model.p, m = d * p;
    CompanionForm cf;
    cf.p = p;
    cf.d = d;
    cf.matrix = Matrix::Zero(m, m);
    for (int h = 0; h < p; ++h) cf.matrix.block(0, h * d, d, d) = model.coeffs[h];
    for (int i = 1; i < p; ++i)
        cf.matrix.block(i * d, (i - 1) * d, d, d) = Matrix::Identity(d, d);
    cf.resid_cov = Matrix::Zero(m, m);
    cf.resid_cov.topLeftCorner(d, d) = model.resid_cov;
    return cf;
}

double spectral_radius(const Matrix& A) {
    if (A.rows() == 1) return std::abs(A(0, 0));
    Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport check_stability(const VarModel& model) {
    const CompanionForm cf = companion_form(model);
    StabilityReport rep;
    rep.spectral_radius = spectral_radius(cf.matrix);
    rep.stable = rep.spectral_radius < 1.0 - kStabilityMargin;
    return rep;
}

namespace {

void require_stable(const VarModel& model) {
    const StabilityReport rep = check_stability(model);
    if (!rep.stable) {
        std::ostringstream msg;
        msg << "model is not stable (spectral radius " << rep.spectral_radius << ")";
        throw Error("unstable-model", msg.str());
    }
}

// Discrete Lyapunov solve X = A X A^T + Q. Kronecker inversion for small
// state dimension, Smith doubling otherwise.
Matrix lyapunov_solve(const Matrix& A, const Matrix& Q) {
    const long m = A.rows();
    Matrix X;
    if (m <= 12) {
        Matrix K = Matrix::Identity(m * m, m * m);
        // K -= kron(A, A), with vec in column-major order: vec(AXA^T) = (A kron A) vec X
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j)
                K.block(i * m, j * m, m, m) -= A(i, j) * A;
        Vector q(m * m);
        for (long j = 0; j < m; ++j) q.segment(j * m, m) = Q.col(j);
        Vector x = K.partialPivLu().solve(q);
        X.resize(m, m);
        for (long j = 0; j < m; ++j) X.col(j) = x.segment(j * m, m);
    } else {
        X = Q;
        Matrix B = A;
        for (int it = 0; it < 100; ++it) {
            Matrix delta = B * X * B.transpose();
            X += delta;
            const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
            if (delta.cwiseAbs().maxCoeff() < 1e-18 * scale) break;
            B = B * B;
        }
    }
    X = ((X + X.transpose()) / 2.0).eval();
    const Matrix resid = X - A * X * A.transpose() - Q;
    if (resid.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, X.cwiseAbs().maxCoeff()))
        throw Error("internal", "Lyapunov solve did not converge");
    return X;
}

}  // namespace

CrossCovSequence solve_cross_covariances(const VarModel& model, int h_max) {
    model.validate();
    require_stable(model);
    if (h_max < 0) throw Error("invalid-argument", "h_max must be >= 0");
    const int d = model.d, p = model.p;
    const CompanionForm cf = companion_form(model);
    const Matrix cz0 = lyapunov_solve(cf.matrix, cf.resid_cov);

    CrossCovSequence covs;
    covs.dim = d;
    covs.lags.resize(h_max + 1);
    for (int h = 0; h <= h_max && h < p; ++h) covs.lags[h] = cz0.block(0, h * d, d, d);
    covs.lags[0] = ((covs.lags[0] + covs.lags[0].transpose()) / 2.0).eval();
    for (int h = std::min(h_max + 1, p); h <= h_max; ++h) {
        Matrix c = Matrix::Zero(d, d);
        for (int k = 1; k <= p; ++k) {
            const int lag = h - k;
            c += model.coeffs[k - 1] * (lag >= 0 ? covs.lags[lag]
                                                 : Matrix(covs.lags[-lag].transpose()));
        }
        covs.lags[h] = c;
    }
    return covs;
}

VarModel var_from_covariances(const CrossCovSequence& covs, int p) {
    if (p < 1) throw Error("invalid-argument", "order must be >= 1");
    if (covs.max_lag() < p)
        throw Error("invalid-argument",
                    "need lags 0.." + std::to_string(p) + " to recover a VAR(" +
                        std::to_string(p) + ")");
    const int d = covs.dim;
    const Matrix cz0 = covs.stacked_zero(p);

    Eigen::SelfAdjointEigenSolver<Matrix> es(cz0);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_min <= 0.0 || lam_max / lam_min > kMaxConditionNumber) {
        std::ostringstream msg;
        msg << "stacked covariance C_Z(0) is singular or ill-conditioned (condition number "
            << (lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity())
            << ")";
        throw Error("singular-matrix", msg.str());
    }

    Matrix W(d, d * p);
    for (int h = 1; h <= p; ++h) W.middleCols((h - 1) * d, d) = covs.at(h);

    VarModel model;
    model.p = p;
    model.d = d;
    const Matrix coeff_row = cz0.ldlt().solve(W.transpose()).transpose();
    model.coeffs.resize(p);
    for (int h = 0; h < p; ++h) model.coeffs[h] = coeff_row.middleCols(h * d, d);
    Matrix sigma = covs.at(0) - coeff_row * cz0 * coeff_row.transpose();
    model.resid_cov = (sigma + sigma.transpose()) / 2.0;
    return model;
}

Matrix psd_sqrt(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    Vector lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (long i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-9 * scale)
            throw Error("invalid-argument", "matrix is not positive semidefinite");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    return es.eigenvectors() * lam.asDiagonal();
}

TimeSeries simulate(const VarModel& model, long T, Rng& rng, long burn_in) {
    model.validate();
    require_stable(model);
    if (T < 1) throw Error("invalid-argument", "T must be >= 1");
    if (burn_in < 0) throw Error("invalid-argument", "burn_in must be >= 0");
    const int d = model.d, p = model.p;
    const Matrix L = psd_sqrt(model.resid_cov);

    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix history = Matrix::Zero(p, d);  // row h-1 holds z_{t-h}
    TimeSeries out;
    out.values.resize(T, d);
    Vector g(d), z(d);
    for (long t = 0; t < burn_in + T; ++t) {
        for (int i = 0; i < d; ++i) g(i) = gauss(rng);
        z = L * g;
        for (int h = 1; h <= p; ++h) z += model.coeffs[h - 1] * history.row(h - 1).transpose();
        for (int h = p - 1; h >= 1; --h) history.row(h) = history.row(h - 1);
        history.row(0) = z.transpose();
        if (t >= burn_in) out.values.row(t - burn_in) = z.transpose();
    }
    return out;
}

namespace detail {

LaggedFit ols_lagged(const Matrix& z, const std::vector<int>& offsets, long t_begin,
                     long t_end) {
    const long T = z.rows();
    const int d = static_cast<int>(z.cols());
    const int n_off = static_cast<int>(offsets.size());
    const int k = n_off * d;
    const long t_eff = t_end - t_begin;
    if (t_eff < k + 1)
        throw Error("insufficient-data",
                    "window of " + std::to_string(t_eff) + " targets cannot support " +
                        std::to_string(k) + " regressors");
    for (int o : offsets) {
        if (t_begin + o < 0 || t_end - 1 + o >= T)
            throw Error("insufficient-data", "lag window exceeds the series");
    }

    Vector mean(d);
    for (int c = 0; c < d; ++c) mean(c) = z.col(c).mean();
    Matrix zc = z.rowwise() - mean.transpose();

    // Regressor columns in natural (offset-major) order.
    Matrix X(t_eff, k);
    for (int o = 0; o < n_off; ++o)
        for (int c = 0; c < d; ++c)
            X.col(o * d + c) = zc.col(c).segment(t_begin + offsets[o], t_eff);
    Matrix Y = zc.middleRows(t_begin, t_eff);

    // Entrywise Gram so that permuted sub-problems are exact index gathers.
    Matrix G(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) G(a, b) = G(b, a) = X.col(a).dot(X.col(b));

    LaggedFit fit;
    fit.coeffs.resize(d, k);
    fit.fitted.resize(t_eff, d);
    fit.resid.resize(t_eff, d);
    fit.mean = mean;
    fit.t_eff = t_eff;
    fit.t_begin = t_begin;

    std::vector<int> perm(k);
    Matrix Gp(k, k);
    Vector rhs(k);
    for (int c = 0; c < d; ++c) {
        // Own-channel lags first, remaining channels in cyclic order; the
        // solved problem for channel c is then identical under any relabeling
        // of the other channels.
        int pos = 0;
        for (int cc = 0; cc < d; ++cc) {
            const int ch = (c + cc) % d;
            for (int o = 0; o < n_off; ++o) perm[pos++] = o * d + ch;
        }
        for (int a = 0; a < k; ++a) {
            rhs(a) = X.col(perm[a]).dot(Y.col(c));
            for (int b = 0; b < k; ++b) Gp(a, b) = G(perm[a], perm[b]);
        }
        Eigen::LDLT<Matrix> ldlt(Gp);
        const Vector D = ldlt.vectorD();
        const double d_max = D.cwiseAbs().maxCoeff();
        if (D.minCoeff() <= 0.0 || D.minCoeff() < 1e-13 * d_max)
            throw Error("rank-deficient", "regressor Gram matrix is rank deficient");
        const Vector beta = ldlt.solve(rhs);

        Vector yhat = Vector::Zero(t_eff);
        for (int a = 0; a < k; ++a) yhat += beta(a) * X.col(perm[a]);
        fit.fitted.col(c) = yhat;
        fit.resid.col(c) = Y.col(c) - yhat;
        for (int a = 0; a < k; ++a) fit.coeffs(c, perm[a]) = beta(a);
    }

    fit.rss.resize(d, d);
    for (int c1 = 0; c1 < d; ++c1)
        for (int c2 = 0; c2 < d; ++c2) fit.rss(c1, c2) = fit.resid.col(c1).dot(fit.resid.col(c2));
    return fit;
}

}  // namespace detail

VarFit fit_var_ols_full(const TimeSeries& series, int p, Direction direction,
                        long window_start) {
    series.validate();
    if (p < 1) throw Error("invalid-argument", "order must be >= 1");
    if (direction == Direction::backward) {
        // Regressing z_t on z_{t+1}..z_{t+p} is, row for row, the forward fit
        // of the index-reversed series.
        return fit_var_ols_full(series.reversed(), p, Direction::forward, window_start);
    }
    const long T = series.length();
    const int d = series.dim();
    const long t0 = window_start < 0 ? p : window_start;
    if (t0 < p) throw Error("invalid-argument", "window start must be >= p");

    std::vector<int> offsets(p);
    for (int h = 1; h <= p; ++h) offsets[h - 1] = -h;
    detail::LaggedFit fit = detail::ols_lagged(series.values, offsets, t0, T);

    VarFit out;
    out.model.p = p;
    out.model.d = d;
    out.model.coeffs.resize(p);
    for (int h = 0; h < p; ++h) out.model.coeffs[h] = fit.coeffs.middleCols(h * d, d);
    out.t_eff = fit.t_eff;
    out.rss = fit.rss;
    const long dof = fit.t_eff - static_cast<long>(d) * p;
    out.model.resid_cov = fit.rss / static_cast<double>(dof);
    out.mean = fit.mean;
    return out;
}

VarModel fit_var_ols(const TimeSeries& series, int p, Direction direction) {
    return fit_var_ols_full(series, p, direction).model;
}

ArModel fit_ar_univariate(const TimeSeries& series, int p, Direction direction) {
    if (series.dim() != 1)
        throw Error("invalid-argument", "univariate fit requires a 1-d series");
    const VarFit fit = fit_var_ols_full(series, p, direction);
    ArModel ar;
    ar.p = p;
    ar.coeffs.resize(p);
    for (int h = 0; h < p; ++h) ar.coeffs[h] = fit.model.coeffs[h](0, 0);
    ar.resid_var = fit.model.resid_cov(0, 0);
    return ar;
}

}  // namespace trgc
