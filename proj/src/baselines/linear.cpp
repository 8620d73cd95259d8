#include "burstcast/baselines/linear.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "burstcast/core/error.hpp"

namespace burstcast::baselines {

double LinearModel::predict(std::span<const double> row) const {
    if (row.size() != coefficients.size()) throw ShapeError("linear model: row width differs from coefficient count");
    double s = intercept;
    for (std::size_t j = 0; j < row.size(); ++j) s += coefficients[j] * row[j];
    return s;
}

LinearModel linear_fit(const Matrix& X, std::span<const double> y, double lambda) {
    const std::size_t n = X.rows;
    const std::size_t F = X.cols;
    if (y.size() != n) throw ShapeError("linear_fit: design rows and target length differ");
    if (n == 0) throw DataError("linear_fit: empty design");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("linear_fit: lambda must be >= 0");
    const bool ridge = lambda > 0.0;
    if (!ridge && n < F + 1)
        throw DataError("linear_fit: fewer rows than columns; use lambda > 0");

    const std::size_t m = ridge ? n + F : n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(F + 1));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < F; ++j) A(i, j) = X(i, j);
        A(i, F) = 1.0;
        b(i) = y[i];
    }
    if (ridge) {
        const double r = std::sqrt(lambda);
        for (std::size_t j = 0; j < F; ++j) A(n + j, j) = r;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (!ridge && qr.rank() < static_cast<Eigen::Index>(F + 1))
        throw DataError("linear_fit: design is rank deficient; use lambda > 0");
    const Eigen::VectorXd beta = qr.solve(b);

    LinearModel model;
    model.lambda = lambda;
    model.coefficients.resize(F);
    for (std::size_t j = 0; j < F; ++j) model.coefficients[j] = beta(j);
    model.intercept = beta(F);
    return model;
}

LinearModel fit_linear_baseline(const FeatureMatrix& fm, const Scaler& scaler, const SplitIndex& split,
                                double lambda) {
    const Range tr = split.train;
    if (tr.size() < 2) throw DataError("linear baseline: training partition needs at least 2 weeks");
    const std::size_t G = fm.n_geographies();
    const std::size_t F = fm.n_features();
    const std::size_t per = tr.size() - 1;
    Matrix X(per * G, F);
    std::vector<double> y(per * G);
    std::size_t i = 0;
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t r = tr.begin; r + 1 < tr.end; ++r, ++i) {
            scaler.transform(fm.rows[g].row(r), X.row(i));
            y[i] = fm.target[g][r];
        }
    return linear_fit(X, y, lambda);
}

double predict_linear_baseline(const LinearModel& model, const FeatureMatrix& fm, const Scaler& scaler,
                               std::size_t geo, std::size_t row) {
    std::vector<double> x(fm.n_features());
    scaler.transform(fm.rows.at(geo).row(row), x);
    return model.predict(x);
}

}  // namespace burstcast::baselines
