#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qcd/gbt.hpp"

using namespace qcd;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd X(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            X(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return X;
}

}  // namespace

TEST_CASE("constant target collapses to the base prediction") {
    const Eigen::MatrixXd X = random_matrix(20, 3, 1);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 3.0);
    const GbtModel model = fit(X, y, {});
    CHECK(model.degenerate_target);
    CHECK(model.trees.empty());
    const Eigen::VectorXd pred = predict(model, X);
    for (int i = 0; i < pred.size(); ++i) CHECK(pred[i] == 3.0);
}

TEST_CASE("a linear function is learned to high training accuracy") {
    const Eigen::MatrixXd X = random_matrix(100, 2, 2);
    const Eigen::VectorXd y = X.col(1);

    GbtParams params;
    params.n_estimators = 200;
    params.max_depth = 7;
    params.learning_rate = 0.1;
    params.subsample = 1.0;
    const GbtModel model = fit(X, y, params);
    const EvalReport rep = evaluate(y, predict(model, X));
    CHECK(rep.cod > 0.99);

    // determinism: the same seed gives bit-identical predictions
    const GbtModel again = fit(X, y, params);
    CHECK(predict(again, X) == predict(model, X));
}

TEST_CASE("identical rows with different targets share their mean") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 1, 2;
    Eigen::VectorXd y(2);
    y << 0.0, 1.0;
    GbtParams params;
    params.n_estimators = 50;
    params.learning_rate = 0.5;
    params.subsample = 1.0;
    const GbtModel model = fit(X, y, params);
    const Eigen::VectorXd pred = predict(model, X);
    CHECK(pred[0] == pred[1]);
    CHECK(pred[0] == doctest::Approx(0.5));
}

TEST_CASE("prediction is base plus scaled tree outputs") {
    GbtModel model;
    model.base_prediction = 0.0;
    model.learning_rate = 0.5;
    model.n_features = 1;

    Eigen::MatrixXd X(2, 1);
    X << 0.0, 2.0;
    CHECK(predict(model, X) == Eigen::Vector2d(0, 0));  // no trees: base only

    RegressionTree stump;
    stump.nodes = {{0, 1.0, 1, 2, 0.0}, {-1, 0, -1, -1, -1.0}, {-1, 0, -1, -1, 1.0}};
    model.trees.push_back(stump);
    CHECK(predict(model, X) == Eigen::Vector2d(-0.5, 0.5));

    Eigen::MatrixXd bad(2, 3);
    CHECK_THROWS_AS(predict(model, bad), ShapeMismatch);
}

TEST_CASE("fit rejects inconsistent shapes") {
    CHECK_THROWS_AS(fit(random_matrix(5, 2, 3), Eigen::VectorXd::Zero(4), {}),
                    ShapeMismatch);
    Eigen::MatrixXd with_nan = random_matrix(5, 2, 4);
    with_nan(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit(with_nan, Eigen::VectorXd::Zero(5), {}), ShapeMismatch);
}

TEST_CASE("evaluation metrics on known vectors") {
    Eigen::Vector3d t(0, 1, 2);

    const EvalReport perfect = evaluate(t, t);
    CHECK(perfect.cod == 1.0);
    CHECK(perfect.pcc == doctest::Approx(1.0));
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.rmse == 0.0);

    const EvalReport mean_pred = evaluate(t, Eigen::Vector3d(1, 1, 1));
    CHECK(mean_pred.cod == doctest::Approx(0.0));
    CHECK_FALSE(mean_pred.pcc_defined);
    CHECK(mean_pred.pcc == 0.0);

    // hand arithmetic: errors (0,0,2), SS_res 4, SS_tot 2,
    // cross sum 4, sqrt(2 * 26/3) in the denominator
    const EvalReport rep = evaluate(t, Eigen::Vector3d(0, 1, 4));
    CHECK(rep.mae == doctest::Approx(2.0 / 3));
    CHECK(rep.rmse == doctest::Approx(std::sqrt(4.0 / 3)));
    CHECK(rep.cod == doctest::Approx(-1.0));
    CHECK(rep.pcc == doctest::Approx(4.0 / std::sqrt(52.0 / 3)));
    CHECK(rep.pcc == doctest::Approx(0.9607689228305228));

    CHECK_THROWS_AS(evaluate(t, Eigen::Vector2d(0, 1)), LengthMismatch);
    CHECK_THROWS_AS(evaluate(Eigen::VectorXd(), Eigen::VectorXd()), LengthMismatch);
}

TEST_CASE("rmse dominates mae on random report pairs") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 20);
        Eigen::VectorXd a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<double>(rng() % 1000) / 100.0;
            b[i] = static_cast<double>(rng() % 1000) / 100.0;
        }
        const EvalReport rep = evaluate(a, b);
        CHECK(rep.rmse >= rep.mae);
        CHECK(rep.cod <= 1.0);
        CHECK(std::abs(rep.pcc) <= 1.0 + 1e-12);
    }
}

TEST_CASE("training mse never increases") {
    const Eigen::MatrixXd X = random_matrix(80, 3, 5);
    Eigen::VectorXd y = 2.0 * X.col(0) - X.col(2);
    GbtParams params;
    params.n_estimators = 120;
    params.subsample = 0.7;
    params.learning_rate = 0.1;
    params.seed = 99;
    const GbtModel model = fit(X, y, params);
    REQUIRE(model.training_mse.size() == 120);
    for (size_t t = 1; t < model.training_mse.size(); ++t)
        CHECK(model.training_mse[t] <= model.training_mse[t - 1] + 1e-15);
}

TEST_CASE("threshold splits ignore positive feature scaling") {
    const Eigen::MatrixXd X = random_matrix(60, 3, 6);
    Eigen::VectorXd y = X.col(0) + 0.5 * X.col(1);
    GbtParams params;
    params.n_estimators = 60;
    params.seed = 4;

    Eigen::MatrixXd scaled = X;
    scaled.col(1) *= 1000.0;

    const Eigen::VectorXd a = predict(fit(X, y, params), X);
    const Eigen::VectorXd b = predict(fit(scaled, y, params), scaled);
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("cross-validation is deterministic and sane") {
    const Eigen::MatrixXd X = random_matrix(40, 2, 7);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(40, 1.5);
    GbtParams params;
    params.n_estimators = 5;

    // leave-one-out on a constant target predicts exactly
    const CvResult loo = cross_validate(X, y, 40, 1, params, 123);
    CHECK(loo.mean.mae == 0.0);
    CHECK(loo.fold_reports.size() == 40);

    Eigen::VectorXd varied = y;
    varied[0] = 9.0;
    const CvResult a = cross_validate(X, varied, 5, 2, params, 7);
    const CvResult b = cross_validate(X, varied, 5, 2, params, 7);
    CHECK(a.mean.cod == b.mean.cod);
    CHECK(a.mean.mae == b.mean.mae);
    REQUIRE(a.fold_reports.size() == 10);
    for (size_t i = 0; i < a.fold_reports.size(); ++i)
        CHECK(a.fold_reports[i].rmse == b.fold_reports[i].rmse);

    CHECK_THROWS_AS(cross_validate(X, varied, 41, 1, params, 0), TooFewRows);
    CHECK_THROWS_AS(cross_validate(X, varied, 1, 1, params, 0), TooFewRows);
}

TEST_CASE("near-linear synthetic target cross-validates accurately") {
    std::mt19937_64 rng(77);
    auto gauss = [&]() {
        // Box-Muller from explicit uniform draws, deterministic across stdlibs
        const double u1 = (static_cast<double>(rng() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    };
    const int n = 150;
    const Eigen::MatrixXd X = random_matrix(n, 2, 8);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * X(i, 0) + 0.01 * gauss();

    GbtParams params;  // desk-scale defaults
    const CvResult cv = cross_validate(X, y, 5, 2, params, 1);
    CHECK(cv.mean.cod > 0.95);
}

TEST_CASE("model json round-trips bit-exact predictions") {
    const Eigen::MatrixXd X = random_matrix(50, 3, 10);
    const Eigen::VectorXd y = X.col(0).array() * X.col(1).array();
    GbtParams params;
    params.n_estimators = 30;
    const GbtModel model = fit(X, y, params);
    const GbtModel restored = model_from_json(model_to_json(model));
    CHECK(predict(restored, X) == predict(model, X));
}
