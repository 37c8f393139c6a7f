#ifndef QCD_GBT_HPP
#define QCD_GBT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcd {

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewRows : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GbtParams {
    int n_estimators = 500;
    int max_depth = 7;
    double learning_rate = 0.05;
    double subsample = 0.7;       // row fraction per tree, in (0,1]
    int min_samples_split = 2;
    uint64_t seed = 0;
};

/// Axis-aligned regression tree. Leaves have feature == -1; internal nodes
/// route rows with x[feature] < threshold to `left`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

struct GbtModel {
    double base_prediction = 0.0;
    double learning_rate = 0.0;
    int n_features = 0;
    bool degenerate_target = false;  // constant y: model is the base only
    std::vector<RegressionTree> trees;
    std::vector<double> training_mse;  // full-training-set MSE after each round
};

/**
 * Gradient boosting on squared error. Each round fits a tree to the current
 * residuals on a without-replacement row subsample (seeded, deterministic);
 * split search is exact greedy over sorted unique values with midpoint
 * thresholds, ties broken toward the lowest feature index then the lowest
 * threshold. Leaf values are the mean residual of the full training rows
 * routed to the leaf, which makes the full-training MSE non-increasing for
 * any learning rate in (0,2].
 */
GbtModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtParams& params);

Eigen::VectorXd predict(const GbtModel& model, const Eigen::MatrixXd& X);

struct EvalReport {
    double cod = 0, pcc = 0, mae = 0, rmse = 0;
    bool pcc_defined = true;  // false when either vector is constant
};

/// COD = 1 - SS_res/SS_tot, sample Pearson correlation, MAE, RMSE.
EvalReport evaluate(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

struct CvResult {
    EvalReport mean;
    std::vector<EvalReport> fold_reports;  // repeats x folds entries
};

/// Repeated k-fold cross-validation: per repeat a seeded permutation splits
/// the rows into near-equal folds; metrics are averaged over all folds and
/// repeats. Deterministic given the seed.
CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int folds,
                        int repeats, const GbtParams& params, uint64_t seed);

std::string model_to_json(const GbtModel& model);
GbtModel model_from_json(const std::string& text);

}  // namespace qcd

#endif
