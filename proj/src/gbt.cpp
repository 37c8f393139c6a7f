#include "qcd/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace qcd {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy split of `rows` minimizing squared error of the residuals.
// gain = (sum_L)^2/n_L + (sum_R)^2/n_R - (sum)^2/n; the residual-square
// terms cancel between parent and children.
SplitCandidate best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                          const std::vector<int>& rows) {
    SplitCandidate best;
    const int n = static_cast<int>(rows.size());
    double total = 0;
    for (int i : rows) total += r[i];
    const double parent_score = total * total / n;

    std::vector<std::pair<double, int>> order(n);
    for (int f = 0; f < X.cols(); ++f) {
        for (int k = 0; k < n; ++k) order[k] = {X(rows[k], f), rows[k]};
        std::sort(order.begin(), order.end());
        if (order.front().first == order.back().first) continue;

        double left_sum = 0;
        for (int k = 0; k + 1 < n; ++k) {
            left_sum += r[order[k].second];
            const double a = order[k].first, b = order[k + 1].first;
            if (a == b) continue;
            double threshold = 0.5 * (a + b);
            if (!(a < threshold)) threshold = b;  // midpoint rounded down to a
            const double right_sum = total - left_sum;
            const int nl = k + 1, nr = n - nl;
            const double gain =
                left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
            if (gain > kMinGain && gain > best.gain) {
                best = {true, f, threshold, gain};
            }
        }
    }
    return best;
}

int build_node(RegressionTree& tree, const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
               std::vector<int>& rows, int depth, const GbtParams& params) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});

    SplitCandidate split;
    if (depth < params.max_depth &&
        static_cast<int>(rows.size()) >= params.min_samples_split)
        split = best_split(X, r, rows);

    if (!split.found) {
        double sum = 0;
        for (int i : rows) sum += r[i];
        tree.nodes[id].value = sum / static_cast<double>(rows.size());
        return id;
    }

    std::vector<int> left, right;
    for (int i : rows)
        (X(i, split.feature) < split.threshold ? left : right).push_back(i);

    tree.nodes[id].feature = split.feature;
    tree.nodes[id].threshold = split.threshold;
    const int l = build_node(tree, X, r, left, depth + 1, params);
    const int rgt = build_node(tree, X, r, right, depth + 1, params);
    tree.nodes[id].left = l;
    tree.nodes[id].right = rgt;
    return id;
}

// Leaf index a row is routed to.
int route(const RegressionTree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    int i = 0;
    while (tree.nodes[i].feature >= 0)
        i = x[tree.nodes[i].feature] < tree.nodes[i].threshold ? tree.nodes[i].left
                                                               : tree.nodes[i].right;
    return i;
}

// Partial Fisher-Yates with an explicit draw so results do not depend on
// the standard library's shuffle implementation.
std::vector<int> draw_subsample(int n, int k, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng() % static_cast<uint64_t>(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (!X.allFinite() || !y.allFinite())
        throw ShapeMismatch("fit: input contains NaN or infinite values");
}

}  // namespace

GbtModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtParams& params) {
    if (X.rows() != y.size())
        throw ShapeMismatch("fit: X has " + std::to_string(X.rows()) + " rows but y has " +
                            std::to_string(y.size()));
    if (X.rows() < 2) throw ShapeMismatch("fit: need at least 2 rows");
    if (params.n_estimators < 1 || params.max_depth < 1 || !(params.learning_rate > 0) ||
        !(params.subsample > 0 && params.subsample <= 1))
        throw std::invalid_argument("fit: invalid GbtParams");
    check_finite(X, y);

    const int n = static_cast<int>(X.rows());
    GbtModel model;
    model.n_features = static_cast<int>(X.cols());
    model.learning_rate = params.learning_rate;
    model.base_prediction = y.mean();

    Eigen::VectorXd residual = y.array() - model.base_prediction;
    if (residual.cwiseAbs().maxCoeff() == 0.0) {
        model.degenerate_target = true;  // constant target: base only
        return model;
    }

    std::mt19937_64 rng(params.seed);
    const int k = std::max(1, static_cast<int>(std::llround(params.subsample * n)));

    for (int round = 0; round < params.n_estimators; ++round) {
        std::vector<int> rows = draw_subsample(n, k, rng);
        std::sort(rows.begin(), rows.end());

        RegressionTree tree;
        build_node(tree, X, residual, rows, 0, params);

        // Re-estimate leaves on the full training set: each leaf becomes the
        // mean residual of all rows it receives, which is what keeps the
        // training MSE monotone.
        std::vector<double> leaf_sum(tree.nodes.size(), 0.0);
        std::vector<int> leaf_count(tree.nodes.size(), 0);
        std::vector<int> leaf_of(n);
        for (int i = 0; i < n; ++i) {
            const int leaf = route(tree, X.row(i));
            leaf_of[i] = leaf;
            leaf_sum[leaf] += residual[i];
            ++leaf_count[leaf];
        }
        for (size_t l = 0; l < tree.nodes.size(); ++l)
            if (tree.nodes[l].feature < 0)
                tree.nodes[l].value = leaf_count[l] > 0 ? leaf_sum[l] / leaf_count[l] : 0.0;

        for (int i = 0; i < n; ++i)
            residual[i] -= params.learning_rate * tree.nodes[leaf_of[i]].value;

        model.trees.push_back(std::move(tree));
        model.training_mse.push_back(residual.squaredNorm() / n);
    }
    return model;
}

Eigen::VectorXd predict(const GbtModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.n_features)
        throw ShapeMismatch("predict: expected " + std::to_string(model.n_features) +
                            " feature columns, got " + std::to_string(X.cols()));
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), model.base_prediction);
    for (const RegressionTree& tree : model.trees)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            out[i] += model.learning_rate * tree.predict_row(X.row(i));
    return out;
}

EvalReport evaluate(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.size() == 0)
        throw LengthMismatch("evaluate: vectors must have equal nonzero length");
    const auto n = static_cast<double>(y_true.size());

    EvalReport rep;
    const Eigen::VectorXd err = y_true - y_pred;
    rep.mae = err.cwiseAbs().sum() / n;
    rep.rmse = std::sqrt(err.squaredNorm() / n);

    const double mean_t = y_true.mean();
    const double ss_tot = (y_true.array() - mean_t).square().sum();
    const double ss_res = err.squaredNorm();
    if (ss_tot > 0)
        rep.cod = 1.0 - ss_res / ss_tot;
    else
        rep.cod = ss_res == 0 ? 1.0 : 0.0;  // constant target edge case

    const double mean_p = y_pred.mean();
    const Eigen::ArrayXd dt = y_true.array() - mean_t;
    const Eigen::ArrayXd dp = y_pred.array() - mean_p;
    const double denom = std::sqrt(dt.square().sum() * dp.square().sum());
    if (denom > 0) {
        rep.pcc = (dt * dp).sum() / denom;
    } else {
        rep.pcc = 0.0;
        rep.pcc_defined = false;
    }
    return rep;
}

CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int folds,
                        int repeats, const GbtParams& params, uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    if (folds < 2 || n < folds)
        throw TooFewRows("cross_validate: need folds >= 2 and rows >= folds");
    if (X.rows() != y.size())
        throw ShapeMismatch("cross_validate: X/y row mismatch");
    if (repeats < 1) throw std::invalid_argument("cross_validate: repeats must be >= 1");

    std::mt19937_64 rng(seed);
    CvResult result;

    for (int rep = 0; rep < repeats; ++rep) {
        std::vector<int> perm = [&] {
            std::vector<int> p(n);
            std::iota(p.begin(), p.end(), 0);
            for (int i = n - 1; i > 0; --i) {
                const int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
                std::swap(p[i], p[j]);
            }
            return p;
        }();

        int cursor = 0;
        for (int f = 0; f < folds; ++f) {
            const int size = n / folds + (f < n % folds ? 1 : 0);
            std::vector<int> test(perm.begin() + cursor, perm.begin() + cursor + size);
            cursor += size;
            std::vector<char> in_test(n, 0);
            for (int i : test) in_test[i] = 1;

            Eigen::MatrixXd X_train(n - size, X.cols()), X_test(size, X.cols());
            Eigen::VectorXd y_train(n - size), y_test(size);
            int a = 0, b = 0;
            for (int i = 0; i < n; ++i) {
                if (in_test[i]) {
                    X_test.row(b) = X.row(i);
                    y_test[b++] = y[i];
                } else {
                    X_train.row(a) = X.row(i);
                    y_train[a++] = y[i];
                }
            }

            GbtParams fold_params = params;
            fold_params.seed =
                params.seed ^ (0x9e3779b97f4a7c15ull * (uint64_t(rep) * folds + f + 1));
            const GbtModel model = fit(X_train, y_train, fold_params);
            result.fold_reports.push_back(evaluate(y_test, predict(model, X_test)));
        }
    }

    EvalReport& mean = result.mean;
    mean.pcc_defined = true;
    for (const EvalReport& rep : result.fold_reports) {
        mean.cod += rep.cod;
        mean.pcc += rep.pcc;
        mean.mae += rep.mae;
        mean.rmse += rep.rmse;
        mean.pcc_defined = mean.pcc_defined && rep.pcc_defined;
    }
    const double count = static_cast<double>(result.fold_reports.size());
    mean.cod /= count;
    mean.pcc /= count;
    mean.mae /= count;
    mean.rmse /= count;
    return result;
}

std::string model_to_json(const GbtModel& model) {
    nlohmann::ordered_json root;
    root["base"] = model.base_prediction;
    root["learning_rate"] = model.learning_rate;
    root["n_features"] = model.n_features;
    root["degenerate_target"] = model.degenerate_target;
    root["trees"] = nlohmann::ordered_json::array();
    for (const RegressionTree& tree : model.trees) {
        nlohmann::ordered_json feature = nlohmann::ordered_json::array();
        nlohmann::ordered_json threshold = nlohmann::ordered_json::array();
        nlohmann::ordered_json left = nlohmann::ordered_json::array();
        nlohmann::ordered_json right = nlohmann::ordered_json::array();
        nlohmann::ordered_json value = nlohmann::ordered_json::array();
        for (const TreeNode& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            value.push_back(node.value);
        }
        nlohmann::ordered_json t;
        t["feature"] = std::move(feature);
        t["threshold"] = std::move(threshold);
        t["left"] = std::move(left);
        t["right"] = std::move(right);
        t["value"] = std::move(value);
        root["trees"].push_back(std::move(t));
    }
    return root.dump();
}

GbtModel model_from_json(const std::string& text) {
    nlohmann::json root = nlohmann::json::parse(text);
    GbtModel model;
    model.base_prediction = root.at("base").get<double>();
    model.learning_rate = root.at("learning_rate").get<double>();
    model.n_features = root.at("n_features").get<int>();
    model.degenerate_target = root.value("degenerate_target", false);
    for (const auto& t : root.at("trees")) {
        RegressionTree tree;
        const auto& feature = t.at("feature");
        const size_t count = feature.size();
        for (size_t i = 0; i < count; ++i) {
            TreeNode node;
            node.feature = feature[i].get<int>();
            node.threshold = t.at("threshold")[i].get<double>();
            node.left = t.at("left")[i].get<int>();
            node.right = t.at("right")[i].get<int>();
            node.value = t.at("value")[i].get<double>();
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace qcd
