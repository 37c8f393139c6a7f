#include "qcd/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcd/structure_io.hpp"
#include "qcd/verify.hpp"

namespace qcd::cli {

namespace {

struct IdMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
    file << text;
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaViolation("/", std::string("invalid config JSON: ") + e.what());
    }
    RunConfig config;
    if (root.contains("atom_sets")) {
        config.descriptors.atom_sets.clear();
        for (const auto& tag : root["atom_sets"]) {
            const std::string t = tag.get<std::string>();
            const auto& known = atom_set_tags();
            if (std::find(known.begin(), known.end(), t) == known.end())
                throw UnknownAtomSet(t);
            config.descriptors.atom_sets.push_back(t);
        }
    }
    config.descriptors.max_filtration =
        root.value("max_filtration", config.descriptors.max_filtration);
    config.descriptors.betti_bins = root.value("betti_bins", config.descriptors.betti_bins);
    config.descriptors.max_dim = root.value("max_dim", config.descriptors.max_dim);
    config.cv_folds = root.value("cv_folds", config.cv_folds);
    config.cv_repeats = root.value("cv_repeats", config.cv_repeats);
    config.seed = root.value("seed", config.seed);
    if (root.contains("gbt")) {
        const auto& g = root["gbt"];
        config.gbt.n_estimators = g.value("n_estimators", config.gbt.n_estimators);
        config.gbt.max_depth = g.value("max_depth", config.gbt.max_depth);
        config.gbt.learning_rate = g.value("learning_rate", config.gbt.learning_rate);
        config.gbt.subsample = g.value("subsample", config.gbt.subsample);
        config.gbt.min_samples_split =
            g.value("min_samples_split", config.gbt.min_samples_split);
        config.gbt.seed = g.value("seed", config.gbt.seed);
    }

    if (!(config.descriptors.max_filtration > 0))
        throw std::invalid_argument("config: max_filtration must be > 0");
    if (config.descriptors.betti_bins < 1)
        throw std::invalid_argument("config: betti_bins must be >= 1");
    if (config.descriptors.max_dim < 1 || config.descriptors.max_dim > 3)
        throw std::invalid_argument("config: max_dim must be in {1,2,3}");
    if (config.gbt.n_estimators < 1 || config.gbt.max_depth < 1 ||
        !(config.gbt.learning_rate > 0) ||
        !(config.gbt.subsample > 0 && config.gbt.subsample <= 1))
        throw std::invalid_argument("config: invalid gbt parameters");
    return config;
}

LoadedInput load_input(const std::string& path, const std::string& format,
                       std::vector<std::string>* warnings) {
    const std::string text = read_file(path);
    const std::string stem = std::filesystem::path(path).stem().string();

    std::string kind = format;
    if (kind.empty() || kind == "auto") {
        std::string ext = std::filesystem::path(path).extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext == ".cif") {
            kind = "cif";
        } else {
            // .json holds either a structure or an explicit filtration.
            kind = text.find("\"simplices\"") != std::string::npos ? "filtration" : "json";
        }
    }

    LoadedInput input;
    if (kind == "cif") {
        input.structure = parse_cif(text, warnings);
    } else if (kind == "json") {
        input.structure = parse_native(text, warnings);
    } else if (kind == "filtration") {
        input.is_filtration = true;
        input.filtration = parse_explicit_filtration(text);
    } else {
        throw std::invalid_argument("unknown input format '" + format + "'");
    }
    input.id = input.is_filtration || input.structure.name.empty() ? stem
                                                                   : input.structure.name;
    return input;
}

int cmd_features(const std::vector<std::string>& inputs, const RunConfig& config,
                 const std::string& format, std::ostream& out, std::ostream& err) {
    struct Row {
        bool ok = false;
        std::string id;
        FeatureVector features;
        std::string error;
        std::vector<std::string> warnings;
    };

    auto compute = [&](const std::string& path) {
        Row row;
        try {
            LoadedInput input = load_input(path, format, &row.warnings);
            if (input.is_filtration)
                throw std::runtime_error("features requires a structure input");
            row.id = input.id;
            row.features =
                assemble_features(input.structure, config.descriptors, &row.warnings);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    };

    // File-level parallelism; rows are emitted in input order regardless of
    // completion order.
    std::vector<std::future<Row>> futures;
    futures.reserve(inputs.size());
    for (const std::string& path : inputs)
        futures.push_back(std::async(std::launch::async, compute, path));

    std::vector<std::string> ids;
    std::vector<FeatureVector> rows;
    int failed = 0;
    for (size_t i = 0; i < futures.size(); ++i) {
        Row row = futures[i].get();
        for (const std::string& w : row.warnings) err << inputs[i] << ": " << w << "\n";
        if (!row.ok) {
            ++failed;
            err << "skipping " << inputs[i] << ": " << row.error << "\n";
            continue;
        }
        ids.push_back(std::move(row.id));
        rows.push_back(std::move(row.features));
    }

    std::ostringstream csv;
    write_feature_csv(csv, ids, rows, config.descriptors);
    out << csv.str();

    if (!inputs.empty() && failed == static_cast<int>(inputs.size())) {
        err << "all " << failed << " input(s) failed\n";
        return kExitData;
    }
    return kExitOk;
}

int cmd_barcodes(const std::string& input_path, const std::string& atom_set,
                 const RunConfig& config, const std::string& format, std::ostream& out,
                 std::ostream& err) {
    std::vector<std::string> warnings;
    LoadedInput input = load_input(input_path, format, &warnings);

    BarcodeSet plain_bs, quotient_bs;
    std::string set_label = atom_set;
    if (input.is_filtration) {
        plain_bs = reduce(input.filtration);
        quotient_bs = reduce(augment_gluing_stars(input.filtration, input.filtration.classes));
        set_label = "";
    } else {
        if (atom_set.empty()) {
            err << "barcodes: --atom-set is required for structure inputs\n";
            return kExitUsage;
        }
        QuotientBarcodes qb = compute_quotient_barcodes(
            input.structure, atom_set, config.descriptors.max_filtration,
            config.descriptors.max_dim, &warnings);
        plain_bs = qb.plain_barcodes;
        quotient_bs = qb.quotient_barcodes;
    }
    for (const std::string& w : warnings) err << input_path << ": " << w << "\n";

    std::string json = "{\"input\":\"" + input.id + "\"";
    if (!set_label.empty()) json += ",\"atom_set\":\"" + set_label + "\"";
    json += ",\"max_filtration\":" + fmt9(config.descriptors.max_filtration);
    json += ",\"plain\":" + barcode_set_to_json(plain_bs);
    json += ",\"quotient\":" + barcode_set_to_json(quotient_bs);
    json += "}\n";
    out << json;
    return kExitOk;
}

int cmd_verify(uint64_t seed, int trials, std::ostream& out, std::ostream& err) {
    verify::TrialOptions options;
    options.bipartite = true;
    options.with_oracle = true;
    const verify::TrialReport report = verify::run_trials(seed, trials, options);
    out << "verify: " << (report.trials - report.failures) << "/" << report.trials
        << " trials passed\n";
    for (const std::string& message : report.messages) err << message << "\n";
    return report.ok() ? kExitOk : kExitVerifyFailed;
}

FeatureTable read_feature_csv(std::istream& in) {
    FeatureTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty feature CSV");
    {
        std::stringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                first = false;
                continue;  // "id"
            }
            table.columns.push_back(cell);
        }
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        table.ids.push_back(cell);
        std::vector<double> row;
        row.reserve(table.columns.size());
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::runtime_error("feature CSV row " + std::to_string(rows.size() + 2) +
                                     " has " + std::to_string(row.size()) + " values, expected " +
                                     std::to_string(table.columns.size()));
        rows.push_back(std::move(row));
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.columns.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
    return table;
}

LabelTable read_label_csv(std::istream& in) {
    LabelTable table;
    std::string line;
    bool first_line = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, value;
        std::getline(ss, id, ',');
        std::getline(ss, value, ',');
        if (first_line) {
            first_line = false;
            char* end = nullptr;
            std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0') continue;  // header row
        }
        try {
            table.values.push_back(std::stod(value));
        } catch (const std::exception&) {
            throw std::runtime_error("label CSV: non-numeric value for id '" + id + "'");
        }
        table.ids.push_back(id);
    }
    return table;
}

namespace {

// Align labels to the feature-row order; every id must match exactly once.
Eigen::VectorXd align_labels(const FeatureTable& features, const LabelTable& labels) {
    std::vector<std::string> missing, extra;
    Eigen::VectorXd y(features.ids.size());
    for (size_t i = 0; i < features.ids.size(); ++i) {
        auto it = std::find(labels.ids.begin(), labels.ids.end(), features.ids[i]);
        if (it == labels.ids.end()) {
            missing.push_back(features.ids[i]);
            continue;
        }
        y[static_cast<Eigen::Index>(i)] =
            labels.values[static_cast<size_t>(it - labels.ids.begin())];
    }
    for (const std::string& id : labels.ids)
        if (std::find(features.ids.begin(), features.ids.end(), id) == features.ids.end())
            extra.push_back(id);
    if (!missing.empty() || !extra.empty()) {
        std::string what = "id mismatch between features and labels;";
        if (!missing.empty()) {
            what += " unlabeled:";
            for (const auto& id : missing) what += " " + id;
        }
        if (!extra.empty()) {
            what += " unmatched labels:";
            for (const auto& id : extra) what += " " + id;
        }
        throw IdMismatch(what);
    }
    return y;
}

}  // namespace

int cmd_train(const std::string& features_path, const std::string& labels_path,
              const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::ifstream fin(features_path), lin(labels_path);
    if (!fin) throw std::runtime_error("cannot open '" + features_path + "'");
    if (!lin) throw std::runtime_error("cannot open '" + labels_path + "'");
    const FeatureTable features = read_feature_csv(fin);
    const Eigen::VectorXd y = align_labels(features, read_label_csv(lin));

    const GbtModel model = fit(features.values, y, config.gbt);
    if (model.degenerate_target) err << "train: constant target, model is base only\n";
    out << model_to_json(model) << "\n";
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& features_path,
                std::ostream& out, std::ostream& err) {
    (void)err;
    const GbtModel model = model_from_json(read_file(model_path));
    std::ifstream fin(features_path);
    if (!fin) throw std::runtime_error("cannot open '" + features_path + "'");
    const FeatureTable features = read_feature_csv(fin);
    const Eigen::VectorXd predictions = predict(model, features.values);

    out << "id,prediction\n";
    for (size_t i = 0; i < features.ids.size(); ++i)
        out << features.ids[i] << "," << fmt9(predictions[static_cast<Eigen::Index>(i)])
            << "\n";
    return kExitOk;
}

int cmd_cv(const std::string& features_path, const std::string& labels_path,
           const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    std::ifstream fin(features_path), lin(labels_path);
    if (!fin) throw std::runtime_error("cannot open '" + features_path + "'");
    if (!lin) throw std::runtime_error("cannot open '" + labels_path + "'");
    const FeatureTable features = read_feature_csv(fin);
    const Eigen::VectorXd y = align_labels(features, read_label_csv(lin));

    const CvResult result = cross_validate(features.values, y, config.cv_folds,
                                           config.cv_repeats, config.gbt, config.seed);

    std::string json = "{";
    json += "\"cod\":" + fmt9(result.mean.cod);
    json += ",\"pcc\":" + fmt9(result.mean.pcc);
    json += ",\"mae\":" + fmt9(result.mean.mae);
    json += ",\"rmse\":" + fmt9(result.mean.rmse);
    json += ",\"folds\":" + std::to_string(config.cv_folds);
    json += ",\"repeats\":" + std::to_string(config.cv_repeats);
    json += ",\"per_fold\":[";
    for (size_t i = 0; i < result.fold_reports.size(); ++i) {
        const EvalReport& rep = result.fold_reports[i];
        if (i) json += ",";
        json += "{\"cod\":" + fmt9(rep.cod) + ",\"pcc\":" + fmt9(rep.pcc) +
                ",\"mae\":" + fmt9(rep.mae) + ",\"rmse\":" + fmt9(rep.rmse) + "}";
    }
    json += "]}\n";
    out << json;
    return kExitOk;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"quotient-complex descriptors for periodic crystal structures"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "auto";
    std::vector<std::string> atom_sets;
    uint64_t seed = 0;
    bool seed_given = false;
    int trials = 100;

    app.add_option("--config", config_path, "RunConfig JSON path")->group("Global");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "RunConfig JSON path");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        cmd->add_option("--seed", seed, "random seed")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    auto* features = app.add_subcommand("features", "extract feature CSV from structures");
    std::vector<std::string> inputs;
    features->add_option("inputs", inputs, "structure files (.cif or .json)");
    features->add_option("--atom-set", atom_sets, "restrict to these atom sets");
    features->add_option("--format", format, "cif|json|filtration|auto");
    add_common(features);

    auto* barcodes = app.add_subcommand("barcodes", "dump plain and quotient barcodes");
    std::string barcode_input, barcode_atom_set;
    barcodes->add_option("input", barcode_input, "structure or explicit filtration")
        ->required();
    barcodes->add_option("--atom-set", barcode_atom_set, "atom set (structures only)");
    barcodes->add_option("--format", format, "cif|json|filtration|auto");
    add_common(barcodes);

    auto* verify_cmd = app.add_subcommand("verify", "randomized self-checks");
    verify_cmd->add_option("--trials", trials, "number of random instances");
    add_common(verify_cmd);

    auto* train = app.add_subcommand("train", "fit the regressor");
    std::string features_path, labels_path, model_path;
    train->add_option("features", features_path, "feature CSV")->required();
    train->add_option("labels", labels_path, "label CSV (id,bandgap)")->required();
    add_common(train);

    auto* predict_cmd = app.add_subcommand("predict", "predict from a model JSON");
    predict_cmd->add_option("model", model_path, "model JSON")->required();
    predict_cmd->add_option("features", features_path, "feature CSV")->required();
    add_common(predict_cmd);

    auto* cv = app.add_subcommand("cv", "repeated k-fold cross-validation");
    cv->add_option("features", features_path, "feature CSV")->required();
    cv->add_option("labels", labels_path, "label CSV (id,bandgap)")->required();
    add_common(cv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config = parse_run_config(read_file(config_path));
        if (seed_given) {
            config.seed = seed;
            config.gbt.seed = seed;
        }
        if (!atom_sets.empty()) {
            const auto& known = atom_set_tags();
            for (const std::string& tag : atom_sets)
                if (std::find(known.begin(), known.end(), tag) == known.end())
                    throw UnknownAtomSet(tag);
            config.descriptors.atom_sets = atom_sets;
        }

        std::ostringstream buffer;
        int code = kExitOk;
        if (features->parsed()) {
            code = cmd_features(inputs, config, format, buffer, std::cerr);
        } else if (barcodes->parsed()) {
            code = cmd_barcodes(barcode_input, barcode_atom_set, config, format, buffer,
                                std::cerr);
        } else if (verify_cmd->parsed()) {
            code = cmd_verify(config.seed, trials, buffer, std::cerr);
        } else if (train->parsed()) {
            code = cmd_train(features_path, labels_path, config, buffer, std::cerr);
        } else if (predict_cmd->parsed()) {
            code = cmd_predict(model_path, features_path, buffer, std::cerr);
        } else if (cv->parsed()) {
            code = cmd_cv(features_path, labels_path, config, buffer, std::cerr);
        }
        write_output(buffer.str(), out_path, std::cout);
        return code;
    } catch (const UnknownAtomSet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace qcd::cli
