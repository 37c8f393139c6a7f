#ifndef QCD_CLI_HPP
#define QCD_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "qcd/descriptors.hpp"
#include "qcd/gbt.hpp"

namespace qcd::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerifyFailed = 3;

struct RunConfig {
    DescriptorConfig descriptors;
    GbtParams gbt;
    int cv_folds = 5;
    int cv_repeats = 5;
    uint64_t seed = 0;
};

/// Parse a RunConfig from JSON text; absent fields keep their defaults.
/// Throws SchemaViolation / std::invalid_argument on bad values.
RunConfig parse_run_config(const std::string& text);

/// Structure input with format selection: "cif", "json", "filtration", or
/// "auto" (by extension, with content sniffing for .json).
struct LoadedInput {
    bool is_filtration = false;
    CrystalStructure structure;
    Filtration filtration;
    std::string id;  // structure name or file stem
};
LoadedInput load_input(const std::string& path, const std::string& format,
                       std::vector<std::string>* warnings = nullptr);

int cmd_features(const std::vector<std::string>& inputs, const RunConfig& config,
                 const std::string& format, std::ostream& out, std::ostream& err);
int cmd_barcodes(const std::string& input, const std::string& atom_set,
                 const RunConfig& config, const std::string& format, std::ostream& out,
                 std::ostream& err);
int cmd_verify(uint64_t seed, int trials, std::ostream& out, std::ostream& err);
int cmd_train(const std::string& features_path, const std::string& labels_path,
              const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const std::string& model_path, const std::string& features_path,
                std::ostream& out, std::ostream& err);
int cmd_cv(const std::string& features_path, const std::string& labels_path,
           const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full argv dispatch used by the binary; returns the process exit code.
int run(int argc, const char* const* argv);

/// Feature CSV reader (header `id,...`): ids, column names, matrix.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd values;
};
FeatureTable read_feature_csv(std::istream& in);

/// Label CSV reader: `id,value` rows, optional header.
struct LabelTable {
    std::vector<std::string> ids;
    std::vector<double> values;
};
LabelTable read_label_csv(std::istream& in);

}  // namespace qcd::cli

#endif
