#ifndef QCD_DESCRIPTORS_HPP
#define QCD_DESCRIPTORS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcd/persistence.hpp"
#include "qcd/structure.hpp"

namespace qcd {

/// Seven summary statistics of a multiset of reals: quartiles use inclusive
/// linear interpolation between closest ranks, std is the population form.
/// An empty collection yields all zeros.
struct StatDescriptor {
    double max = 0, min = 0, q25 = 0, q50 = 0, q75 = 0, mean = 0, stddev = 0;
    bool operator==(const StatDescriptor&) const = default;
};

StatDescriptor stat_descriptor(std::vector<double> values);

/// One named multiset extracted from a barcode set.
struct NamedCollection {
    std::string name;
    std::vector<double> values;
};

/**
 * The 20 collections summarized per barcode set, in fixed order:
 *   pb0:    death, death_norm                       (essential pb0 excluded)
 *   pb1fin: birth, birth_norm, death, death_norm,
 *           mid, mid_norm, life, life_norm
 *   pb1inf: birth, birth_norm
 *   pb2:    the same eight as pb1fin                (essential pb2 excluded,
 *                                                    reported via warnings)
 * Normalization divides each element by the collection sum (zeros when the
 * sum is zero).
 */
std::vector<NamedCollection> barcode_collections(const BarcodeSet& bs,
                                                 std::vector<std::string>* warnings = nullptr);

/// Betti curve sampled at t_i = i*T/bins for i = 0..bins-1:
/// BC(t) = #{(b,d) : b <= t < d}; infinite deaths count for all t >= b.
/// The normalized curve divides by the interval count (zeros when empty).
Eigen::VectorXd betti_curve(const Barcode& pb, double T, int bins, bool normalized);

/// (|v1|,|v2|,|v3|,|v1+v2|,|v1+v3|,|v2+v3|,|v1+v2+v3|) with the basis
/// vectors relabeled so |v1| <= |v2| <= |v3|.
Eigen::Matrix<double, 7, 1> unit_cell_features(const LatticeBasis& basis);

struct DescriptorConfig {
    std::vector<std::string> atom_sets = atom_set_tags();
    double max_filtration = 10.0;
    int betti_bins = 100;
    int max_dim = 3;
};

/// Flat feature vector with parallel slot names. Length and name order
/// depend only on the configuration.
struct FeatureVector {
    std::vector<std::string> names;
    Eigen::VectorXd values;
};

/// Slot names for a configuration: per atom set 140 statistic slots
/// (<set>.<pb>.<collection>.<stat>) followed by 8*bins curve slots
/// (<set>.<pb>.{bc,nbc}.<i>), then the seven cell.<k> slots.
std::vector<std::string> feature_names(const DescriptorConfig& config);

/// End-to-end barcodes of one atom set: plain Rips filtration K and its
/// gluing-star augmentation, with both barcode sets.
struct QuotientBarcodes {
    Filtration plain;
    Filtration quotient;
    BarcodeSet plain_barcodes;
    BarcodeSet quotient_barcodes;
};

/// Throws EmptyMotif when the atom set selects no atoms.
QuotientBarcodes compute_quotient_barcodes(const CrystalStructure& s,
                                           const std::string& atom_set,
                                           double max_filtration, int max_dim,
                                           std::vector<std::string>* warnings = nullptr);

/// Assemble the full descriptor vector of a structure. Empty atom sets
/// contribute all-zero slots. Deterministic and invariant under atom-order
/// permutations of the input.
FeatureVector assemble_features(const CrystalStructure& s, const DescriptorConfig& config,
                                std::vector<std::string>* warnings = nullptr);

/// Feature CSV: header `id,<slot names...>`, one row per structure, values
/// with 9 significant digits, LF line endings.
void write_feature_csv(std::ostream& out, const std::vector<std::string>& ids,
                       const std::vector<FeatureVector>& rows,
                       const DescriptorConfig& config);

}  // namespace qcd

#endif
