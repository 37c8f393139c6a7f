#include "qcd/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace qcd {

StatDescriptor stat_descriptor(std::vector<double> values) {
    StatDescriptor d;
    if (values.empty()) return d;
    std::sort(values.begin(), values.end());
    const size_t n = values.size();

    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(n - 1);
        const size_t lo = static_cast<size_t>(h);
        if (lo + 1 >= n) return values[n - 1];
        return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
    };

    d.min = values.front();
    d.max = values.back();
    d.q25 = quantile(0.25);
    d.q50 = quantile(0.50);
    d.q75 = quantile(0.75);
    double sum = 0;
    for (double v : values) sum += v;
    d.mean = sum / static_cast<double>(n);
    double ss = 0;
    for (double v : values) ss += (v - d.mean) * (v - d.mean);
    d.stddev = std::sqrt(ss / static_cast<double>(n));
    return d;
}

namespace {

std::vector<double> normalized(const std::vector<double>& values) {
    double sum = 0;
    for (double v : values) sum += v;
    std::vector<double> out(values.size(), 0.0);
    if (sum != 0)
        for (size_t i = 0; i < values.size(); ++i) out[i] = values[i] / sum;
    return out;
}

void push_pair(std::vector<NamedCollection>& out, const std::string& name,
               std::vector<double> values) {
    std::vector<double> norm = normalized(values);
    out.push_back({name, std::move(values)});
    out.push_back({name + "_norm", std::move(norm)});
}

// The eight collections of a finite barcode: births, deaths, midpoints,
// lifespans, each plain and normalized.
void push_finite_family(std::vector<NamedCollection>& out, const std::string& prefix,
                        const std::vector<Interval>& intervals) {
    std::vector<double> births, deaths, mids, lifes;
    for (const Interval& iv : intervals) {
        births.push_back(iv.birth);
        deaths.push_back(iv.death);
        mids.push_back((iv.birth + iv.death) / 2.0);
        lifes.push_back(iv.death - iv.birth);
    }
    push_pair(out, prefix + ".birth", std::move(births));
    push_pair(out, prefix + ".death", std::move(deaths));
    push_pair(out, prefix + ".mid", std::move(mids));
    push_pair(out, prefix + ".life", std::move(lifes));
}

}  // namespace

std::vector<NamedCollection> barcode_collections(const BarcodeSet& bs,
                                                 std::vector<std::string>* warnings) {
    std::vector<NamedCollection> out;
    out.reserve(20);

    std::vector<double> pb0_deaths;
    for (const Interval& iv : bs.pb0.intervals)
        if (!iv.essential()) pb0_deaths.push_back(iv.death);
    push_pair(out, "pb0.death", std::move(pb0_deaths));

    std::vector<Interval> pb2_finite;
    for (const Interval& iv : bs.pb2.intervals) {
        if (iv.essential()) {
            if (warnings)
                warnings->push_back("essential degree-2 interval excluded from pb2 "
                                    "collections");
        } else {
            pb2_finite.push_back(iv);
        }
    }

    push_finite_family(out, "pb1fin", bs.pb1_finite.intervals);

    std::vector<double> inf_births;
    for (const Interval& iv : bs.pb1_inf.intervals) inf_births.push_back(iv.birth);
    push_pair(out, "pb1inf.birth", std::move(inf_births));

    push_finite_family(out, "pb2", pb2_finite);
    return out;
}

Eigen::VectorXd betti_curve(const Barcode& pb, double T, int bins, bool normalized) {
    if (!(T > 0)) throw std::invalid_argument("betti_curve: T must be > 0");
    if (bins < 1) throw std::invalid_argument("betti_curve: bins must be >= 1");
    Eigen::VectorXd curve = Eigen::VectorXd::Zero(bins);
    for (int i = 0; i < bins; ++i) {
        const double t = static_cast<double>(i) * T / static_cast<double>(bins);
        curve[i] = betti_from_barcode(pb, t);
    }
    if (normalized) {
        if (pb.intervals.empty()) return Eigen::VectorXd::Zero(bins);
        curve /= static_cast<double>(pb.intervals.size());
    }
    return curve;
}

Eigen::Matrix<double, 7, 1> unit_cell_features(const LatticeBasis& basis) {
    std::array<Eigen::Vector3d, 3> v = {basis.v1(), basis.v2(), basis.v3()};
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.norm() < b.norm();
    });
    Eigen::Matrix<double, 7, 1> out;
    out << v[0].norm(), v[1].norm(), v[2].norm(), (v[0] + v[1]).norm(),
        (v[0] + v[2]).norm(), (v[1] + v[2]).norm(), (v[0] + v[1] + v[2]).norm();
    return out;
}

namespace {

const char* kStatNames[7] = {"max", "min", "q25", "q50", "q75", "mean", "std"};

// Barcode blocks in canonical slot order.
const char* kCurveBarcodes[4] = {"pb0", "pb1fin", "pb1inf", "pb2"};

std::vector<std::string> collection_names() {
    // Mirrors barcode_collections output order.
    std::vector<std::string> names = {"pb0.death", "pb0.death_norm"};
    for (const char* c : {"birth", "death", "mid", "life"}) {
        names.push_back(std::string("pb1fin.") + c);
        names.push_back(std::string("pb1fin.") + c + "_norm");
    }
    names.push_back("pb1inf.birth");
    names.push_back("pb1inf.birth_norm");
    for (const char* c : {"birth", "death", "mid", "life"}) {
        names.push_back(std::string("pb2.") + c);
        names.push_back(std::string("pb2.") + c + "_norm");
    }
    return names;
}

}  // namespace

std::vector<std::string> feature_names(const DescriptorConfig& config) {
    std::vector<std::string> names;
    const auto collections = collection_names();
    for (const std::string& set : config.atom_sets) {
        for (const std::string& coll : collections)
            for (const char* stat : kStatNames)
                names.push_back(set + "." + coll + "." + stat);
        for (const char* pb : kCurveBarcodes)
            for (const char* variant : {"bc", "nbc"})
                for (int i = 0; i < config.betti_bins; ++i)
                    names.push_back(set + "." + pb + "." + variant + "." +
                                    std::to_string(i));
    }
    for (int k = 0; k < 7; ++k) names.push_back("cell." + std::to_string(k));
    return names;
}

QuotientBarcodes compute_quotient_barcodes(const CrystalStructure& s,
                                           const std::string& atom_set,
                                           double max_filtration, int max_dim,
                                           std::vector<std::string>* warnings) {
    const LatticeBasis basis = cell_basis(s.cell);
    const Motif motif = select_atom_set(s, atom_set, warnings);
    const ExtendedMotif em = extend_motif(motif, basis);

    QuotientBarcodes out;
    out.plain = build_rips(bipartite_distances(em), max_filtration, max_dim);
    out.quotient = augment_gluing_stars(out.plain, em.classes());
    out.plain_barcodes = reduce(out.plain);
    out.quotient_barcodes = reduce(out.quotient);
    if (warnings)
        for (const std::string& w : out.quotient_barcodes.warnings)
            warnings->push_back(atom_set + ": " + w);
    return out;
}

FeatureVector assemble_features(const CrystalStructure& s, const DescriptorConfig& config,
                                std::vector<std::string>* warnings) {
    FeatureVector fv;
    fv.names = feature_names(config);
    fv.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fv.names.size()));

    const int stats_block = 20 * 7;
    const int curves_block = 4 * 2 * config.betti_bins;
    const int set_block = stats_block + curves_block;

    Eigen::Index offset = 0;
    for (const std::string& set : config.atom_sets) {
        const Motif motif = select_atom_set(s, set, warnings);
        if (motif.empty()) {
            offset += set_block;  // all-zero slots, never omitted
            continue;
        }
        QuotientBarcodes qb =
            compute_quotient_barcodes(s, set, config.max_filtration, config.max_dim, warnings);
        const BarcodeSet& bs = qb.quotient_barcodes;

        for (const NamedCollection& coll : barcode_collections(bs, warnings)) {
            const StatDescriptor d = stat_descriptor(coll.values);
            const double stats[7] = {d.max, d.min, d.q25, d.q50, d.q75, d.mean, d.stddev};
            for (double stat : stats) fv.values[offset++] = stat;
        }
        const Barcode* curves[4] = {&bs.pb0, &bs.pb1_finite, &bs.pb1_inf, &bs.pb2};
        for (const Barcode* pb : curves) {
            fv.values.segment(offset, config.betti_bins) =
                betti_curve(*pb, config.max_filtration, config.betti_bins, false);
            offset += config.betti_bins;
            fv.values.segment(offset, config.betti_bins) =
                betti_curve(*pb, config.max_filtration, config.betti_bins, true);
            offset += config.betti_bins;
        }
    }

    fv.values.segment(offset, 7) = unit_cell_features(cell_basis(s.cell));
    offset += 7;
    return fv;
}

void write_feature_csv(std::ostream& out, const std::vector<std::string>& ids,
                       const std::vector<FeatureVector>& rows,
                       const DescriptorConfig& config) {
    out << "id";
    for (const std::string& name : feature_names(config)) out << "," << name;
    out << "\n";
    char buf[40];
    for (size_t r = 0; r < rows.size(); ++r) {
        out << ids[r];
        const Eigen::VectorXd& v = rows[r].values;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.9g", v[i]);
            out << "," << buf;
        }
        out << "\n";
    }
}

}  // namespace qcd
