#ifndef QCD_PERSISTENCE_HPP
#define QCD_PERSISTENCE_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qcd/filtration.hpp"

namespace qcd {

constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct Interval {
    double birth = 0.0;
    double death = kInfDeath;

    bool essential() const { return death == kInfDeath; }
    bool operator==(const Interval&) const = default;
};

/// Multiset of persistence intervals of one homology degree, sorted by
/// (birth, death). Zero-length intervals are never stored.
struct Barcode {
    int degree = 0;
    std::vector<Interval> intervals;

    int size() const { return static_cast<int>(intervals.size()); }
};

struct BarcodeSet {
    Barcode pb0{0, {}}, pb1{1, {}}, pb2{2, {}};
    Barcode pb1_finite{1, {}}, pb1_inf{1, {}};
    bool pb2_complete = true;  // false when the filtration had no 3-simplices
    std::vector<std::string> warnings;
};

/**
 * Persistent homology over Z2 by boundary-matrix column reduction with the
 * clearing optimization (dimensions processed descending; pivots of the
 * (q+1)-reduction are skipped as known-zero columns in degree q). Interval
 * endpoints are the filtration values of the paired simplices; zero-length
 * intervals are dropped; unpaired creators yield (value, +inf).
 */
BarcodeSet reduce(const Filtration& f);

/// Split a degree-1 barcode by death finiteness; the two parts reassemble
/// the input as a multiset.
std::pair<Barcode, Barcode> decompose_pb1(const Barcode& pb1);

/// Number of intervals alive at t: #{(b,d) : b <= t < d}.
int betti_from_barcode(const Barcode& pb, double t);

/// Multiset operations used by the quotient-relation checks; exact values.
bool multiset_subset(const Barcode& inner, const Barcode& outer);
bool multiset_equal(const Barcode& a, const Barcode& b);

/// Barcode JSON: {"degree":q,"intervals":[[b,d]...]}, d numeric or "inf".
std::string barcode_to_json(const Barcode& pb);
std::string barcode_set_to_json(const BarcodeSet& bs);

}  // namespace qcd

#endif
