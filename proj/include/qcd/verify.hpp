#ifndef QCD_VERIFY_HPP
#define QCD_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcd/filtration.hpp"
#include "qcd/persistence.hpp"

namespace qcd::verify {

struct TrialOptions {
    int max_points = 8;        // original points per instance
    double box = 10.0;         // points drawn uniformly in [0, box]^3
    int grid_size = 12;        // Betti comparison grid over [0, max_value]
    bool bipartite = false;    // mix in instances with non-original points
    bool with_oracle = false;  // also check against the rank-based oracle
    int max_simplices = 0;     // if > 0, shrink instances above this budget
};

struct TrialReport {
    int trials = 0;
    int failures = 0;
    std::vector<std::string> messages;  // one per failure, with replay JSON

    bool ok() const { return failures == 0; }
};

/**
 * Check the quotient-filtration barcode relations between a plain
 * filtration K and its gluing-star augmentation:
 *   PB0(quotient) is a sub-multiset of PB0(plain),
 *   PB1(plain) is a sub-multiset of PB1(quotient),
 *   PB2 agree as multisets,
 *   at every grid value: b0 drops, b1 grows, b2 is unchanged,
 * and optionally that barcode-derived Betti numbers match the rank oracle
 * for both filtrations at every grid value. Returns a failure description,
 * or nothing when all properties hold.
 */
std::optional<std::string> check_quotient_properties(const Filtration& plain,
                                                     const Filtration& quotient,
                                                     const std::vector<double>& grid,
                                                     bool with_oracle);

/// Run `trials` randomized instances (random point cloud, random vertex
/// partition, Rips + augmentation). Failure messages embed the plain
/// filtration as explicit-filtration JSON for replay.
TrialReport run_trials(uint64_t seed, int trials, const TrialOptions& options = {});

}  // namespace qcd::verify

#endif
