#include "qcd/verify.hpp"

#include <random>

#include "qcd/oracle.hpp"

namespace qcd::verify {

namespace {

std::string describe(const char* what, double eps = -1) {
    std::string out = what;
    if (eps >= 0) out += " at eps=" + std::to_string(eps);
    return out;
}

}  // namespace

std::optional<std::string> check_quotient_properties(const Filtration& plain,
                                                     const Filtration& quotient,
                                                     const std::vector<double>& grid,
                                                     bool with_oracle) {
    const BarcodeSet k = reduce(plain);
    const BarcodeSet kt = reduce(quotient);

    if (!multiset_subset(kt.pb0, k.pb0))
        return describe("PB0(quotient) is not contained in PB0(plain)");
    if (!multiset_subset(k.pb1, kt.pb1))
        return describe("PB1(plain) is not contained in PB1(quotient)");
    if (!multiset_equal(k.pb2, kt.pb2))
        return describe("PB2(plain) != PB2(quotient)");

    for (double eps : grid) {
        const int b0_k = betti_from_barcode(k.pb0, eps);
        const int b0_kt = betti_from_barcode(kt.pb0, eps);
        const int b1_k = betti_from_barcode(k.pb1, eps);
        const int b1_kt = betti_from_barcode(kt.pb1, eps);
        const int b2_k = betti_from_barcode(k.pb2, eps);
        const int b2_kt = betti_from_barcode(kt.pb2, eps);
        if (b0_kt > b0_k) return describe("b0(quotient) > b0(plain)", eps);
        if (b1_kt < b1_k) return describe("b1(quotient) < b1(plain)", eps);
        if (b2_kt != b2_k) return describe("b2(quotient) != b2(plain)", eps);

        if (with_oracle) {
            const BettiTriple ok_plain = betti_at(plain, eps);
            if (ok_plain.b0 != b0_k || ok_plain.b1 != b1_k || ok_plain.b2 != b2_k)
                return describe("plain barcode disagrees with the rank oracle", eps);
            const BettiTriple ok_quot = betti_at(quotient, eps);
            if (ok_quot.b0 != b0_kt || ok_quot.b1 != b1_kt || ok_quot.b2 != b2_kt)
                return describe("quotient barcode disagrees with the rank oracle", eps);
        }
    }
    return std::nullopt;
}

TrialReport run_trials(uint64_t seed, int trials, const TrialOptions& options) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
        // 53-bit mantissa draw; avoids distribution implementation differences
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };

    TrialReport report;
    report.trials = trials;

    for (int trial = 0; trial < trials; ++trial) {
        int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(options.max_points));
        double max_value = uniform(options.box * 0.3, options.box * 1.2);

        // A quarter of the instances are jittered octahedral shells, which
        // enclose a 2-void for a band of scales; the uniform clouds almost
        // never produce nonzero degree-2 homology on <= 8 points.
        const bool shell = options.max_points >= 6 && (rng() % 4 == 0);
        if (shell) n = 6;

        for (;;) {
            std::vector<Eigen::Vector3d> pts(n);
            std::vector<bool> original(n, true);
            if (shell) {
                const double r = uniform(options.box * 0.1, options.box * 0.4);
                const double c = options.box * 0.5;
                const Eigen::Vector3d center(c, c, c);
                int w = 0;
                for (int axis = 0; axis < 3; ++axis)
                    for (double sign : {-1.0, 1.0}) {
                        Eigen::Vector3d p = center;
                        p[axis] += sign * r;
                        for (int k = 0; k < 3; ++k) p[k] += uniform(-0.03, 0.03) * r;
                        pts[w++] = p;
                    }
                max_value = uniform(1.45, 2.2) * r;  // straddles the void band
            } else {
                // Random point cloud and, optionally, non-original points that
                // only see the original ones (infinite mutual distances).
                for (int i = 0; i < n; ++i)
                    pts[i] = {uniform(0, options.box), uniform(0, options.box),
                              uniform(0, options.box)};
            }
            if (options.bipartite && n >= 2 && (rng() & 1)) {
                const int shifted = 1 + static_cast<int>(rng() % static_cast<uint64_t>(n - 1));
                for (int i = n - shifted; i < n; ++i) original[i] = false;
            }

            DistanceMatrix d(n, n);
            d.setZero();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    d(i, j) = d(j, i) =
                        (!original[i] && !original[j])
                            ? std::numeric_limits<double>::infinity()
                            : (pts[i] - pts[j]).norm();

            // Random partition of the vertices.
            const int num_classes = 1 + static_cast<int>(rng() % static_cast<uint64_t>(n));
            std::vector<std::vector<int>> classes(num_classes);
            for (int i = 0; i < n; ++i)
                classes[rng() % static_cast<uint64_t>(num_classes)].push_back(i);
            std::erase_if(classes, [](const auto& c) { return c.empty(); });

            Filtration plain = build_rips(d, max_value, 3);
            Filtration quotient = augment_gluing_stars(plain, classes);
            if (options.max_simplices > 0 &&
                static_cast<int>(quotient.simplices.size()) > options.max_simplices) {
                max_value *= 0.7;  // shrink and retry within the budget
                continue;
            }

            std::vector<double> grid(options.grid_size);
            for (int g = 0; g < options.grid_size; ++g)
                grid[g] = max_value * static_cast<double>(g) /
                          static_cast<double>(options.grid_size - 1);

            if (auto failure = check_quotient_properties(plain, quotient, grid,
                                                         options.with_oracle)) {
                ++report.failures;
                report.messages.push_back(
                    "trial " + std::to_string(trial) + ": " + *failure + "\nreplay: " +
                    serialize_explicit_filtration(quotient));  // classes included
            }
            break;
        }
    }
    return report;
}

}  // namespace qcd::verify
