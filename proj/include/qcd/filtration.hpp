#ifndef QCD_FILTRATION_HPP
#define QCD_FILTRATION_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcd/lattice.hpp"

namespace qcd {

struct NotFaceClosed : std::runtime_error {
    explicit NotFaceClosed(const std::string& simplex)
        : std::runtime_error("filtration is not face-closed at simplex " + simplex) {}
};

struct ValueInversion : std::runtime_error {
    explicit ValueInversion(const std::string& what) : std::runtime_error(what) {}
};

/// Symmetric matrix of pairwise values in [0, inf], zero diagonal.
using DistanceMatrix = Eigen::MatrixXd;

struct Simplex {
    std::array<int, 4> v{{-1, -1, -1, -1}};  // vertex ids, sorted ascending
    int dim = 0;                             // 0..3
    double value = 0.0;
    bool gluing_star = false;

    std::span<const int> vertices() const { return {v.data(), static_cast<size_t>(dim) + 1}; }

    bool operator==(const Simplex&) const = default;
};

/**
 * An ordered filtration of simplices of dimension <= 3. Invariants:
 *  - face-closed, with face values <= coface values;
 *  - sorted by (value, dimension, lexicographic vertex tuple) ascending;
 *  - gluing-star simplices are only apex vertices (one per equivalence
 *    class, at value 0) and apex-member edges at value 0; nothing of
 *    dimension >= 2 touches an apex.
 * Apex ids are appended after the real vertex ids. `classes` partitions
 * (a subset of) the real vertex ids.
 */
struct Filtration {
    int n_vertices = 0;  // real vertices: ids 0..n_vertices-1
    int n_apex = 0;      // apex vertices: ids n_vertices..n_vertices+n_apex-1
    int max_dim = 3;     // dimension the filtration was built or validated to
    std::vector<Simplex> simplices;
    std::vector<std::vector<int>> classes;

    bool empty() const { return simplices.empty(); }
};

/// Pairwise distances of an extended motif: Euclidean, except +inf between
/// two points that are both outside the original motif.
DistanceMatrix bipartite_distances(const ExtendedMotif& em);

/**
 * Vietoris-Rips filtration: every simplex of dimension <= max_dim whose
 * diameter (max pairwise entry) is <= max_value. Vertices enter at 0,
 * higher simplices at their diameter; +inf pairs never form a simplex.
 * max_value must be > 0 and max_dim in {1,2,3}.
 */
Filtration build_rips(const DistanceMatrix& d, double max_value, int max_dim);

/**
 * Add one apex vertex per equivalence class at value 0 plus an apex-member
 * edge at value 0 for every class member, all flagged gluing_star, and
 * re-sort. The result carries the homotopy type of the quotient by the
 * class partition. Every classed vertex must be present at value 0.
 */
Filtration augment_gluing_stars(const Filtration& f,
                                const std::vector<std::vector<int>>& classes);

/// Parse the explicit-filtration JSON:
///   {"vertices": n, "classes": [[ids]...], "simplices": [{"v":[ids],"t":value}...]}
/// Face closure and value ordering are enforced (NotFaceClosed /
/// ValueInversion); schema problems raise SchemaViolation.
Filtration parse_explicit_filtration(const std::string& text);

/// Inverse of parse_explicit_filtration, for replaying failures. Gluing-star
/// simplices are omitted (they are reconstructed by augmentation).
std::string serialize_explicit_filtration(const Filtration& f);

/// Sort simplices into canonical filtration order (value, dim, vertex tuple).
void sort_filtration(Filtration& f);

/// Check the Filtration invariants; throws NotFaceClosed / ValueInversion /
/// std::invalid_argument on violation.
void validate_filtration(const Filtration& f);

}  // namespace qcd

#endif
