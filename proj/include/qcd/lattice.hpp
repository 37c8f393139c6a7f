#ifndef QCD_LATTICE_HPP
#define QCD_LATTICE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcd/structure.hpp"

namespace qcd {

struct DegenerateCell : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownAtomSet : std::runtime_error {
    explicit UnknownAtomSet(const std::string& tag)
        : std::runtime_error("unknown atom set: '" + tag + "'") {}
};

struct EmptyMotif : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lattice basis in the conventional orientation: v1 along +x, v2 in the
/// xy-plane, det [v1 v2 v3] > 0. Vectors are the columns of `m`.
struct LatticeBasis {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    Eigen::Vector3d v1() const { return m.col(0); }
    Eigen::Vector3d v2() const { return m.col(1); }
    Eigen::Vector3d v3() const { return m.col(2); }

    Eigen::Vector3d cartesian(const Eigen::Vector3d& frac) const { return m * frac; }
    Eigen::Vector3d fractional(const Eigen::Vector3d& cart) const {
        return m.inverse() * cart;
    }
};

/// Build the basis from cell parameters. Throws DegenerateCell when the
/// angles admit no real cell (non-positive volume).
LatticeBasis cell_basis(const CellParams& cell);

/// Atoms of one element selection, in Cartesian coordinates inside the unit
/// cell. May be empty (downstream consumers decide whether that is fatal).
struct Motif {
    std::vector<Eigen::Vector3d> points;
    std::vector<std::string> elements;
    std::string atom_set_tag;

    bool empty() const { return points.empty(); }
    int size() const { return static_cast<int>(points.size()); }
};

/// The motif plus its three basis-vector translates, with the periodic
/// equivalence classes: class_id(p) == class_id(q) iff p - q is a lattice
/// vector (componentwise fractional residual < 1e-6).
struct ExtendedMotif {
    std::vector<Eigen::Vector3d> points;
    std::vector<bool> in_original;  // true iff the point belongs to the motif itself
    std::vector<int> class_id;      // dense ids 0..num_classes-1
    int num_classes = 0;
    LatticeBasis basis;

    int size() const { return static_cast<int>(points.size()); }

    /// Equivalence classes as index lists, ordered by class id.
    std::vector<std::vector<int>> classes() const;
};

/// The 17 atom-set identifiers, in canonical (CLI-visible) order.
const std::vector<std::string>& atom_set_tags();

/**
 * Select the atoms matching an atom-set tag and map them to Cartesian
 * coordinates (frac through the cell basis). Site predicates:
 *   A_C : element == C
 *   B   : element not in {C,H,N,O} and not in {F,Cl,Br,I}
 *   X   : element in {Cl,Br,I}
 * Combination tags (A_C-B, A_C-X, B-X, A_C-B-X) take the union. The
 * remaining tags match a single element exactly. Hydrogen never matches.
 *
 * Throws UnknownAtomSet. An empty selection is returned as an empty motif
 * and reported through `warnings`.
 */
Motif select_atom_set(const CrystalStructure& structure, const std::string& tag,
                      std::vector<std::string>* warnings = nullptr);

/// Extend a non-empty motif M to M u (M+v1) u (M+v2) u (M+v3), in that
/// order, assigning periodic equivalence classes. Coincident points
/// (within 1e-6 angstrom) are kept once. Throws EmptyMotif.
ExtendedMotif extend_motif(const Motif& motif, const LatticeBasis& basis);

}  // namespace qcd

#endif
