#include "qcd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <unordered_map>

namespace qcd {

namespace {

// Exact values at the right angle keep orthogonal cells free of ~1e-17
// cosine residue, so axis-aligned distances come out bit-exact.
double cos_deg(double deg) {
    if (deg == 90.0) return 0.0;
    return std::cos(deg * std::numbers::pi / 180.0);
}

double sin_deg(double deg) {
    if (deg == 90.0) return 1.0;
    return std::sin(deg * std::numbers::pi / 180.0);
}

}  // namespace

LatticeBasis cell_basis(const CellParams& cell) {
    if (!(cell.a > 0 && cell.b > 0 && cell.c > 0))
        throw DegenerateCell("cell lengths must be positive");
    if (!(cell.alpha > 0 && cell.alpha < 180) || !(cell.beta > 0 && cell.beta < 180) ||
        !(cell.gamma > 0 && cell.gamma < 180))
        throw DegenerateCell("cell angles must lie in (0,180) degrees");

    const double ca = cos_deg(cell.alpha);
    const double cb = cos_deg(cell.beta);
    const double cg = cos_deg(cell.gamma);
    const double sg = sin_deg(cell.gamma);

    // v1 along x, v2 in the xy-plane; v3 fixed by the three angles.
    const double cy = (ca - cb * cg) / sg;
    const double cz2 = 1.0 - cb * cb - cy * cy;
    if (!(cz2 > 0.0))
        throw DegenerateCell("inconsistent cell angles (non-positive volume)");

    LatticeBasis basis;
    basis.m.col(0) = Eigen::Vector3d(cell.a, 0.0, 0.0);
    basis.m.col(1) = Eigen::Vector3d(cell.b * cg, cell.b * sg, 0.0);
    basis.m.col(2) = Eigen::Vector3d(cell.c * cb, cell.c * cy, cell.c * std::sqrt(cz2));
    return basis;
}

std::vector<std::vector<int>> ExtendedMotif::classes() const {
    std::vector<std::vector<int>> out(num_classes);
    for (int i = 0; i < size(); ++i) out[class_id[i]].push_back(i);
    return out;
}

namespace {

bool is_halide(const std::string& e) { return e == "Cl" || e == "Br" || e == "I"; }

bool is_b_site(const std::string& e) {
    if (e == "C" || e == "H" || e == "N" || e == "O") return false;
    if (e == "F" || is_halide(e)) return false;
    return true;
}

bool matches_tag(const std::string& tag, const std::string& e) {
    if (tag == "A_C-B") return e == "C" || is_b_site(e);
    if (tag == "A_C-X") return e == "C" || is_halide(e);
    if (tag == "B-X") return is_b_site(e) || is_halide(e);
    if (tag == "A_C-B-X") return e == "C" || is_b_site(e) || is_halide(e);
    if (tag == "B") return is_b_site(e);
    if (tag == "X") return is_halide(e);
    return e == tag;  // single-element tags
}

}  // namespace

const std::vector<std::string>& atom_set_tags() {
    static const std::vector<std::string> tags = {
        "A_C-B", "A_C-X", "B-X", "A_C-B-X", "C",  "O", "N",  "B", "Bi",
        "Cd",    "Ge",    "Pb",  "Sn",      "X",  "Cl", "Br", "I"};
    return tags;
}

Motif select_atom_set(const CrystalStructure& structure, const std::string& tag,
                      std::vector<std::string>* warnings) {
    const auto& tags = atom_set_tags();
    if (std::find(tags.begin(), tags.end(), tag) == tags.end())
        throw UnknownAtomSet(tag);

    const LatticeBasis basis = cell_basis(structure.cell);
    Motif motif;
    motif.atom_set_tag = tag;
    for (const Atom& atom : structure.atoms) {
        if (!matches_tag(tag, atom.element)) continue;
        motif.points.push_back(basis.cartesian(atom.frac));
        motif.elements.push_back(atom.element);
    }
    if (motif.empty() && warnings)
        warnings->push_back("atom set '" + tag + "': no matching atoms in '" +
                            structure.name + "'");
    return motif;
}

ExtendedMotif extend_motif(const Motif& motif, const LatticeBasis& basis) {
    if (motif.empty()) throw EmptyMotif("cannot extend an empty motif");

    const int m = motif.size();
    ExtendedMotif em;
    em.basis = basis;

    // Union-find over motif indices; coincident atoms collapse to one class.
    std::vector<int> parent(m);
    for (int i = 0; i < m; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };

    const double tol = 1e-6;
    std::vector<int> generator;  // motif index that produced each kept point
    auto push_point = [&](const Eigen::Vector3d& p, int gen, bool original) {
        for (size_t k = 0; k < em.points.size(); ++k) {
            if ((em.points[k] - p).lpNorm<Eigen::Infinity>() < tol) {
                int a = find(gen), b = find(generator[k]);
                if (a != b) parent[a] = b;
                return;  // collision: keep the first occurrence
            }
        }
        em.points.push_back(p);
        em.in_original.push_back(original);
        generator.push_back(gen);
    };

    for (int i = 0; i < m; ++i) push_point(motif.points[i], i, true);
    for (int t = 0; t < 3; ++t) {
        const Eigen::Vector3d shift = basis.m.col(t);
        for (int i = 0; i < m; ++i) push_point(motif.points[i] + shift, i, false);
    }

    // Dense class ids in order of first appearance.
    std::unordered_map<int, int> root_to_class;
    em.class_id.resize(em.points.size());
    for (size_t k = 0; k < em.points.size(); ++k) {
        int root = find(generator[k]);
        auto it = root_to_class.find(root);
        if (it == root_to_class.end())
            it = root_to_class.emplace(root, static_cast<int>(root_to_class.size())).first;
        em.class_id[k] = it->second;
    }
    em.num_classes = static_cast<int>(root_to_class.size());
    return em;
}

}  // namespace qcd
