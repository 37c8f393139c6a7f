#include "qcd/structure.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace qcd {

double wrap_frac(double x) {
    double r = x - std::floor(x);
    // floor(1.0 - eps) style inputs can land exactly on 1.0 after rounding
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r += 1.0;
    return r;
}

Eigen::Vector3d wrap_frac(const Eigen::Vector3d& v) {
    return {wrap_frac(v.x()), wrap_frac(v.y()), wrap_frac(v.z())};
}

namespace {

const std::unordered_set<std::string>& element_table() {
    static const std::unordered_set<std::string> table = {
        "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
        "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
        "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
        "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
        "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
        "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
        "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
        "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
        "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
        "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
    return table;
}

}  // namespace

std::string canonical_element(const std::string& token, bool* recognized) {
    std::string alpha;
    for (char ch : token) {
        if (std::isalpha(static_cast<unsigned char>(ch)))
            alpha.push_back(ch);
        else
            break;  // leading alphabetic part only; "Pb2+" -> "Pb"
    }
    if (alpha.empty()) {
        if (recognized) *recognized = false;
        return token;
    }
    std::string canon = alpha;
    canon[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(canon[0])));
    for (size_t i = 1; i < canon.size(); ++i)
        canon[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(canon[i])));
    if (element_table().count(canon)) {
        if (recognized) *recognized = true;
        return canon;
    }
    if (recognized) *recognized = false;
    return alpha;
}

void validate_structure(const CrystalStructure& s, const std::string& where) {
    auto fail = [&](const std::string& path, const std::string& why) {
        throw SchemaViolation(where + path, why);
    };
    if (!(s.cell.a > 0)) fail("/cell/a", "must be > 0");
    if (!(s.cell.b > 0)) fail("/cell/b", "must be > 0");
    if (!(s.cell.c > 0)) fail("/cell/c", "must be > 0");
    if (!(s.cell.alpha > 0 && s.cell.alpha < 180)) fail("/cell/alpha", "must be in (0,180)");
    if (!(s.cell.beta > 0 && s.cell.beta < 180)) fail("/cell/beta", "must be in (0,180)");
    if (!(s.cell.gamma > 0 && s.cell.gamma < 180)) fail("/cell/gamma", "must be in (0,180)");
    for (size_t i = 0; i < s.atoms.size(); ++i) {
        const Eigen::Vector3d& f = s.atoms[i].frac;
        for (int k = 0; k < 3; ++k) {
            if (!std::isfinite(f[k]))
                fail("/atoms/" + std::to_string(i) + "/frac/" + std::to_string(k),
                     "not finite");
            if (f[k] < 0.0 || f[k] >= 1.0)
                fail("/atoms/" + std::to_string(i) + "/frac/" + std::to_string(k),
                     "not reduced into [0,1)");
        }
    }
}

}  // namespace qcd
