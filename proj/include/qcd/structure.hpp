#ifndef QCD_STRUCTURE_HPP
#define QCD_STRUCTURE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcd {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a required cell tag is absent from a CIF block.
struct MissingCellParameter : ParseError {
    explicit MissingCellParameter(const std::string& tag)
        : ParseError("missing cell parameter: " + tag), tag(tag) {}
    std::string tag;
};

struct MalformedLoop : ParseError {
    MalformedLoop(const std::string& what, int line)
        : ParseError("malformed loop at line " + std::to_string(line) + ": " + what),
          line(line) {}
    int line;
};

struct NonNumericCoordinate : ParseError {
    explicit NonNumericCoordinate(const std::string& token)
        : ParseError("non-numeric coordinate: '" + token + "'") {}
};

// Carries a JSON-pointer-style path to the offending value.
struct SchemaViolation : ParseError {
    explicit SchemaViolation(const std::string& path, const std::string& why = "")
        : ParseError("schema violation at " + path + (why.empty() ? "" : ": " + why)),
          path(path) {}
    std::string path;
};

struct CellParams {
    double a = 0, b = 0, c = 0;          // lengths, angstrom
    double alpha = 0, beta = 0, gamma = 0;  // angles, degrees

    bool operator==(const CellParams&) const = default;
};

struct Atom {
    std::string element;     // canonical symbol ("Pb"), or verbatim if unrecognized
    Eigen::Vector3d frac;    // fractional coordinates, each in [0,1)

    bool operator==(const Atom& o) const {
        return element == o.element && frac == o.frac;
    }
};

struct CrystalStructure {
    std::string name;
    CellParams cell;
    std::vector<Atom> atoms;

    bool operator==(const CrystalStructure&) const = default;
};

/// Reduce a fractional coordinate into [0,1). Idempotent.
double wrap_frac(double x);
Eigen::Vector3d wrap_frac(const Eigen::Vector3d& v);

/// Canonicalize an element symbol: strips charges/digits ("Pb2+" -> "Pb"),
/// normalizes case ("pb" -> "Pb"). A symbol whose alphabetic part is not a
/// known element is returned verbatim and `recognized` is set to false.
std::string canonical_element(const std::string& token, bool* recognized = nullptr);

/// Enforce the CrystalStructure invariants. `where` is a path prefix used in
/// SchemaViolation messages (e.g. "/cell/alpha"). Wrapping of coordinates is
/// the caller's job; this only checks.
void validate_structure(const CrystalStructure& s, const std::string& where = "");

}  // namespace qcd

#endif
