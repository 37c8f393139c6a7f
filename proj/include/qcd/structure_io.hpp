#ifndef QCD_STRUCTURE_IO_HPP
#define QCD_STRUCTURE_IO_HPP

#include <string>
#include <vector>

#include "qcd/structure.hpp"

namespace qcd {

/**
 * Parse a CIF (P1-style, first data block only). Required tags:
 * _cell_length_{a,b,c}, _cell_angle_{alpha,beta,gamma}, and an atom_site
 * loop carrying an element symbol column (_atom_site_type_symbol, falling
 * back to _atom_site_label) plus _atom_site_fract_{x,y,z}.
 *
 * Fractional coordinates are wrapped into [0,1). Element symbols are
 * canonicalized; unrecognized symbols are kept verbatim and reported via
 * `warnings`. Atoms closer than 1e-6 angstrom after wrapping with the same
 * element are deduplicated (first occurrence wins, warning emitted).
 * Symmetry-operation loops, occupancy and disorder columns are ignored.
 *
 * Throws MissingCellParameter, MalformedLoop, NonNumericCoordinate,
 * SchemaViolation (cell invariant violations).
 */
CrystalStructure parse_cif(const std::string& text,
                           std::vector<std::string>* warnings = nullptr);

/// Parse the native JSON schema (see serialize_native). Same ingest
/// semantics as parse_cif. Throws SchemaViolation with a JSON-pointer path.
CrystalStructure parse_native(const std::string& text,
                              std::vector<std::string>* warnings = nullptr);

/// Serialize to the native JSON schema: keys in the exact order
/// name, cell{a,b,c,alpha,beta,gamma}, atoms[{element,frac}], numbers with
/// up to 12 significant digits. parse_native(serialize_native(s)) == s for
/// any structure whose numbers survive 12-digit formatting.
std::string serialize_native(const CrystalStructure& s);

}  // namespace qcd

#endif
