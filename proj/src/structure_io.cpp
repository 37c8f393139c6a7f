#include "qcd/structure_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "qcd/lattice.hpp"

namespace qcd {

namespace {

struct Token {
    std::string text;
    int line;
};

// CIF values may carry a standard uncertainty suffix, e.g. "0.5021(3)".
std::string strip_uncertainty(const std::string& s) {
    auto pos = s.find('(');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

double parse_number(const std::string& raw) {
    const std::string s = strip_uncertainty(raw);
    const char* begin = s.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(value))
        throw NonNumericCoordinate(raw);
    return value;
}

bool istart(const std::string& s, const char* prefix) {
    size_t n = std::strlen(prefix);
    if (s.size() < n) return false;
    for (size_t i = 0; i < n; ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    return true;
}

// Split a CIF line into whitespace-separated tokens, honoring single and
// double quotes. Comments start with '#'.
std::vector<std::string> split_cif_line(const std::string& line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        if (line[i] == '\'' || line[i] == '"') {
            char quote = line[i++];
            std::string tok;
            while (i < line.size() && line[i] != quote) tok.push_back(line[i++]);
            if (i < line.size()) ++i;
            out.push_back(tok);
        } else {
            std::string tok;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
                tok.push_back(line[i++]);
            out.push_back(tok);
        }
    }
    return out;
}

void ingest_atoms(CrystalStructure& s, std::vector<std::string>* warnings) {
    // Canonicalize symbols; flag the ones not in the element table.
    for (Atom& atom : s.atoms) {
        bool recognized = false;
        std::string canon = canonical_element(atom.element, &recognized);
        if (!recognized && warnings)
            warnings->push_back("unrecognized element symbol '" + atom.element + "'");
        atom.element = canon;
        atom.frac = wrap_frac(atom.frac);
    }
    validate_structure(s);

    // Deduplicate coincident same-element sites; degenerate points would
    // produce zero Rips diameters downstream.
    const LatticeBasis basis = cell_basis(s.cell);
    std::vector<Atom> kept;
    for (const Atom& atom : s.atoms) {
        bool duplicate = false;
        for (const Atom& prev : kept) {
            if (prev.element != atom.element) continue;
            Eigen::Vector3d d = basis.cartesian(atom.frac) - basis.cartesian(prev.frac);
            if (d.norm() < 1e-6) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) {
            if (warnings)
                warnings->push_back("duplicate " + atom.element + " site dropped");
        } else {
            kept.push_back(atom);
        }
    }
    s.atoms = std::move(kept);
}

}  // namespace

CrystalStructure parse_cif(const std::string& text,
                           std::vector<std::string>* warnings) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    CrystalStructure s;
    bool in_block = false;
    std::optional<double> cell[6];
    static const char* cell_tags[6] = {"_cell_length_a",   "_cell_length_b",
                                       "_cell_length_c",   "_cell_angle_alpha",
                                       "_cell_angle_beta", "_cell_angle_gamma"};

    struct Loop {
        std::vector<std::string> tags;
        std::vector<Token> values;
        int start_line = 0;
    };
    std::vector<Loop> loops;

    enum class State { Top, LoopTags, LoopValues };
    State state = State::Top;

    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = split_cif_line(line);
        if (tokens.empty()) continue;
        const std::string& head = tokens[0];

        if (istart(head, "data_")) {
            if (in_block) break;  // first block only
            in_block = true;
            s.name = head.substr(5);
            state = State::Top;
            continue;
        }
        if (istart(head, "loop_")) {
            loops.push_back(Loop{{}, {}, lineno});
            state = State::LoopTags;
            continue;
        }
        if (head[0] == '_') {
            if (state == State::LoopTags) {
                loops.back().tags.push_back(head);
                if (tokens.size() > 1)
                    throw MalformedLoop("values on a loop tag line", lineno);
                continue;
            }
            state = State::Top;
            for (int k = 0; k < 6; ++k) {
                if (head == cell_tags[k]) {
                    if (tokens.size() < 2) throw MissingCellParameter(head);
                    cell[k] = parse_number(tokens[1]);
                }
            }
            continue;
        }
        // Data tokens.
        if (state == State::LoopTags) state = State::LoopValues;
        if (state == State::LoopValues) {
            for (auto& t : tokens) loops.back().values.push_back({t, lineno});
            continue;
        }
        // Stray values outside any loop are ignored (multi-line text fields
        // and other CIF constructs outside the supported subset).
    }

    for (int k = 0; k < 6; ++k)
        if (!cell[k]) throw MissingCellParameter(cell_tags[k]);
    s.cell = {*cell[0], *cell[1], *cell[2], *cell[3], *cell[4], *cell[5]};

    // Find the atom_site loop with fractional coordinates.
    const Loop* atom_loop = nullptr;
    for (const Loop& loop : loops) {
        bool has_x = false;
        for (const auto& t : loop.tags)
            if (t == "_atom_site_fract_x") has_x = true;
        if (has_x) {
            atom_loop = &loop;
            break;
        }
    }
    if (!atom_loop)
        throw MalformedLoop("no atom_site loop with _atom_site_fract_x found", lineno);

    auto column = [&](const char* tag) -> int {
        for (size_t i = 0; i < atom_loop->tags.size(); ++i)
            if (atom_loop->tags[i] == tag) return static_cast<int>(i);
        return -1;
    };
    const int ncols = static_cast<int>(atom_loop->tags.size());
    int col_sym = column("_atom_site_type_symbol");
    if (col_sym < 0) col_sym = column("_atom_site_label");
    const int col_x = column("_atom_site_fract_x");
    const int col_y = column("_atom_site_fract_y");
    const int col_z = column("_atom_site_fract_z");
    if (col_sym < 0 || col_x < 0 || col_y < 0 || col_z < 0)
        throw MalformedLoop("atom_site loop lacks symbol or fract_x/y/z columns",
                            atom_loop->start_line);
    if (atom_loop->values.empty() ||
        atom_loop->values.size() % static_cast<size_t>(ncols) != 0)
        throw MalformedLoop("loop value count is not a multiple of its tag count",
                            atom_loop->values.empty() ? atom_loop->start_line
                                                      : atom_loop->values.back().line);

    const int nrows = static_cast<int>(atom_loop->values.size()) / ncols;
    for (int r = 0; r < nrows; ++r) {
        auto value = [&](int c) -> const Token& { return atom_loop->values[r * ncols + c]; };
        Atom atom;
        atom.element = value(col_sym).text;
        atom.frac = {parse_number(value(col_x).text), parse_number(value(col_y).text),
                     parse_number(value(col_z).text)};
        s.atoms.push_back(std::move(atom));
    }

    ingest_atoms(s, warnings);
    return s;
}

namespace {

using json = nlohmann::json;

const json* require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw SchemaViolation(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaViolation(path + "/" + key, "missing");
    return &*it;
}

double require_number(const json& obj, const char* key, const std::string& path) {
    const json* v = require(obj, key, path);
    if (!v->is_number()) throw SchemaViolation(path + "/" + key, "expected a number");
    return v->get<double>();
}

}  // namespace

CrystalStructure parse_native(const std::string& text,
                              std::vector<std::string>* warnings) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("/", std::string("invalid JSON: ") + e.what());
    }

    CrystalStructure s;
    const json* name = require(root, "name", "");
    if (!name->is_string()) throw SchemaViolation("/name", "expected a string");
    s.name = name->get<std::string>();

    const json* cell = require(root, "cell", "");
    s.cell.a = require_number(*cell, "a", "/cell");
    s.cell.b = require_number(*cell, "b", "/cell");
    s.cell.c = require_number(*cell, "c", "/cell");
    s.cell.alpha = require_number(*cell, "alpha", "/cell");
    s.cell.beta = require_number(*cell, "beta", "/cell");
    s.cell.gamma = require_number(*cell, "gamma", "/cell");

    const json* atoms = require(root, "atoms", "");
    if (!atoms->is_array()) throw SchemaViolation("/atoms", "expected an array");
    for (size_t i = 0; i < atoms->size(); ++i) {
        const std::string path = "/atoms/" + std::to_string(i);
        const json& a = (*atoms)[i];
        const json* element = require(a, "element", path);
        if (!element->is_string())
            throw SchemaViolation(path + "/element", "expected a string");
        const json* frac = require(a, "frac", path);
        if (!frac->is_array() || frac->size() != 3)
            throw SchemaViolation(path + "/frac", "expected a 3-array");
        Atom atom;
        atom.element = element->get<std::string>();
        for (int k = 0; k < 3; ++k) {
            if (!(*frac)[k].is_number())
                throw SchemaViolation(path + "/frac/" + std::to_string(k),
                                      "expected a number");
            atom.frac[k] = (*frac)[k].get<double>();
        }
        s.atoms.push_back(std::move(atom));
    }

    ingest_atoms(s, warnings);
    return s;
}

namespace {

std::string fmt_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out.push_back(ch);
                }
        }
    }
    return out;
}

}  // namespace

std::string serialize_native(const CrystalStructure& s) {
    std::string out = "{\"name\":\"" + escape(s.name) + "\",\"cell\":{";
    out += "\"a\":" + fmt_number(s.cell.a);
    out += ",\"b\":" + fmt_number(s.cell.b);
    out += ",\"c\":" + fmt_number(s.cell.c);
    out += ",\"alpha\":" + fmt_number(s.cell.alpha);
    out += ",\"beta\":" + fmt_number(s.cell.beta);
    out += ",\"gamma\":" + fmt_number(s.cell.gamma);
    out += "},\"atoms\":[";
    for (size_t i = 0; i < s.atoms.size(); ++i) {
        if (i) out += ",";
        const Atom& a = s.atoms[i];
        out += "{\"element\":\"" + escape(a.element) + "\",\"frac\":[";
        out += fmt_number(a.frac[0]) + "," + fmt_number(a.frac[1]) + "," +
               fmt_number(a.frac[2]);
        out += "]}";
    }
    out += "]}";
    return out;
}

}  // namespace qcd
