#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qcd/lattice.hpp"
#include "qcd/structure_io.hpp"

using namespace qcd;

namespace {

const char* kMinimalCif = R"(data_test
_cell_length_a 10.0
_cell_length_b 10.0
_cell_length_c 10.0
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Pb1 Pb 0.5 0.5 0.5
)";

}  // namespace

TEST_CASE("minimal cif transcribes cell and atom") {
    CrystalStructure s = parse_cif(kMinimalCif);
    CHECK(s.name == "test");
    CHECK(s.cell == CellParams{10, 10, 10, 90, 90, 90});
    REQUIRE(s.atoms.size() == 1);
    CHECK(s.atoms[0].element == "Pb");
    CHECK(s.atoms[0].frac == Eigen::Vector3d(0.5, 0.5, 0.5));
}

TEST_CASE("fractional coordinates wrap into [0,1)") {
    std::string cif = kMinimalCif;
    cif.replace(cif.find("0.5 0.5 0.5"), 11, "1.25 -0.5 0.0");
    CrystalStructure s = parse_cif(cif);
    REQUIRE(s.atoms.size() == 1);
    CHECK(s.atoms[0].frac.x() == doctest::Approx(0.25));
    CHECK(s.atoms[0].frac.y() == doctest::Approx(0.5));
    CHECK(s.atoms[0].frac.z() == 0.0);

    CHECK(wrap_frac(wrap_frac(3.7)) == wrap_frac(3.7));
    CHECK(wrap_frac(-0.0) == 0.0);
    CHECK(wrap_frac(1.0) == 0.0);
}

TEST_CASE("missing cell tag names the tag") {
    std::string cif = kMinimalCif;
    cif.erase(cif.find("_cell_length_b 10.0"), 20);
    CHECK_THROWS_WITH_AS(parse_cif(cif), doctest::Contains("_cell_length_b"),
                         MissingCellParameter);
}

TEST_CASE("loop with dangling values reports the line") {
    std::string cif = kMinimalCif;
    cif += "Pb2 Pb 0.1 0.2\n";  // one token short
    try {
        parse_cif(cif);
        FAIL("expected MalformedLoop");
    } catch (const MalformedLoop& e) {
        CHECK(e.line > 0);
    }
}

TEST_CASE("non-numeric coordinate is rejected") {
    std::string cif = kMinimalCif;
    cif.replace(cif.find("0.5 0.5 0.5"), 11, "0.5 abc 0.5");
    CHECK_THROWS_AS(parse_cif(cif), NonNumericCoordinate);
}

TEST_CASE("element symbols are canonicalized and charges stripped") {
    bool recognized = false;
    CHECK(canonical_element("pb", &recognized) == "Pb");
    CHECK(recognized);
    CHECK(canonical_element("Pb2+", &recognized) == "Pb");
    CHECK(recognized);
    CHECK(canonical_element("I-", &recognized) == "I");
    CHECK(recognized);
    CHECK(canonical_element("Qq", &recognized) == "Qq");
    CHECK_FALSE(recognized);

    std::string cif = kMinimalCif;
    cif.replace(cif.find("Pb1 Pb"), 6, "Qq1 Qq");
    std::vector<std::string> warnings;
    CrystalStructure s = parse_cif(cif, &warnings);
    CHECK(s.atoms[0].element == "Qq");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("Qq") != std::string::npos);
}

TEST_CASE("coincident same-element sites are deduplicated with a warning") {
    std::string cif = kMinimalCif;
    cif += "Pb2 Pb 0.5 0.5 0.5\nPb3 Pb2+ 1.5 0.5 0.5\n";
    std::vector<std::string> warnings;
    CrystalStructure s = parse_cif(cif, &warnings);
    CHECK(s.atoms.size() == 1);
    CHECK(warnings.size() == 2);
}

TEST_CASE("native json parses and matches the cif parse") {
    const std::string native = R"({"name":"x","cell":{"a":10,"b":20,"c":30,)"
                               R"("alpha":90,"beta":90,"gamma":90},)"
                               R"("atoms":[{"element":"Pb","frac":[0,0,0]}]})";
    CrystalStructure s = parse_native(native);
    CHECK(s.name == "x");
    CHECK(s.cell.b == 20);
    REQUIRE(s.atoms.size() == 1);
    CHECK(s.atoms[0].element == "Pb");

    CrystalStructure t = parse_cif(kMinimalCif);
    const std::string as_native = serialize_native(t);
    CHECK(parse_native(as_native) == t);
}

TEST_CASE("empty atom list is accepted") {
    CrystalStructure s = parse_native(
        R"({"name":"e","cell":{"a":1,"b":1,"c":1,"alpha":90,"beta":90,"gamma":90},"atoms":[]})");
    CHECK(s.atoms.empty());
}

TEST_CASE("schema violations carry a json pointer") {
    const char* bad_alpha = R"({"name":"x","cell":{"a":10,"b":20,"c":30,)"
                            R"("alpha":0,"beta":90,"gamma":90},"atoms":[]})";
    CHECK_THROWS_WITH_AS(parse_native(bad_alpha), doctest::Contains("/cell/alpha"),
                         SchemaViolation);
    CHECK_THROWS_WITH_AS(parse_native("{}"), doctest::Contains("/name"), SchemaViolation);
    CHECK_THROWS_AS(parse_native("not json"), SchemaViolation);
    const char* bad_frac = R"({"name":"x","cell":{"a":10,"b":20,"c":30,)"
                           R"("alpha":90,"beta":90,"gamma":90},)"
                           R"("atoms":[{"element":"Pb","frac":[0,0]}]})";
    CHECK_THROWS_WITH_AS(parse_native(bad_frac), doctest::Contains("/atoms/0/frac"),
                         SchemaViolation);
}

TEST_CASE("serialize emits keys in schema order") {
    CrystalStructure s;
    s.name = "t";
    s.cell = {1, 2, 3, 90, 90, 90};
    s.atoms.push_back({"Pb", {0.25, 0.5, 0.75}});
    CHECK(serialize_native(s) ==
          R"({"name":"t","cell":{"a":1,"b":2,"c":3,"alpha":90,"beta":90,"gamma":90},)"
          R"("atoms":[{"element":"Pb","frac":[0.25,0.5,0.75]}]})");
}

TEST_CASE("round-trip is exact for 12-digit-representable structures") {
    std::mt19937_64 rng(7);
    // Short decimal values (as written in real files) survive the
    // 12-significant-digit serialization exactly.
    auto decimal = [&](long long lo_milli, long long hi_milli) {
        long long k = lo_milli + static_cast<long long>(
                                     rng() % static_cast<uint64_t>(hi_milli - lo_milli));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld.%03lld", k / 1000, k % 1000);
        return std::strtod(buf, nullptr);
    };
    for (int trial = 0; trial < 50; ++trial) {
        CrystalStructure s;
        s.name = "r" + std::to_string(trial);
        s.cell = {decimal(1000, 21000),  decimal(1000, 21000),  decimal(1000, 21000),
                  decimal(30000, 150000), decimal(30000, 150000), decimal(30000, 150000)};
        try {
            cell_basis(s.cell);
        } catch (const DegenerateCell&) {
            continue;  // skip inconsistent random angle triples
        }
        const int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i)
            s.atoms.push_back({i % 2 ? "Pb" : "I",
                               {decimal(0, 999), decimal(0, 999), decimal(0, 999)}});
        std::vector<std::string> warnings;
        CrystalStructure parsed = parse_native(serialize_native(s), &warnings);
        CHECK(parsed == s);
    }
}
