#include "qcd/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "qcd/structure.hpp"

namespace qcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimplexKeyHash {
    size_t operator()(const std::array<int, 4>& k) const {
        size_t h = 14695981039346656037ull;
        for (int x : k) {
            h ^= static_cast<size_t>(static_cast<unsigned>(x));
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::string simplex_to_string(const Simplex& s) {
    std::string out = "(";
    for (int i = 0; i <= s.dim; ++i) {
        if (i) out += ",";
        out += std::to_string(s.v[i]);
    }
    return out + ")";
}

bool order_before(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.v < b.v;
}

}  // namespace

void sort_filtration(Filtration& f) {
    std::sort(f.simplices.begin(), f.simplices.end(), order_before);
}

DistanceMatrix bipartite_distances(const ExtendedMotif& em) {
    const int n = em.size();
    DistanceMatrix d = DistanceMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double value = (!em.in_original[i] && !em.in_original[j])
                               ? kInf
                               : (em.points[i] - em.points[j]).norm();
            d(i, j) = d(j, i) = value;
        }
    }
    return d;
}

Filtration build_rips(const DistanceMatrix& d, double max_value, int max_dim) {
    if (!(max_value > 0)) throw std::invalid_argument("build_rips: max_value must be > 0");
    if (max_dim < 1 || max_dim > 3)
        throw std::invalid_argument("build_rips: max_dim must be in {1,2,3}");
    if (d.rows() != d.cols()) throw std::invalid_argument("build_rips: matrix not square");

    const int n = static_cast<int>(d.rows());
    Filtration f;
    f.n_vertices = n;
    f.max_dim = max_dim;

    for (int i = 0; i < n; ++i)
        f.simplices.push_back({{i, -1, -1, -1}, 0, 0.0, false});

    // Forward adjacency: j > i with d(i,j) <= max_value. +inf never passes.
    std::vector<std::vector<int>> nbr(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (d(i, j) <= max_value) nbr[i].push_back(j);

    for (int i = 0; i < n; ++i)
        for (int j : nbr[i])
            f.simplices.push_back({{i, j, -1, -1}, 1, d(i, j), false});

    if (max_dim >= 2) {
        for (int i = 0; i < n; ++i) {
            for (size_t a = 0; a < nbr[i].size(); ++a) {
                const int j = nbr[i][a];
                for (size_t b = a + 1; b < nbr[i].size(); ++b) {
                    const int k = nbr[i][b];
                    if (!(d(j, k) <= max_value)) continue;
                    const double diam = std::max({d(i, j), d(i, k), d(j, k)});
                    f.simplices.push_back({{i, j, k, -1}, 2, diam, false});
                    if (max_dim < 3) continue;
                    for (size_t c = b + 1; c < nbr[i].size(); ++c) {
                        const int l = nbr[i][c];
                        if (!(d(j, l) <= max_value) || !(d(k, l) <= max_value)) continue;
                        const double diam3 =
                            std::max({diam, d(i, l), d(j, l), d(k, l)});
                        f.simplices.push_back({{i, j, k, l}, 3, diam3, false});
                    }
                }
            }
        }
    }

    sort_filtration(f);
    return f;
}

Filtration augment_gluing_stars(const Filtration& f,
                                const std::vector<std::vector<int>>& classes) {
    Filtration out = f;
    out.classes = classes;
    if (classes.empty()) return out;

    // Member vertices must exist at value 0 or the star edges would violate
    // face closure.
    std::unordered_set<int> at_zero;
    for (const Simplex& s : f.simplices)
        if (s.dim == 0 && s.value == 0.0) at_zero.insert(s.v[0]);

    int apex = f.n_vertices;
    for (const auto& members : classes) {
        if (members.empty())
            throw std::invalid_argument("augment_gluing_stars: empty class");
        out.simplices.push_back({{apex, -1, -1, -1}, 0, 0.0, true});
        for (int member : members) {
            if (member < 0 || member >= f.n_vertices || !at_zero.count(member))
                throw std::invalid_argument(
                    "augment_gluing_stars: class member " + std::to_string(member) +
                    " is not a vertex at value 0");
            std::array<int, 4> verts{{std::min(member, apex), std::max(member, apex), -1, -1}};
            out.simplices.push_back({verts, 1, 0.0, true});
        }
        ++apex;
    }
    out.n_apex = static_cast<int>(classes.size());
    sort_filtration(out);
    return out;
}

void validate_filtration(const Filtration& f) {
    const int total_vertices = f.n_vertices + f.n_apex;
    std::unordered_map<std::array<int, 4>, double, SimplexKeyHash> value_of;
    value_of.reserve(f.simplices.size() * 2);
    for (const Simplex& s : f.simplices)
        if (!value_of.emplace(s.v, s.value).second)
            throw std::invalid_argument("duplicate simplex " + simplex_to_string(s));

    double prev_value = -kInf;
    int prev_dim = -1;
    std::array<int, 4> prev_v{{-1, -1, -1, -1}};

    for (const Simplex& s : f.simplices) {
        if (s.dim < 0 || s.dim > 3)
            throw std::invalid_argument("simplex dimension out of range");
        if (!(s.value >= 0) || !std::isfinite(s.value))
            throw ValueInversion("simplex " + simplex_to_string(s) +
                                 " has an invalid filtration value");
        for (int i = 0; i <= s.dim; ++i) {
            if (s.v[i] < 0 || s.v[i] >= total_vertices)
                throw std::invalid_argument("vertex id out of range in simplex " +
                                            simplex_to_string(s));
            if (i > 0 && !(s.v[i - 1] < s.v[i]))
                throw std::invalid_argument("vertex tuple not strictly ascending in " +
                                            simplex_to_string(s));
        }
        if (s.gluing_star) {
            if (s.dim > 1 || s.value != 0.0)
                throw std::invalid_argument("gluing-star simplex must be a vertex or "
                                            "edge at value 0: " + simplex_to_string(s));
        } else if (s.dim >= 2) {
            for (int i = 0; i <= s.dim; ++i)
                if (s.v[i] >= f.n_vertices)
                    throw std::invalid_argument("simplex of dimension >= 2 touches an "
                                                "apex: " + simplex_to_string(s));
        }

        // Sorted order.
        if (std::make_tuple(prev_value, prev_dim, prev_v) >
            std::make_tuple(s.value, s.dim, s.v))
            throw std::invalid_argument("filtration not sorted at simplex " +
                                        simplex_to_string(s));
        prev_value = s.value;
        prev_dim = s.dim;
        prev_v = s.v;

        // Faces must be present with value <= ours.
        if (s.dim > 0) {
            for (int drop = 0; drop <= s.dim; ++drop) {
                std::array<int, 4> face{{-1, -1, -1, -1}};
                int w = 0;
                for (int i = 0; i <= s.dim; ++i)
                    if (i != drop) face[w++] = s.v[i];
                auto it = value_of.find(face);
                if (it == value_of.end()) throw NotFaceClosed(simplex_to_string(s));
                if (it->second > s.value)
                    throw ValueInversion("face of " + simplex_to_string(s) +
                                         " enters later than the simplex itself");
            }
        }
    }
}

Filtration parse_explicit_filtration(const std::string& text) {
    using json = nlohmann::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("/", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw SchemaViolation("/", "expected an object");
    if (!root.contains("vertices") || !root["vertices"].is_number_integer())
        throw SchemaViolation("/vertices", "expected an integer");
    if (!root.contains("simplices") || !root["simplices"].is_array())
        throw SchemaViolation("/simplices", "expected an array");

    Filtration f;
    f.n_vertices = root["vertices"].get<int>();
    if (f.n_vertices < 0) throw SchemaViolation("/vertices", "must be >= 0");

    if (root.contains("classes")) {
        if (!root["classes"].is_array())
            throw SchemaViolation("/classes", "expected an array of arrays");
        for (size_t i = 0; i < root["classes"].size(); ++i) {
            const auto& cls = root["classes"][i];
            if (!cls.is_array())
                throw SchemaViolation("/classes/" + std::to_string(i),
                                      "expected an array");
            std::vector<int> members;
            for (const auto& id : cls) {
                if (!id.is_number_integer())
                    throw SchemaViolation("/classes/" + std::to_string(i),
                                          "expected integer ids");
                members.push_back(id.get<int>());
            }
            f.classes.push_back(std::move(members));
        }
    }

    int max_dim_seen = 0;
    for (size_t i = 0; i < root["simplices"].size(); ++i) {
        const std::string path = "/simplices/" + std::to_string(i);
        const auto& entry = root["simplices"][i];
        if (!entry.is_object() || !entry.contains("v") || !entry.contains("t"))
            throw SchemaViolation(path, "expected {\"v\":[ids],\"t\":value}");
        if (!entry["v"].is_array() || entry["v"].empty() || entry["v"].size() > 4)
            throw SchemaViolation(path + "/v", "expected 1 to 4 vertex ids");
        if (!entry["t"].is_number()) throw SchemaViolation(path + "/t", "expected a number");

        Simplex s;
        s.dim = static_cast<int>(entry["v"].size()) - 1;
        for (int k = 0; k <= s.dim; ++k) {
            if (!entry["v"][k].is_number_integer())
                throw SchemaViolation(path + "/v", "expected integer ids");
            s.v[k] = entry["v"][k].get<int>();
        }
        std::sort(s.v.begin(), s.v.begin() + s.dim + 1);
        s.value = entry["t"].get<double>();
        if (!(s.value >= 0))
            throw SchemaViolation(path + "/t", "filtration values must be >= 0");
        max_dim_seen = std::max(max_dim_seen, s.dim);
        f.simplices.push_back(s);
    }
    f.max_dim = std::max(max_dim_seen, 3);  // explicit input is taken as complete

    sort_filtration(f);
    validate_filtration(f);
    return f;
}

std::string serialize_explicit_filtration(const Filtration& f) {
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string out = "{\"vertices\":" + std::to_string(f.n_vertices) + ",\"classes\":[";
    for (size_t i = 0; i < f.classes.size(); ++i) {
        if (i) out += ",";
        out += "[";
        for (size_t j = 0; j < f.classes[i].size(); ++j) {
            if (j) out += ",";
            out += std::to_string(f.classes[i][j]);
        }
        out += "]";
    }
    out += "],\"simplices\":[";
    bool first = true;
    for (const Simplex& s : f.simplices) {
        if (s.gluing_star) continue;
        if (!first) out += ",";
        first = false;
        out += "{\"v\":[";
        for (int i = 0; i <= s.dim; ++i) {
            if (i) out += ",";
            out += std::to_string(s.v[i]);
        }
        out += "],\"t\":" + fmt(s.value) + "}";
    }
    out += "]}";
    return out;
}

}  // namespace qcd
