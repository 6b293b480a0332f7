#include "chainset/json_io.hpp"

#include <fstream>
#include <set>

namespace chainset {

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw ParseError(std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw ParseError("unknown key \"" + key + "\" in " + where);
    }
}

double number_at(const Json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (int i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + " must be a nonempty array of rows");
    const size_t rows = j.size();
    size_t cols = 0;
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array()) throw ParseError(std::string(what) + " rows must be arrays");
        if (i == 0) cols = j[i].size();
        if (j[i].size() != cols) throw ParseError(std::string(what) + " rows have unequal length");
    }
    if (cols == 0) throw ParseError(std::string(what) + " has empty rows");
    Matrix M(rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t k = 0; k < cols; ++k) M(static_cast<int>(i), static_cast<int>(k)) = number_at(j[i][k], what);
    return M;
}

Json vector_to_json(const Vector& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = number_at(j[i], what);
    return v;
}

SystemSpec parse_system_spec(const Json& j) {
    require_keys(j, {"A", "B", "U", "options"}, "system spec");
    if (!j.contains("A") || !j.contains("B") || !j.contains("U"))
        throw ParseError("system spec needs keys A, B, U");

    const Matrix A = matrix_from_json(j.at("A"), "A");
    const Matrix B = matrix_from_json(j.at("B"), "B");

    const Json& ju = j.at("U");
    require_keys(ju, {"type", "lo", "hi", "vertices"}, "U");
    if (!ju.contains("type")) throw ParseError("U needs a \"type\"");
    const std::string type = ju.at("type").get<std::string>();
    ControlRange U;
    if (type == "box") {
        require_keys(ju, {"type", "lo", "hi"}, "U (box)");
        if (!ju.contains("lo") || !ju.contains("hi")) throw ParseError("box U needs lo and hi");
        U = ControlRange::box(vector_from_json(ju.at("lo"), "U.lo"),
                              vector_from_json(ju.at("hi"), "U.hi"));
    } else if (type == "polytope") {
        require_keys(ju, {"type", "vertices"}, "U (polytope)");
        if (!ju.contains("vertices")) throw ParseError("polytope U needs vertices");
        // vertices given as a list of points; stored column-wise
        const Matrix V = matrix_from_json(ju.at("vertices"), "U.vertices");
        U = ControlRange::polytope(V.transpose());
    } else {
        throw ParseError("U.type must be \"box\" or \"polytope\"");
    }

    SystemSpec spec;
    spec.sys = LinearSystem::make(A, B, U);

    if (j.contains("options")) {
        const Json& jo = j.at("options");
        require_keys(jo,
                     {"horizon", "quad_tol", "tol_re", "epsilon", "T", "spacing", "samples",
                      "r_plot", "box_lo", "box_hi"},
                     "options");
        auto num = [&](const char* key) -> std::optional<double> {
            if (!jo.contains(key)) return std::nullopt;
            return number_at(jo.at(key), key);
        };
        spec.options.horizon = num("horizon");
        spec.options.quad_tol = num("quad_tol");
        spec.options.tol_re = num("tol_re");
        spec.options.epsilon = num("epsilon");
        spec.options.T = num("T");
        spec.options.spacing = num("spacing");
        spec.options.r_plot = num("r_plot");
        if (jo.contains("samples")) spec.options.samples = static_cast<int>(number_at(jo.at("samples"), "samples"));
        if (jo.contains("box_lo")) spec.options.box_lo = vector_from_json(jo.at("box_lo"), "box_lo");
        if (jo.contains("box_hi")) spec.options.box_hi = vector_from_json(jo.at("box_hi"), "box_hi");
    }

    spec.input_hash = fnv1a_hex(canonical_dump(j));
    return spec;
}

SystemSpec parse_system_spec_file(const std::string& path) {
    return parse_system_spec(load_json_file(path));
}

Json body_to_json(const ConvexBody& b) {
    Json j;
    j["ambient_dim"] = b.ambient_dim();
    j["directions"] = matrix_to_json(b.directions().transpose());  // one direction per row
    j["support_values"] = vector_to_json(b.support_values());
    if (b.has_vertices()) j["vertices"] = matrix_to_json(b.vertices().transpose());
    j["open_interior"] = b.open_interior;
    return j;
}

ConvexBody body_from_json(const Json& j) {
    require_keys(j, {"ambient_dim", "directions", "support_values", "vertices", "open_interior"},
                 "ConvexBody");
    const int dim = j.at("ambient_dim").get<int>();
    if (dim == 0) return ConvexBody::from_support(0, [](const Vector&) { return 0.0; });
    const Matrix dirs = matrix_from_json(j.at("directions"), "directions").transpose();
    const Vector vals = vector_from_json(j.at("support_values"), "support_values");
    if (dirs.cols() != vals.size()) throw ParseError("directions vs support_values length");
    int idx = 0;
    ConvexBody b = ConvexBody::from_support(
        dim, [&](const Vector&) { return vals[idx++]; }, dirs);
    if (j.contains("vertices") && dim <= 2) {
        // vertex list is authoritative when present
        const Matrix v = matrix_from_json(j.at("vertices"), "vertices").transpose();
        b = ConvexBody::from_points(v, dirs);
    }
    if (j.contains("open_interior")) b.open_interior = j.at("open_interior").get<bool>();
    return b;
}

Json affine_to_json(const AffineSetSum& s) {
    Json j;
    j["ambient_dim"] = s.ambient_dim();
    j["compact"] = body_to_json(s.compact);
    j["subspace_basis"] = s.subspace_basis.cols() == 0 ? Json::array() : matrix_to_json(s.subspace_basis);
    j["w_basis"] = s.w_basis.cols() == 0 ? Json::array() : matrix_to_json(s.w_basis);
    return j;
}

AffineSetSum affine_from_json(const Json& j) {
    require_keys(j, {"ambient_dim", "compact", "subspace_basis", "w_basis"}, "AffineSetSum");
    AffineSetSum s;
    s.compact = body_from_json(j.at("compact"));
    const int n = j.at("ambient_dim").get<int>();
    const Json& jb = j.at("subspace_basis");
    const Json& jw = j.at("w_basis");
    s.subspace_basis = jb.empty() ? Matrix(n, 0) : matrix_from_json(jb, "subspace_basis");
    s.w_basis = jw.empty() ? Matrix(n, 0) : matrix_from_json(jw, "w_basis");
    if (s.subspace_basis.rows() != n || s.w_basis.rows() != n)
        throw ParseError("AffineSetSum basis rows vs ambient_dim");
    return s;
}

Json graph_to_json(const ChainGraph& g) {
    Json j;
    j["epsilon"] = g.epsilon;
    j["jump_T"] = g.jump_T;
    j["spacing"] = g.grid.spacing;
    j["box_lo"] = vector_to_json(g.grid.box_lo);
    j["box_hi"] = vector_to_json(g.grid.box_hi);
    j["node_count"] = g.grid.node_count;
    j["escape_count"] = g.escape_count;
    Json adj = Json::array();
    for (const auto& row : g.edges) {
        Json targets = Json::array();
        for (const Edge& e : row) targets.push_back(e.target);
        adj.push_back(std::move(targets));
    }
    j["adjacency"] = std::move(adj);
    return j;
}

Json control_to_json(const PCWControl& u) {
    Json j;
    j["breakpoints"] = Json::array();
    j["values"] = Json::array();
    for (double b : u.breakpoints) j["breakpoints"].push_back(b);
    for (const auto& v : u.values) j["values"].push_back(vector_to_json(v));
    return j;
}

Json witness_to_json(const ChainWitness& w) {
    Json j;
    j["points"] = Json::array();
    for (const auto& p : w.points) j["points"].push_back(vector_to_json(p));
    j["controls"] = Json::array();
    for (const auto& u : w.controls) j["controls"].push_back(control_to_json(u));
    j["times"] = Json::array();
    for (double t : w.times) j["times"].push_back(t);
    return j;
}

Json split_summary(const SpectralSplit& split, const Matrix& ctrb) {
    Json j;
    j["dim_plus"] = split.dim_plus();
    j["dim_zero"] = split.dim_zero();
    j["dim_minus"] = split.dim_minus();
    j["dim_ctrb"] = static_cast<int>(ctrb.cols());
    j["hyperbolic"] = is_hyperbolic(split);
    j["tol_re"] = split.tol_re;
    Json ev = Json::array();
    for (const auto& l : split.eigenvalues) {
        Json e;
        e["re"] = l.real();
        e["im"] = l.imag();
        ev.push_back(std::move(e));
    }
    j["eigenvalues"] = std::move(ev);
    return j;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

}  // namespace chainset
