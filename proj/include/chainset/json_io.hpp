#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "chainset/chainlab.hpp"
#include "chainset/poincare.hpp"
#include "chainset/reachsets.hpp"

namespace chainset {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "chainset 0.1.0";

/// Optional per-file analysis options ("options" object of a spec file).
struct SpecOptions {
    std::optional<double> horizon, quad_tol, tol_re, epsilon, T, spacing, r_plot;
    std::optional<int> samples;
    std::optional<Vector> box_lo, box_hi;
};

struct SystemSpec {
    LinearSystem sys;
    SpecOptions options;
    std::string input_hash;  // FNV-1a of the canonical spec dump
};

/// Strict parser: unknown keys are rejected with a diagnostic naming the key.
SystemSpec parse_system_spec(const Json& j);
SystemSpec parse_system_spec_file(const std::string& path);

Json matrix_to_json(const Matrix& M);  // row-major array of rows
Matrix matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);

Json body_to_json(const ConvexBody& b);
ConvexBody body_from_json(const Json& j);
Json affine_to_json(const AffineSetSum& s);
AffineSetSum affine_from_json(const Json& j);

/// Adjacency with node index = lattice rank, row-major.
Json graph_to_json(const ChainGraph& g);
Json witness_to_json(const ChainWitness& w);
Json control_to_json(const PCWControl& u);

Json split_summary(const SpectralSplit& split, const Matrix& ctrb);

/// Canonical text: nlohmann sorts keys and emits shortest round-trip floats.
std::string canonical_dump(const Json& j);
std::string fnv1a_hex(const std::string& data);

Json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace chainset
