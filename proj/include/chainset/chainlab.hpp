#pragma once

#include <cstdint>
#include <vector>

#include "chainset/convex.hpp"
#include "chainset/poincare.hpp"
#include "chainset/types.hpp"

namespace chainset {

/// Regular lattice over an axis box; node rank is row-major with axis 0
/// slowest. Node count is guarded to 10^6.
struct GridSpec {
    Vector box_lo, box_hi;
    double spacing = 0.1;

    std::vector<int> counts;  // nodes per axis
    std::int64_t node_count = 0;

    static GridSpec make(const Vector& lo, const Vector& hi, double spacing);
    int dim() const { return static_cast<int>(box_lo.size()); }
    Vector node(std::int64_t rank) const;
    std::int64_t rank_of(const std::vector<int>& idx) const;
    std::int64_t nearest_node(const Vector& x) const;  // -1 if outside the box
    bool inside_box(const Vector& x, double slack = 1e-9) const;
};

/// Constant controls at the U vertices, u = 0, and the vertex midpoints
/// v/2; with two_piece, all ordered vertex pairs switching at jump_T/2.
std::vector<PCWControl> default_control_family(const ControlRange& U, bool two_piece = false,
                                               double jump_T = 1.0);

/// phi(jump_T, x, u) by fixed-step RK4; the step is halved until the
/// Richardson error estimate is below err_cap.
Vector integrate_flow(const LinearSystem& sys, const Vector& x, const PCWControl& u, double T,
                      int base_steps = 256, double err_cap = -1.0);

/// Endpoint table phi(jump_T, node, u_k) for every node and control;
/// shared by the edge sets of all epsilon levels.
struct EndpointTable {
    GridSpec grid;
    std::vector<PCWControl> controls;
    double jump_T = 1.0;
    LinearSystem sys;
    // endpoint[node * n_controls + k]; finite entries only, escaped = ended outside box
    std::vector<Vector> endpoints;
    std::vector<std::uint8_t> escaped;
    std::int64_t escape_count = 0;
};

/// err_cap bounds the RK4 integration error per endpoint; graphs need
/// epsilon/10, so pass the smallest epsilon/10 when the table is shared.
EndpointTable compute_endpoints(const LinearSystem& sys, const GridSpec& grid,
                                const std::vector<PCWControl>& controls, double jump_T,
                                double err_cap = 5e-3);

struct Edge {
    std::int64_t target = 0;
    int control = 0;   // index into the control family (best = smallest jump)
    double dist = 0.0;
};

/// Grid graph with an edge x -> y iff min over the control family of
/// d(phi(jump_T, x, u), y) < epsilon.
struct ChainGraph {
    GridSpec grid;
    std::vector<PCWControl> controls;
    double epsilon = 0.0;
    double jump_T = 1.0;
    LinearSystem sys;
    std::vector<std::vector<Edge>> edges;  // sorted by target, one per (source,target)
    std::int64_t escape_count = 0;

    std::int64_t edge_count() const;
};

ChainGraph graph_from_endpoints(const EndpointTable& table, double epsilon);
ChainGraph build_chain_graph(const LinearSystem& sys, const GridSpec& grid,
                             const std::vector<PCWControl>& controls, double epsilon,
                             double jump_T);

/// Nodes reachable from x0 by at least one edge.
std::vector<std::int64_t> chain_reachable_from(const ChainGraph& g, std::int64_t x0);
std::vector<std::int64_t> backward_reachable(const ChainGraph& g, std::int64_t x0);

/// {y : y in fwd(x0) and x0 in fwd(y)} - the mutual chain-reachability
/// class of x0 at this (epsilon, T).
std::vector<std::int64_t> chain_component_of(const ChainGraph& g, std::int64_t x0);

/// Graph of the time-reversed system (-A, -B), same grid/controls/eps/T.
ChainGraph reverse_graph(const ChainGraph& g);

/// Pure edge reversal (graph algebra; no integration).
ChainGraph transpose_graph(const ChainGraph& g);

bool graphs_equal(const ChainGraph& a, const ChainGraph& b);

/// One edge per link: points, controls, times (all equal jump_T).
struct ChainWitness {
    std::vector<Vector> points;       // x_0 ... x_k
    std::vector<PCWControl> controls; // u_0 ... u_{k-1}
    std::vector<double> times;        // T_0 ... T_{k-1}
};

ChainWitness extract_witness(const ChainGraph& g, std::int64_t x0, std::int64_t y0);

/// Re-integrates every link at halved step; true iff every jump is
/// strictly below epsilon and every time is >= T.
bool validate_witness(const LinearSystem& sys, const ChainWitness& w, double epsilon, double T);

ChainWitness concatenate(const ChainWitness& w1, const ChainWitness& w2);

/// Nodes lying on a cycle of the (epsilon, T) graph of xdot = Ax
/// (B forced to 0): SCC members plus self-loops.
std::vector<std::int64_t> autonomous_chain_recurrent_set(const Matrix& A, const GridSpec& grid,
                                                         double epsilon, double T);

std::vector<std::int64_t> scc_cycle_nodes(const ChainGraph& g);

/// Oracle-vs-formula comparison: every node of the symmetric difference
/// between `nodes` and E int box must lie within the collar
/// eps + 2 spacing of the boundary of E int box, or within the
/// eps (1 + ||e^{AT}||) band of the box boundary. 2-D only.
struct CollarReport {
    double collar_width = 0.0;    // eps + 2 spacing
    double boundary_band = 0.0;   // eps (1 + ||e^{AT}||)
    std::int64_t only_oracle = 0;   // nodes in `nodes` but not in E int box
    std::int64_t only_formula = 0;  // nodes of E int box missing from `nodes`
    std::int64_t violations = 0;    // symdiff nodes outside both bands
    double max_violation = 0.0;     // largest distance beyond the collar
    bool pass = true;
};

CollarReport collar_compare(const ChainGraph& g, const std::vector<std::int64_t>& nodes,
                            const AffineSetSum& E);

/// Same comparison against a subspace (chain-recurrence vs L0), with the
/// jump-accumulation collar eps / (1 - e^{-mu T}) + 2 spacing.
CollarReport collar_compare_subspace(const ChainGraph& g, const std::vector<std::int64_t>& nodes,
                                     const Matrix& subspace_basis, double mu);

}  // namespace chainset
