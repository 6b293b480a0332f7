#include <doctest.h>

#include <cstdlib>
#include <random>

#include "chainset/chainlab.hpp"
#include "chainset/reachsets.hpp"

using namespace chainset;

namespace {

const ControlRange kU1 = ControlRange::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));

LinearSystem scalar_system(double a, double b) {
    Matrix A(1, 1), B(1, 1);
    A << a;
    B << b;
    return LinearSystem::make(A, B, kU1);
}

LinearSystem example2() {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = -1.0;
    Matrix B(2, 1);
    B << 1.0, 1.0;
    return LinearSystem::make(A, B, kU1);
}

LinearSystem autonomous2(double a00, double a11) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = a00;
    A(1, 1) = a11;
    return LinearSystem::make(A, Matrix::Zero(2, 1), kU1);
}

GridSpec grid1(double lo, double hi, double h) {
    return GridSpec::make(Vector::Constant(1, lo), Vector::Constant(1, hi), h);
}

GridSpec grid2(double lo, double hi, double h) {
    return GridSpec::make(Vector::Constant(2, lo), Vector::Constant(2, hi), h);
}

std::int64_t node_at(const GridSpec& g, std::initializer_list<double> coords) {
    Vector x(coords.size());
    int i = 0;
    for (double c : coords) x[i++] = c;
    const std::int64_t r = g.nearest_node(x);
    REQUIRE(r >= 0);
    REQUIRE((g.node(r) - x).norm() < 1e-9);
    return r;
}

bool contains_node(const std::vector<std::int64_t>& set, std::int64_t v) {
    return std::binary_search(set.begin(), set.end(), v);
}

}  // namespace

TEST_CASE("grid spec layout") {
    const GridSpec g = grid2(-2.0, 2.0, 0.05);
    CHECK(g.counts == std::vector<int>{81, 81});
    CHECK(g.node_count == 81 * 81);
    CHECK((g.node(0) - Vector::Constant(2, -2.0)).norm() == 0.0);
    const std::int64_t r = g.nearest_node(Vector{{0.26, -1.52}});
    CHECK((g.node(r) - Vector{{0.25, -1.5}}).norm() < 1e-12);
    CHECK(g.nearest_node(Vector{{2.6, 0.0}}) == -1);
    CHECK_THROWS_AS(GridSpec::make(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0), 0.001),
                    GridTooLarge);
}

TEST_CASE("default control family: vertices, zero, midpoints") {
    const auto fam = default_control_family(kU1);
    REQUIRE(fam.size() == 5);
    std::vector<double> vals;
    for (const auto& u : fam) vals.push_back(u.values[0][0]);
    std::sort(vals.begin(), vals.end());
    CHECK(vals == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});

    const auto rich = default_control_family(kU1, true, 1.0);
    CHECK(rich.size() == 19);  // + ordered vertex pairs at 7 switch fractions
    CHECK(rich.back().breakpoints.size() == 2);
}

TEST_CASE("flow integration matches closed forms") {
    const LinearSystem stable = scalar_system(-1.0, 0.0);
    const Vector x2 = Vector::Constant(1, 2.0);
    const Vector end = integrate_flow(stable, x2, PCWControl::constant(Vector::Zero(1)), 1.0);
    CHECK(end[0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-10));

    // example 2 from the origin under u = 1: (e^t - 1, 1 - e^{-t})
    const Vector e2 = integrate_flow(example2(), Vector::Zero(2),
                                     PCWControl::constant(Vector::Constant(1, 1.0)), 1.0);
    CHECK(e2[0] == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
    CHECK(e2[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("chain graph of the scalar contraction") {
    const LinearSystem sys = scalar_system(-1.0, 0.0);
    const GridSpec g = grid1(-2.0, 2.0, 0.05);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph graph = build_chain_graph(sys, g, controls, 0.12, 1.0);

    // the origin is an equilibrium: self-edge
    const std::int64_t origin = node_at(g, {0.0});
    bool self_edge = false;
    for (const Edge& e : graph.edges[origin]) self_edge |= e.target == origin;
    CHECK(self_edge);

    // node 2 maps to 2 e^{-1} = 0.7358: edges to the lattice points nearby
    const std::int64_t right = node_at(g, {2.0});
    std::vector<double> targets;
    for (const Edge& e : graph.edges[right]) targets.push_back(g.node(e.target)[0]);
    REQUIRE(!targets.empty());
    for (double t : targets) CHECK(std::abs(t - 2.0 * std::exp(-1.0)) < 0.12);
    CHECK(contains_node(chain_reachable_from(graph, right), node_at(g, {0.75})));
}

TEST_CASE("epsilon below spacing/2 is rejected") {
    const LinearSystem sys = scalar_system(-1.0, 0.0);
    const GridSpec g = grid1(-1.0, 1.0, 0.1);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    CHECK_THROWS_AS(build_chain_graph(sys, g, controls, 0.05, 1.0), EpsilonTooSmall);
}

TEST_CASE("jump accumulation radius of the scalar contraction") {
    const LinearSystem sys = scalar_system(-1.0, 0.0);
    const GridSpec g = grid1(-2.0, 2.0, 0.05);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph graph = build_chain_graph(sys, g, controls, 0.12, 1.0);
    const auto reach = chain_reachable_from(graph, node_at(g, {2.0}));
    REQUIRE(!reach.empty());
    // all nodes within the geometric-series radius eps/(1-e^{-1}) (+ slop) are reached
    const double radius = 0.12 / (1.0 - std::exp(-1.0));
    for (double x = -0.15; x <= 0.15; x += 0.05)
        CHECK(contains_node(reach, node_at(g, {x})));
    double lo = 1e9, hi = -1e9;
    for (auto v : reach) {
        lo = std::min(lo, g.node(v)[0]);
        hi = std::max(hi, g.node(v)[0]);
    }
    CHECK(lo >= -radius - 0.05 - 1e-9);
    CHECK(hi <= 2.0 * std::exp(-1.0) + 0.12 + 1e-9);
}

TEST_CASE("reachability needs at least one edge") {
    // pure expansion: the boundary node's trajectory leaves the box
    const LinearSystem sys = scalar_system(1.0, 0.0);
    const GridSpec g = grid1(-2.0, 2.0, 0.05);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph graph = build_chain_graph(sys, g, controls, 0.12, 1.0);
    const std::int64_t right = node_at(g, {2.0});
    CHECK(graph.edges[right].empty());
    CHECK(chain_reachable_from(graph, right).empty());
    CHECK(graph.escape_count > 0);
}

TEST_CASE("edges from the origin of example 2 follow variation of parameters") {
    const LinearSystem sys = example2();
    const GridSpec g = grid2(-2.0, 2.0, 0.05);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.1, 1.0);
    const std::int64_t origin = node_at(g, {0.0, 0.0});
    // u = 1 endpoint: (e - 1, 1 - e^{-1}) = (1.7183, 0.6321)
    const Vector endpoint{{std::exp(1.0) - 1.0, 1.0 - std::exp(-1.0)}};
    bool found = false;
    for (const Edge& e : graph.edges[origin])
        found |= (g.node(e.target) - endpoint).norm() < 0.1;
    CHECK(found);
}

TEST_CASE("edge sets grow monotonically with epsilon") {
    const LinearSystem sys = example2();
    const GridSpec g = grid2(-1.0, 1.0, 0.1);
    const EndpointTable table = compute_endpoints(sys, g, default_control_family(sys.U), 1.0, 0.005);
    const ChainGraph g1 = graph_from_endpoints(table, 0.1);
    const ChainGraph g2 = graph_from_endpoints(table, 0.2);
    for (std::int64_t v = 0; v < g.node_count; ++v) {
        for (const Edge& e : g1.edges[v]) {
            bool present = false;
            for (const Edge& e2 : g2.edges[v]) present |= e2.target == e.target;
            CHECK(present);
        }
    }
    CHECK(g1.edge_count() < g2.edge_count());
}

TEST_CASE("graph construction is deterministic across thread counts") {
    const LinearSystem sys = example2();
    const GridSpec g = grid2(-1.0, 1.0, 0.1);
    const auto controls = default_control_family(sys.U);
    const ChainGraph a = build_chain_graph(sys, g, controls, 0.15, 1.0);
    setenv("CHAINSET_THREADS", "1", 1);
    const ChainGraph b = build_chain_graph(sys, g, controls, 0.15, 1.0);
    unsetenv("CHAINSET_THREADS");
    CHECK(graphs_equal(a, b));
}

TEST_CASE("reverse graph: construction and duality") {
    const LinearSystem sys = scalar_system(-1.0, 0.0);
    const GridSpec g = grid1(-2.0, 2.0, 0.05);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph fwd = build_chain_graph(sys, g, controls, 0.12, 1.0);
    const ChainGraph rev = reverse_graph(fwd);

    // the reverse graph is the directly built graph of (-A, -B)
    const ChainGraph direct = build_chain_graph(sys.time_reversed(), g, controls, 0.12, 1.0);
    CHECK(graphs_equal(rev, direct));

    // contraction pairing: reversed edges, transposed, are forward edges
    // (the expansion side shrinks residuals by e^{-T}, so inclusion holds)
    const ChainGraph rev_t = transpose_graph(rev);
    for (std::int64_t v = 0; v < g.node_count; ++v) {
        for (const Edge& e : rev_t.edges[v]) {
            bool present = false;
            for (const Edge& f : fwd.edges[v]) present |= f.target == e.target;
            CHECK(present);
        }
    }

    // graph-algebra duality: reachability in the transpose is backward reachability
    for (std::int64_t probe : {node_at(g, {0.0}), node_at(g, {1.0}), node_at(g, {-0.5})}) {
        CHECK(chain_reachable_from(transpose_graph(fwd), probe) == backward_reachable(fwd, probe));
    }
}

TEST_CASE("chain controllable set via the reversed graph contains D0 and its collar") {
    // example 1: every point of {0} x [-1,1] (+ nearby states) is chain
    // controllable to the origin; the reversed-system graph realizes this
    // as forward reachability
    Matrix A = Matrix::Zero(2, 2);
    A(1, 1) = -1.0;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    const LinearSystem sys = LinearSystem::make(A, B, kU1);
    const GridSpec g = grid2(-2.0, 2.0, 0.1);
    const ChainGraph fwd = build_chain_graph(sys, g, default_control_family(sys.U), 0.2, 1.0);
    const auto ctrl = chain_reachable_from(reverse_graph(fwd), node_at(g, {0.0, 0.0}));
    for (double y = -1.0; y <= 1.0; y += 0.2) CHECK(contains_node(ctrl, node_at(g, {0.0, y})));
    for (double x : {-0.5, 0.5})
        for (double y : {-0.5, 0.5}) CHECK(contains_node(ctrl, node_at(g, {x, y})));
}

TEST_CASE("witness extraction and validation on example 2") {
    const LinearSystem sys = example2();
    const GridSpec g = grid2(-2.0, 2.0, 0.05);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.1, 1.0);
    const std::int64_t origin = node_at(g, {0.0, 0.0});
    const std::int64_t target = node_at(g, {0.9, 0.9});

    const ChainWitness w = extract_witness(graph, origin, target);
    REQUIRE(!w.controls.empty());
    CHECK((w.points.front() - g.node(origin)).norm() == 0.0);
    CHECK((w.points.back() - g.node(target)).norm() == 0.0);
    CHECK(validate_witness(sys, w, 0.1, 1.0));

    // tampering breaks validation
    ChainWitness bad = w;
    bad.points[bad.points.size() / 2][0] += 0.2;
    CHECK_FALSE(validate_witness(sys, bad, 0.1, 1.0));
    ChainWitness slow = w;
    slow.times[0] = 0.5;
    CHECK_FALSE(validate_witness(sys, slow, 0.1, 1.0));

    // self-edge gives a length-1 witness
    const ChainWitness self = extract_witness(graph, origin, origin);
    CHECK(self.controls.size() >= 1);
    CHECK(validate_witness(sys, self, 0.1, 1.0));

    // far corner is not reachable
    CHECK_THROWS_AS(extract_witness(graph, origin, node_at(g, {2.0, 2.0})), Unreachable);

    // concatenation of validating witnesses validates
    const std::int64_t mid = node_at(g, {0.5, 0.5});
    const ChainWitness w1 = extract_witness(graph, origin, mid);
    const ChainWitness w2 = extract_witness(graph, mid, target);
    CHECK(validate_witness(sys, concatenate(w1, w2), 0.1, 1.0));
}

TEST_CASE("autonomous chain recurrence") {
    // A = 0: every node is an equilibrium
    const GridSpec small = grid2(-1.0, 1.0, 0.25);
    const auto all = autonomous_chain_recurrent_set(Matrix::Zero(2, 2), small, 0.2, 1.0);
    CHECK(static_cast<std::int64_t>(all.size()) == small.node_count);

    // A = diag(0,-1): recurrent nodes hug the x-axis
    const GridSpec g = grid2(-2.0, 2.0, 0.1);
    Matrix A = Matrix::Zero(2, 2);
    A(1, 1) = -1.0;
    const auto band = autonomous_chain_recurrent_set(A, g, 0.2, 1.0);
    REQUIRE(!band.empty());
    const double collar = 0.2 / (1.0 - std::exp(-1.0)) + 2.0 * 0.1;
    for (auto v : band) CHECK(std::abs(g.node(v)[1]) <= collar);
    for (double x = -2.0; x <= 2.0; x += 0.5) CHECK(contains_node(band, node_at(g, {x, 0.0})));

    // A = diag(1,-1): recurrent nodes hug the origin
    const auto dot = autonomous_chain_recurrent_set(Matrix{{1.0, 0.0}, {0.0, -1.0}}, g, 0.2, 1.0);
    REQUIRE(!dot.empty());
    for (auto v : dot) CHECK(g.node(v).norm() <= collar);
    CHECK(contains_node(dot, node_at(g, {0.0, 0.0})));
}

TEST_CASE("reachable set of example 1 covers the band inside the box") {
    Matrix A = Matrix::Zero(2, 2);
    A(1, 1) = -1.0;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    const LinearSystem sys = LinearSystem::make(A, B, kU1);
    const GridSpec g = GridSpec::make(Vector{{-3.0, -2.0}}, Vector{{3.0, 2.0}}, 0.1);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.2, 1.0);
    const auto reach = chain_reachable_from(graph, node_at(g, {0.0, 0.0}));
    // E = R x [-1,1]; x is frozen by the flow, so epsilon jumps spread it
    for (double x = -2.8; x <= 2.8; x += 0.4)
        for (double y = -0.8; y <= 0.8; y += 0.4) CHECK(contains_node(reach, node_at(g, {x, y})));
    const double collar = 0.2 / (1.0 - std::exp(-1.0)) + 0.2;
    for (auto v : reach) CHECK(std::abs(g.node(v)[1]) <= 1.0 + collar);
}

TEST_CASE("component of the origin for a center rotation covers the box") {
    Matrix A(2, 2);
    A << 0.0, -1.0, 1.0, 0.0;
    const LinearSystem sys = LinearSystem::make(A, Matrix::Zero(2, 1), kU1);
    const GridSpec g = grid2(-1.0, 1.0, 0.1);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph graph = build_chain_graph(sys, g, controls, 0.25, 1.0);
    const auto comp = chain_component_of(graph, node_at(g, {0.0, 0.0}));
    // the rotation preserves radii and the jumps connect them: every node
    // of the inscribed disc is mutually chain reachable with the origin
    for (std::int64_t v = 0; v < g.node_count; ++v)
        if (g.node(v).norm() <= 1.0) CHECK(contains_node(comp, v));
}

TEST_CASE("hyperbolic B = 0 component stays in the jump-accumulation collar") {
    const LinearSystem sys = autonomous2(1.0, -1.0);
    const GridSpec g = grid2(-2.0, 2.0, 0.1);
    const auto controls = std::vector<PCWControl>{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph graph = build_chain_graph(sys, g, controls, 0.2, 1.0);
    const auto comp = chain_component_of(graph, node_at(g, {0.0, 0.0}));
    REQUIRE(contains_node(comp, node_at(g, {0.0, 0.0})));
    const double collar = 0.2 / (1.0 - std::exp(-1.0)) + 0.2;
    for (auto v : comp) CHECK(g.node(v).norm() <= collar);
}

TEST_CASE("oracle component of example 1 matches the band within the collar") {
    Matrix A = Matrix::Zero(2, 2);
    A(1, 1) = -1.0;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    const LinearSystem sys = LinearSystem::make(A, B, kU1);
    const GridSpec g = grid2(-2.0, 2.0, 0.1);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.2, 1.0);
    const auto comp = chain_component_of(graph, node_at(g, {0.0, 0.0}));
    REQUIRE(!comp.empty());
    const AffineSetSum E = chain_control_set(sys);
    const CollarReport rep = collar_compare(graph, comp, E);
    CHECK(rep.pass);
    CHECK(rep.boundary_band > 0.0);  // E int box touches the box boundary here
}

TEST_CASE("three-dimensional lattices work end to end") {
    Matrix A = -Matrix::Identity(3, 3);
    Matrix B(3, 1);
    B << 1.0, 0.0, 1.0;
    const LinearSystem sys = LinearSystem::make(A, B, kU1);
    const GridSpec g = GridSpec::make(Vector::Constant(3, -1.0), Vector::Constant(3, 1.0), 0.25);
    CHECK(g.node_count == 9 * 9 * 9);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.3, 1.0);
    const std::int64_t origin = g.nearest_node(Vector::Zero(3));
    const auto comp = chain_component_of(graph, origin);
    CHECK(contains_node(comp, origin));
    // the y axis is uncontrolled and contracting: no recurrence off y = 0
    for (auto v : comp) CHECK(std::abs(g.node(v)[1]) <= 0.3 / (1.0 - std::exp(-1.0)) + 0.5);
    const ChainWitness w = extract_witness(graph, origin, comp[comp.size() / 2]);
    CHECK(validate_witness(sys, w, 0.3, 1.0));
}

TEST_CASE("collar comparison of oracle component vs formula set") {
    const LinearSystem sys = example2();
    const GridSpec g = grid2(-2.0, 2.0, 0.1);
    const ChainGraph graph =
        build_chain_graph(sys, g, default_control_family(sys.U), 0.2, 1.0);
    const auto comp = chain_component_of(graph, node_at(g, {0.0, 0.0}));
    REQUIRE(!comp.empty());
    const AffineSetSum E = chain_control_set(sys);
    const CollarReport rep = collar_compare(graph, comp, E);
    CHECK(rep.collar_width == doctest::Approx(0.2 + 0.2));
    CHECK(rep.pass);
}
