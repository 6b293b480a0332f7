#include "chainset/chainlab.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <deque>
#include <thread>

#include "chainset/spectral.hpp"

namespace chainset {

namespace {

int worker_count(std::int64_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CHAINSET_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<std::int64_t>(hw, std::max<std::int64_t>(jobs, 1)));
}

// Deterministic parallel for: every index is computed independently into
// its own slot, so the schedule cannot affect the result.
template <typename F>
void parallel_for(std::int64_t count, F&& body) {
    const int workers = worker_count(count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::int64_t i = next.fetch_add(64);
                if (i >= count) return;
                const std::int64_t hi = std::min(count, i + 64);
                for (std::int64_t j = i; j < hi; ++j) body(j);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

GridSpec GridSpec::make(const Vector& lo, const Vector& hi, double spacing) {
    if (lo.size() != hi.size() || lo.size() == 0) throw DimensionMismatch("grid box");
    if (!(spacing > 0.0)) throw ParseError("grid spacing must be positive");
    GridSpec g;
    g.box_lo = lo;
    g.box_hi = hi;
    g.spacing = spacing;
    g.node_count = 1;
    for (int i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw ParseError("grid box must satisfy lo < hi");
        // +1e-6 absorbs binary rounding in spacings like 0.05
        const int cells = static_cast<int>(std::floor((hi[i] - lo[i]) / spacing + 1e-6));
        g.counts.push_back(cells + 1);
        g.node_count *= cells + 1;
        if (g.node_count > 1000000) throw GridTooLarge("more than 1e6 grid nodes");
    }
    return g;
}

Vector GridSpec::node(std::int64_t rank) const {
    Vector x(dim());
    for (int i = dim() - 1; i >= 0; --i) {
        const int c = counts[i];
        x[i] = box_lo[i] + spacing * static_cast<double>(rank % c);
        rank /= c;
    }
    return x;
}

std::int64_t GridSpec::rank_of(const std::vector<int>& idx) const {
    std::int64_t r = 0;
    for (int i = 0; i < dim(); ++i) r = r * counts[i] + idx[i];
    return r;
}

std::int64_t GridSpec::nearest_node(const Vector& x) const {
    std::vector<int> idx(dim());
    for (int i = 0; i < dim(); ++i) {
        const int k = static_cast<int>(std::lround((x[i] - box_lo[i]) / spacing));
        if (k < 0 || k >= counts[i]) return -1;
        idx[i] = k;
    }
    return rank_of(idx);
}

bool GridSpec::inside_box(const Vector& x, double slack) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < box_lo[i] - slack || x[i] > box_hi[i] + slack) return false;
    return true;
}

std::vector<PCWControl> default_control_family(const ControlRange& U, bool two_piece,
                                               double jump_T) {
    std::vector<PCWControl> fam;
    const Matrix& V = U.vertices();
    for (int i = 0; i < V.cols(); ++i) fam.push_back(PCWControl::constant(V.col(i)));
    fam.push_back(PCWControl::constant(Vector::Zero(U.dim())));
    for (int i = 0; i < V.cols(); ++i) fam.push_back(PCWControl::constant(0.5 * V.col(i)));
    if (two_piece) {
        // switch fractions spread over the jump window so the endpoint
        // offsets fill in between the constant-control values
        static const double fractions[] = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
        for (double f : fractions)
            for (int i = 0; i < V.cols(); ++i)
                for (int j = 0; j < V.cols(); ++j) {
                    if (i == j) continue;
                    fam.push_back(PCWControl{{0.0, f * jump_T}, {V.col(i), V.col(j)}});
                }
    }
    return fam;
}

namespace {

Vector rk4(const LinearSystem& sys, Vector x, const PCWControl& u, double T, int steps) {
    const double h = T / steps;
    const Matrix& A = sys.A;
    const Matrix& B = sys.B;
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        const Vector u0 = B * u.value_at(t);
        const Vector um = B * u.value_at(t + 0.5 * h);
        const Vector u1 = B * u.value_at(t + h);
        const Vector k1 = A * x + u0;
        const Vector k2 = A * (x + 0.5 * h * k1) + um;
        const Vector k3 = A * (x + 0.5 * h * k2) + um;
        const Vector k4 = A * (x + h * k3) + u1;
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

}  // namespace

Vector integrate_flow(const LinearSystem& sys, const Vector& x, const PCWControl& u, double T,
                      int base_steps, double err_cap) {
    int steps = base_steps;
    Vector fine = rk4(sys, x, u, T, steps);
    if (err_cap > 0.0) {
        for (int round = 0; round < 6; ++round) {
            const Vector coarse = rk4(sys, x, u, T, steps / 2);
            const double est = (fine - coarse).norm() / 15.0;  // Richardson, order 4
            if (est <= err_cap) break;
            steps *= 2;
            fine = rk4(sys, x, u, T, steps);
        }
    }
    return fine;
}

EndpointTable compute_endpoints(const LinearSystem& sys, const GridSpec& grid,
                                const std::vector<PCWControl>& controls, double jump_T,
                                double err_cap) {
    if (controls.empty()) throw ParseError("empty control family");
    if (!(jump_T > 0.0)) throw ParseError("jump time must be positive");
    EndpointTable t;
    t.grid = grid;
    t.controls = controls;
    t.jump_T = jump_T;
    t.sys = sys;
    const std::int64_t nc = static_cast<std::int64_t>(controls.size());
    t.endpoints.resize(grid.node_count * nc);
    t.escaped.assign(grid.node_count * nc, 0);

    parallel_for(grid.node_count, [&](std::int64_t node) {
        const Vector x = grid.node(node);
        for (std::int64_t k = 0; k < nc; ++k) {
            Vector p = integrate_flow(sys, x, controls[k], jump_T, 256, err_cap);
            t.endpoints[node * nc + k] = p;
            if (!t.grid.inside_box(p)) t.escaped[node * nc + k] = 1;
        }
    });
    t.escape_count = 0;
    for (auto e : t.escaped) t.escape_count += e;
    return t;
}

ChainGraph graph_from_endpoints(const EndpointTable& table, double epsilon) {
    const GridSpec& grid = table.grid;
    if (!(epsilon > grid.spacing / 2.0))
        throw EpsilonTooSmall("epsilon must exceed spacing/2 to reach neighbor nodes");
    ChainGraph g;
    g.grid = grid;
    g.controls = table.controls;
    g.epsilon = epsilon;
    g.jump_T = table.jump_T;
    g.sys = table.sys;
    g.escape_count = table.escape_count;
    g.edges.resize(grid.node_count);

    const int d = grid.dim();
    const int nc = static_cast<int>(table.controls.size());
    const int radius = static_cast<int>(std::ceil(epsilon / grid.spacing));

    parallel_for(grid.node_count, [&](std::int64_t node) {
        // best (smallest) jump per target over the control family
        std::vector<std::pair<std::int64_t, Edge>> found;
        for (int k = 0; k < nc; ++k) {
            if (table.escaped[node * nc + k]) continue;
            const Vector& p = table.endpoints[node * nc + k];
            // window of lattice nodes within the epsilon ball
            std::vector<int> lo(d), hi(d), idx(d);
            bool empty = false;
            for (int i = 0; i < d; ++i) {
                const double c = (p[i] - grid.box_lo[i]) / grid.spacing;
                lo[i] = std::max(0, static_cast<int>(std::ceil(c - radius)));
                hi[i] = std::min(grid.counts[i] - 1, static_cast<int>(std::floor(c + radius)));
                if (lo[i] > hi[i]) { empty = true; break; }
                idx[i] = lo[i];
            }
            if (empty) continue;
            while (true) {
                const std::int64_t target = grid.rank_of(idx);
                double d2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double diff = p[i] - (grid.box_lo[i] + grid.spacing * idx[i]);
                    d2 += diff * diff;
                }
                const double dist = std::sqrt(d2);
                if (dist < epsilon) {
                    bool known = false;
                    for (auto& [tgt, e] : found) {
                        if (tgt == target) {
                            known = true;
                            if (dist < e.dist) e = Edge{target, k, dist};
                            break;
                        }
                    }
                    if (!known) found.emplace_back(target, Edge{target, k, dist});
                }
                int i = d - 1;
                for (; i >= 0; --i) {
                    if (++idx[i] <= hi[i]) break;
                    idx[i] = lo[i];
                }
                if (i < 0) break;
            }
        }
        auto& out = g.edges[node];
        out.reserve(found.size());
        for (auto& [tgt, e] : found) out.push_back(e);
        std::sort(out.begin(), out.end(),
                  [](const Edge& a, const Edge& b) { return a.target < b.target; });
    });
    return g;
}

ChainGraph build_chain_graph(const LinearSystem& sys, const GridSpec& grid,
                             const std::vector<PCWControl>& controls, double epsilon,
                             double jump_T) {
    return graph_from_endpoints(compute_endpoints(sys, grid, controls, jump_T, epsilon / 10.0),
                                epsilon);
}

std::int64_t ChainGraph::edge_count() const {
    std::int64_t n = 0;
    for (const auto& e : edges) n += static_cast<std::int64_t>(e.size());
    return n;
}

namespace {

std::vector<std::int64_t> bfs(const std::vector<std::vector<Edge>>& adj, std::int64_t x0) {
    std::vector<std::uint8_t> seen(adj.size(), 0);
    std::deque<std::int64_t> queue{x0};
    std::vector<std::int64_t> out;
    // nodes reachable by at least one edge; x0 itself only via a cycle
    while (!queue.empty()) {
        const std::int64_t v = queue.front();
        queue.pop_front();
        for (const Edge& e : adj[v]) {
            if (!seen[e.target]) {
                seen[e.target] = 1;
                out.push_back(e.target);
                queue.push_back(e.target);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<Edge>> transpose_adj(const std::vector<std::vector<Edge>>& adj) {
    std::vector<std::vector<Edge>> t(adj.size());
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(adj.size()); ++v)
        for (const Edge& e : adj[v]) t[e.target].push_back(Edge{v, e.control, e.dist});
    for (auto& row : t)
        std::sort(row.begin(), row.end(),
                  [](const Edge& a, const Edge& b) { return a.target < b.target; });
    return t;
}

}  // namespace

std::vector<std::int64_t> chain_reachable_from(const ChainGraph& g, std::int64_t x0) {
    if (x0 < 0 || x0 >= g.grid.node_count) throw ParseError("node outside the grid");
    return bfs(g.edges, x0);
}

std::vector<std::int64_t> backward_reachable(const ChainGraph& g, std::int64_t x0) {
    if (x0 < 0 || x0 >= g.grid.node_count) throw ParseError("node outside the grid");
    return bfs(transpose_adj(g.edges), x0);
}

std::vector<std::int64_t> chain_component_of(const ChainGraph& g, std::int64_t x0) {
    const auto fwd = chain_reachable_from(g, x0);
    const auto bwd = backward_reachable(g, x0);
    std::vector<std::int64_t> out;
    std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(), std::back_inserter(out));
    return out;
}

ChainGraph reverse_graph(const ChainGraph& g) {
    return build_chain_graph(g.sys.time_reversed(), g.grid, g.controls, g.epsilon, g.jump_T);
}

ChainGraph transpose_graph(const ChainGraph& g) {
    ChainGraph t = g;
    t.edges = transpose_adj(g.edges);
    return t;
}

bool graphs_equal(const ChainGraph& a, const ChainGraph& b) {
    if (a.grid.node_count != b.grid.node_count) return false;
    for (std::int64_t v = 0; v < a.grid.node_count; ++v) {
        const auto& ea = a.edges[v];
        const auto& eb = b.edges[v];
        if (ea.size() != eb.size()) return false;
        for (size_t i = 0; i < ea.size(); ++i)
            if (ea[i].target != eb[i].target) return false;
    }
    return true;
}

ChainWitness extract_witness(const ChainGraph& g, std::int64_t x0, std::int64_t y0) {
    if (x0 < 0 || x0 >= g.grid.node_count || y0 < 0 || y0 >= g.grid.node_count)
        throw ParseError("witness endpoints outside the grid");
    // shortest edge path by BFS with parent tracking
    std::vector<std::int64_t> parent(g.grid.node_count, -2);
    std::vector<int> via(g.grid.node_count, -1);
    std::deque<std::int64_t> queue{x0};
    bool hit = false;
    while (!queue.empty() && !hit) {
        const std::int64_t v = queue.front();
        queue.pop_front();
        for (const Edge& e : g.edges[v]) {
            if (parent[e.target] != -2) continue;
            parent[e.target] = v;
            via[e.target] = e.control;
            if (e.target == y0) { hit = true; break; }
            queue.push_back(e.target);
        }
    }
    if (!hit) throw Unreachable("no chain from source to target at this (epsilon, T)");

    std::vector<std::int64_t> path{y0};
    while (path.back() != x0 || path.size() == 1) {
        const std::int64_t p = parent[path.back()];
        path.push_back(p);
        if (p == x0) break;
    }
    std::reverse(path.begin(), path.end());

    ChainWitness w;
    for (std::int64_t node : path) w.points.push_back(g.grid.node(node));
    for (size_t i = 1; i < path.size(); ++i) {
        w.controls.push_back(g.controls[via[path[i]]]);
        w.times.push_back(g.jump_T);
    }
    return w;
}

bool validate_witness(const LinearSystem& sys, const ChainWitness& w, double epsilon, double T) {
    if (w.points.size() != w.controls.size() + 1 || w.controls.size() != w.times.size())
        return false;
    if (w.controls.empty()) return false;
    for (size_t j = 0; j < w.controls.size(); ++j) {
        if (w.times[j] < T - 1e-12) return false;
        const Vector end = integrate_flow(sys, w.points[j], w.controls[j], w.times[j], 512);
        if (!((end - w.points[j + 1]).norm() < epsilon)) return false;
    }
    return true;
}

ChainWitness concatenate(const ChainWitness& w1, const ChainWitness& w2) {
    if (w1.points.empty() || w2.points.empty()) throw ParseError("empty witness");
    if ((w1.points.back() - w2.points.front()).norm() > 1e-12)
        throw ParseError("witness endpoints do not match");
    ChainWitness w = w1;
    w.points.insert(w.points.end(), w2.points.begin() + 1, w2.points.end());
    w.controls.insert(w.controls.end(), w2.controls.begin(), w2.controls.end());
    w.times.insert(w.times.end(), w2.times.begin(), w2.times.end());
    return w;
}

std::vector<std::int64_t> scc_cycle_nodes(const ChainGraph& g) {
    // iterative Tarjan
    const std::int64_t n = g.grid.node_count;
    std::vector<std::int64_t> index(n, -1), low(n, 0), stack;
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::int64_t> out;
    std::int64_t counter = 0;

    struct Frame {
        std::int64_t v;
        size_t edge;
    };
    for (std::int64_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < g.edges[f.v].size()) {
                const std::int64_t w = g.edges[f.v][f.edge++].target;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<std::int64_t> comp;
                    while (true) {
                        const std::int64_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    bool cyclic = comp.size() > 1;
                    if (!cyclic) {
                        for (const Edge& e : g.edges[comp[0]])
                            if (e.target == comp[0]) { cyclic = true; break; }
                    }
                    if (cyclic) out.insert(out.end(), comp.begin(), comp.end());
                }
                const std::int64_t v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> autonomous_chain_recurrent_set(const Matrix& A, const GridSpec& grid,
                                                         double epsilon, double T) {
    const int n = static_cast<int>(A.rows());
    Vector lo = Vector::Constant(1, -1.0), hi = Vector::Constant(1, 1.0);
    LinearSystem sys =
        LinearSystem::make(A, Matrix::Zero(n, 1), ControlRange::box(lo, hi));
    const std::vector<PCWControl> zero{PCWControl::constant(Vector::Zero(1))};
    const ChainGraph g = build_chain_graph(sys, grid, zero, epsilon, T);
    return scc_cycle_nodes(g);
}

CollarReport collar_compare(const ChainGraph& g, const std::vector<std::int64_t>& nodes,
                            const AffineSetSum& E) {
    if (g.grid.dim() != 2) throw DimensionMismatch("collar_compare is 2-D only");
    CollarReport rep;
    rep.collar_width = g.epsilon + 2.0 * g.grid.spacing;
    rep.boundary_band =
        g.epsilon * (1.0 + matrix_exp(g.sys.A, g.jump_T).operatorNorm());

    const Matrix poly = E.clip_to_box_2d(g.grid.box_lo, g.grid.box_hi);
    std::vector<std::uint8_t> in_set(g.grid.node_count, 0);
    for (std::int64_t v : nodes) in_set[v] = 1;

    auto box_boundary_dist = [&](const Vector& x) {
        double d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 2; ++i) {
            d = std::min(d, std::abs(x[i] - g.grid.box_lo[i]));
            d = std::min(d, std::abs(x[i] - g.grid.box_hi[i]));
        }
        return d;
    };

    for (std::int64_t v = 0; v < g.grid.node_count; ++v) {
        const Vector x = g.grid.node(v);
        const bool formula = membership(E, x, 1e-9) && g.grid.inside_box(x);
        const bool oracle = in_set[v] != 0;
        if (formula == oracle) continue;
        if (oracle) ++rep.only_oracle;
        else ++rep.only_formula;
        const double d_edge = distance_to_polygon_boundary(poly, x);
        const double d_box = box_boundary_dist(x);
        if (d_edge > rep.collar_width && d_box > rep.boundary_band) {
            ++rep.violations;
            rep.max_violation = std::max(rep.max_violation, d_edge - rep.collar_width);
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

CollarReport collar_compare_subspace(const ChainGraph& g, const std::vector<std::int64_t>& nodes,
                                     const Matrix& subspace_basis, double mu) {
    CollarReport rep;
    const double contraction = std::exp(-mu * g.jump_T);
    rep.collar_width = g.epsilon / (1.0 - contraction) + 2.0 * g.grid.spacing;
    rep.boundary_band =
        g.epsilon * (1.0 + matrix_exp(g.sys.A, g.jump_T).operatorNorm());

    const int n = g.grid.dim();
    const Matrix P = subspace_basis.cols() > 0
                         ? Matrix(subspace_basis * subspace_basis.transpose())
                         : Matrix(Matrix::Zero(n, n));

    std::vector<std::uint8_t> in_set(g.grid.node_count, 0);
    for (std::int64_t v : nodes) in_set[v] = 1;

    for (std::int64_t v = 0; v < g.grid.node_count; ++v) {
        const Vector x = g.grid.node(v);
        const double d_sub = (x - P * x).norm();
        const bool formula = d_sub <= 1e-9;
        const bool oracle = in_set[v] != 0;
        if (formula == oracle) continue;
        if (oracle) ++rep.only_oracle;
        else ++rep.only_formula;
        if (d_sub > rep.collar_width) {
            ++rep.violations;
            rep.max_violation = std::max(rep.max_violation, d_sub - rep.collar_width);
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

}  // namespace chainset
