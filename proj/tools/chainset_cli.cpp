#include <CLI11.hpp>

#include <iostream>

#include "chainset/chainlab.hpp"
#include "chainset/json_io.hpp"
#include "chainset/plot.hpp"
#include "chainset/poincare.hpp"
#include "chainset/reachsets.hpp"

namespace cs = chainset;

namespace {

void emit(const cs::Json& bundle, const std::string& out_path) {
    const std::string text = cs::canonical_dump(bundle);
    if (!out_path.empty()) cs::save_text_file(out_path, text);
    std::cout << text << "\n";
}

cs::Json base_bundle(const char* command, const cs::SystemSpec& spec) {
    cs::Json j;
    j["command"] = command;
    j["input_hash"] = spec.input_hash;
    j["tool_version"] = cs::kToolVersion;
    return j;
}

// "[-1, 1] x [-2, 0.5] (+) span{(1, 0)}" style description from the
// per-axis supports of the ambient compact factor; prefixed with
// "extent" when the factor is not an axis box
std::string describe_set(const cs::AffineSetSum& s) {
    const int n = s.ambient_dim();
    std::ostringstream os;
    os.precision(6);
    cs::Vector lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        cs::Vector e = cs::Vector::Zero(n);
        e[i] = 1.0;
        hi[i] = s.compact.support(s.w_basis.transpose() * e);
        lo[i] = -s.compact.support(s.w_basis.transpose() * (-e));
    }
    // box test: supports of the extent box match the stored samples
    bool boxy = true;
    const cs::Matrix& D = s.compact.directions();
    for (int j = 0; j < D.cols() && boxy; ++j) {
        const cs::Vector d = s.w_basis * D.col(j);
        double hbox = 0.0;
        for (int i = 0; i < n; ++i) hbox += d[i] > 0.0 ? hi[i] * d[i] : lo[i] * d[i];
        boxy = std::abs(hbox - s.compact.support_values()[j]) <= 1e-9 * (1.0 + std::abs(hbox));
    }
    if (!boxy) os << "extent ";
    for (int i = 0; i < n; ++i) {
        if (i) os << " x ";
        if (hi[i] - lo[i] <= 1e-9) os << "{" << 0.5 * (lo[i] + hi[i]) << "}";
        else os << "[" << lo[i] << ", " << hi[i] << "]";
    }
    for (int j = 0; j < s.subspace_basis.cols(); ++j) {
        os << (j == 0 ? " (+) span{(" : ", (");
        for (int i = 0; i < n; ++i) os << (i ? ", " : "") << s.subspace_basis(i, j);
        os << ")";
    }
    if (s.subspace_basis.cols() > 0) os << "}";
    return os.str();
}

cs::ReachOptions reach_options(const cs::SystemSpec& spec, double horizon_flag, double tol_flag) {
    cs::ReachOptions opt;
    if (spec.options.horizon) opt.horizon_T = *spec.options.horizon;
    if (spec.options.quad_tol) opt.quad_tol = *spec.options.quad_tol;
    if (horizon_flag > 0) opt.horizon_T = horizon_flag;
    if (tol_flag > 0) opt.quad_tol = tol_flag;
    return opt;
}

int run_decompose(const std::string& spec_path, const std::string& out_path) {
    const cs::SystemSpec spec = cs::parse_system_spec_file(spec_path);
    const cs::SpectralSplit split = cs::lyapunov_split(spec.sys.A);
    const cs::Matrix ctrb = cs::controllability_subspace(spec.sys.A, spec.sys.B);

    cs::Json bundle = base_bundle("decompose", spec);
    bundle["spectral"] = cs::split_summary(split, ctrb);

    std::cout << "dim L+ = " << split.dim_plus() << ", dim L0 = " << split.dim_zero()
              << ", dim L- = " << split.dim_minus() << ", dim C = " << ctrb.cols()
              << ", hyperbolic: " << (cs::is_hyperbolic(split) ? "yes" : "no") << "\n";
    emit(bundle, out_path);
    return 0;
}

int run_chain_set(const std::string& spec_path, double horizon, double tol,
                  const std::string& out_path) {
    const cs::SystemSpec spec = cs::parse_system_spec_file(spec_path);
    const cs::ReachOptions opt = reach_options(spec, horizon, tol);
    const cs::ControlSetResult csr = cs::control_set(spec.sys, opt);
    const cs::AffineSetSum E = cs::chain_control_set(spec.sys, csr);

    cs::Json bundle = base_bundle("chain-set", spec);
    bundle["spectral"] = cs::split_summary(csr.split, csr.ctrb_basis);
    bundle["sets"]["D0"] = cs::affine_to_json(csr.D0_closure);
    bundle["sets"]["E"] = cs::affine_to_json(E);
    bundle["sets"]["D_minus"] = cs::body_to_json(csr.D_minus);
    bundle["sets"]["D_plus"] = cs::body_to_json(csr.D_plus);
    bundle["sets"]["center_cap_C_dim"] = static_cast<int>(csr.center_cap_C_basis.cols());
    bundle["metadata"]["degenerate_hyperbolic_factor"] = csr.degenerate_hyperbolic_factor;
    bundle["metadata"]["quad_tol"] = opt.quad_tol;

    std::cout << "closure(D0) = " << describe_set(csr.D0_closure) << "\n";
    std::cout << "E = closure(D0) + L0 = " << describe_set(E) << "\n";
    emit(bundle, out_path);
    return 0;
}

int run_oracle(const std::string& spec_path, std::vector<double> box_lo,
               std::vector<double> box_hi, double spacing, double epsilon, double T,
               std::vector<double> from, std::vector<double> to, bool two_piece,
               const std::string& out_path) {
    const cs::SystemSpec spec = cs::parse_system_spec_file(spec_path);
    const int n = spec.sys.state_dim();

    cs::Vector lo = cs::Vector::Constant(n, -2.0), hi = cs::Vector::Constant(n, 2.0);
    if (spec.options.box_lo) lo = *spec.options.box_lo;
    if (spec.options.box_hi) hi = *spec.options.box_hi;
    if (!box_lo.empty()) lo = Eigen::Map<cs::Vector>(box_lo.data(), box_lo.size());
    if (!box_hi.empty()) hi = Eigen::Map<cs::Vector>(box_hi.data(), box_hi.size());
    if (spec.options.spacing && spacing <= 0) spacing = *spec.options.spacing;
    if (spec.options.epsilon && epsilon <= 0) epsilon = *spec.options.epsilon;
    if (spec.options.T && T <= 0) T = *spec.options.T;
    if (spacing <= 0) spacing = 0.05;
    if (epsilon <= 0) epsilon = 0.1;
    if (T <= 0) T = 1.0;

    const cs::GridSpec grid = cs::GridSpec::make(lo, hi, spacing);
    const auto controls = cs::default_control_family(spec.sys.U, two_piece, T);
    const cs::ChainGraph g = cs::build_chain_graph(spec.sys, grid, controls, epsilon, T);

    const std::int64_t origin = grid.nearest_node(cs::Vector::Zero(n));
    if (origin < 0) throw cs::ParseError("origin is outside the oracle box");
    const auto component = cs::chain_component_of(g, origin);

    cs::Json bundle = base_bundle("oracle", spec);
    bundle["spectral"] = cs::split_summary(cs::lyapunov_split(spec.sys.A),
                                           cs::controllability_subspace(spec.sys.A, spec.sys.B));
    bundle["graph"] = cs::graph_to_json(g);
    bundle["component"] = cs::Json::array();
    for (auto v : component) bundle["component"].push_back(v);
    bundle["metadata"]["controls"] = static_cast<int>(controls.size());
    bundle["metadata"]["origin_node"] = origin;

    // formula-vs-oracle collar statistics (2-D systems)
    if (n == 2) {
        const cs::AffineSetSum E = cs::chain_control_set(spec.sys);
        const cs::CollarReport rep = cs::collar_compare(g, component, E);
        bundle["metadata"]["collar_width"] = rep.collar_width;
        bundle["metadata"]["boundary_band"] = rep.boundary_band;
        bundle["metadata"]["collar_pass"] = rep.pass;
        bundle["metadata"]["only_oracle"] = rep.only_oracle;
        bundle["metadata"]["only_formula"] = rep.only_formula;
        bundle["metadata"]["collar_violations"] = rep.violations;
        std::cout << "collar width " << rep.collar_width << ", boundary band " << rep.boundary_band
                  << ", symdiff " << rep.only_oracle + rep.only_formula << " nodes, violations "
                  << rep.violations << (rep.pass ? " (pass)" : " (FAIL)") << "\n";
    }
    std::cout << "graph: " << grid.node_count << " nodes, " << g.edge_count() << " edges, "
              << g.escape_count << " escapes; component of origin: " << component.size()
              << " nodes\n";

    if (!from.empty() || !to.empty()) {
        if (from.size() != static_cast<size_t>(n) || to.size() != static_cast<size_t>(n))
            throw cs::ParseError("--from/--to need " + std::to_string(n) + " coordinates");
        const std::int64_t a = grid.nearest_node(Eigen::Map<cs::Vector>(from.data(), n));
        const std::int64_t b = grid.nearest_node(Eigen::Map<cs::Vector>(to.data(), n));
        if (a < 0 || b < 0) throw cs::ParseError("--from/--to outside the oracle box");
        const cs::ChainWitness w = cs::extract_witness(g, a, b);
        const bool ok = cs::validate_witness(spec.sys, w, epsilon, T);
        bundle["witness"] = cs::witness_to_json(w);
        bundle["witness"]["validated"] = ok;
        std::cout << "witness: " << w.controls.size() << " links, validated: "
                  << (ok ? "yes" : "no") << "\n";
    }
    emit(bundle, out_path);
    return 0;
}

int run_poincare(const std::string& spec_path, int samples, double r_plot,
                 const std::string& out_path) {
    const cs::SystemSpec spec = cs::parse_system_spec_file(spec_path);
    if (spec.options.samples && samples <= 0) samples = *spec.options.samples;
    if (spec.options.r_plot) r_plot = *spec.options.r_plot;
    if (samples <= 0) samples = 32;

    const cs::ProjectiveCloud cloud = cs::projective_chain_control_set(spec.sys, samples, r_plot);

    cs::Json bundle = base_bundle("poincare", spec);
    bundle["spectral"] = cs::split_summary(cs::lyapunov_split(spec.sys.A),
                                           cs::controllability_subspace(spec.sys.A, spec.sys.B));
    bundle["cloud"]["points"] = cs::Json::array();
    for (const auto& p : cloud.points) bundle["cloud"]["points"].push_back(cs::vector_to_json(p.rep));
    bundle["cloud"]["fiber_dimension"] = cloud.fiber_dimension;
    bundle["sets"]["E"] = cs::affine_to_json(cloud.E);
    bundle["metadata"]["samples"] = samples;
    bundle["metadata"]["r_plot"] = r_plot;

    std::cout << "central fiber dimension: " << cloud.fiber_dimension << " (1 + dim L0)\n";
    std::cout << "cloud: " << cloud.points.size() << " projective points, all preimages in E\n";
    emit(bundle, out_path);
    return 0;
}

int run_plot(const std::string& bundle_path, const std::string& out_path, bool csv,
             std::vector<int> project) {
    const cs::Json bundle = cs::load_json_file(bundle_path);
    std::optional<std::pair<int, int>> proj;
    if (project.size() == 2) proj = std::make_pair(project[0], project[1]);
    else if (!project.empty()) throw cs::ParseError("--project needs exactly two coordinates");
    const std::string text = csv ? cs::render_csv(bundle, proj) : cs::render_svg(bundle, proj);
    cs::save_text_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"control sets, chain control sets, and Poincare-sphere projections for linear systems"};
    app.require_subcommand(1);

    std::string spec_path, out_path, bundle_path, plot_out;
    double horizon = -1, tol = -1, spacing = -1, epsilon = -1, T = -1;
    double r_plot = 2.0;
    int samples = -1;
    bool csv = false, two_piece = false;
    std::vector<double> box_lo, box_hi, from, to;
    std::vector<int> project;

    auto* dec = app.add_subcommand("decompose", "Lyapunov splitting, controllability, hyperbolicity");
    dec->add_option("spec", spec_path, "system spec JSON")->required();
    dec->add_option("--out", out_path, "write the result bundle here");

    auto* cset = app.add_subcommand("chain-set", "control set D0 and chain control set E");
    cset->add_option("spec", spec_path)->required();
    cset->add_option("--horizon", horizon, "reach-set truncation horizon");
    cset->add_option("--tol", tol, "quadrature tolerance");
    cset->add_option("--out", out_path);

    auto* orc = app.add_subcommand("oracle", "brute-force (eps,T)-chain graph");
    orc->add_option("spec", spec_path)->required();
    orc->add_option("--box-lo", box_lo, "box lower corner")->delimiter(',');
    orc->add_option("--box-hi", box_hi, "box upper corner")->delimiter(',');
    orc->add_option("--spacing", spacing, "grid spacing (default 0.05)");
    orc->add_option("--epsilon", epsilon, "jump tolerance");
    orc->add_option("--T", T, "jump time");
    orc->add_option("--from", from, "witness source point")->delimiter(',');
    orc->add_option("--to", to, "witness target point")->delimiter(',');
    orc->add_flag("--two-piece", two_piece, "richer two-piece control family");
    orc->add_option("--out", out_path);

    auto* poi = app.add_subcommand("poincare", "projective chain control set point cloud");
    poi->add_option("spec", spec_path)->required();
    poi->add_option("--samples", samples, "number of sampled controls");
    poi->add_option("--rplot", r_plot, "center-space plot radius");
    poi->add_option("--out", out_path);

    auto* plt = app.add_subcommand("plot", "render a saved bundle as SVG (or CSV)");
    plt->add_option("bundle", bundle_path, "result bundle JSON")->required();
    plt->add_option("out", plot_out, "output file")->required();
    plt->add_flag("--csv", csv, "emit CSV instead of SVG");
    plt->add_option("--project", project, "coordinate pair for n > 2 sets")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dec->parsed()) return run_decompose(spec_path, out_path);
        if (cset->parsed()) return run_chain_set(spec_path, horizon, tol, out_path);
        if (orc->parsed())
            return run_oracle(spec_path, box_lo, box_hi, spacing, epsilon, T, from, to, two_piece,
                              out_path);
        if (poi->parsed()) return run_poincare(spec_path, samples, r_plot, out_path);
        if (plt->parsed()) return run_plot(bundle_path, plot_out, csv, project);
    } catch (const cs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case cs::ErrorKind::Parse: return 2;
            case cs::ErrorKind::Numerical: return 3;
            case cs::ErrorKind::Empty: return 4;
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
