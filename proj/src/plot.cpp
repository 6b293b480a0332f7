#include "chainset/plot.hpp"

#include <cmath>
#include <sstream>

namespace chainset {

namespace {

// All style constants in one place; plots must stay byte-deterministic.
struct Style {
    static constexpr int width = 640;
    static constexpr int height = 640;
    static constexpr int margin = 40;
    static constexpr const char* background = "#ffffff";
    static constexpr const char* axis_color = "#888888";
    static constexpr const char* set_fill = "#4c72b0";
    static constexpr const char* set_stroke = "#2a4d7f";
    static constexpr const char* aux_fill = "#dd8452";
    static constexpr const char* point_color = "#2a4d7f";
    static constexpr double set_opacity = 0.35;
    static constexpr double point_radius = 2.0;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Window {
    double lo_x = -3, hi_x = 3, lo_y = -3, hi_y = 3;
    double px(double x) const {
        return Style::margin + (x - lo_x) / (hi_x - lo_x) * (Style::width - 2 * Style::margin);
    }
    double py(double y) const {
        return Style::height - Style::margin -
               (y - lo_y) / (hi_y - lo_y) * (Style::height - 2 * Style::margin);
    }
};

struct Geometry {
    std::vector<Matrix> polygons;          // filled set outlines
    std::vector<Matrix> aux_polygons;      // secondary sets
    std::vector<Vector> points;            // scatter
    Window window;
};

std::pair<int, int> axes_for(int dim, std::optional<std::pair<int, int>> project,
                             const char* what) {
    if (dim <= 2) return {0, dim == 1 ? 0 : 1};
    if (!project) throw NotPlottable(std::string(what) + " has dimension > 2; pass a projection pair");
    if (project->first < 0 || project->first >= dim || project->second < 0 ||
        project->second >= dim)
        throw NotPlottable("projection coordinates out of range");
    return *project;
}

Vector pick2(const Vector& x, std::pair<int, int> ax) {
    Vector v(2);
    v[0] = x[ax.first];
    v[1] = x.size() == 1 ? 0.0 : x[ax.second];
    return v;
}

Geometry collect(const Json& bundle, std::optional<std::pair<int, int>> project) {
    Geometry geo;
    const std::string cmd = bundle.value("command", std::string());

    if (bundle.contains("sets")) {
        const Json& sets = bundle.at("sets");
        const AffineSetSum E = affine_from_json(sets.at("E"));
        const int n = E.ambient_dim();
        Vector lo = Vector::Constant(2, -3.0), hi = Vector::Constant(2, 3.0);
        if (n == 2) {
            geo.polygons.push_back(E.clip_to_box_2d(lo, hi));
            if (sets.contains("D0")) {
                const AffineSetSum D0 = affine_from_json(sets.at("D0"));
                geo.aux_polygons.push_back(D0.clip_to_box_2d(lo, hi));
            }
        } else if (n == 1) {
            Matrix seg(2, 2);
            double a = -3.0, b = 3.0;
            if (E.subspace_basis.cols() == 0) {
                Vector d = Vector::Constant(1, 1.0);
                b = E.compact.support(E.w_basis.transpose() * d);
                a = -E.compact.support(E.w_basis.transpose() * (-d));
            }
            seg << a, b, 0.0, 0.0;
            geo.polygons.push_back(seg);
        } else {
            const auto ax = axes_for(n, project, "set bundle");
            // project the compact part's ambient support onto the plane
            const AffineSetSum& S = E;
            auto h = [&](const Vector& d2) {
                Vector d = Vector::Zero(n);
                d[ax.first] = d2[0];
                d[ax.second] = d2[1];
                const Vector wd = S.w_basis.transpose() * d;
                const double hs = (S.subspace_basis.transpose() * d).norm() > 1e-12
                                      ? std::numeric_limits<double>::infinity()
                                      : 0.0;
                return S.compact.support(wd) + hs;
            };
            ConvexBody proj = ConvexBody::from_support(2, [&](const Vector& d) {
                const double v = h(d);
                return std::isfinite(v) ? v : 1e6;  // unbounded directions clipped far out
            });
            geo.polygons.push_back(proj.vertices());
        }
        return geo;
    }

    if (bundle.contains("component")) {
        const Json& g = bundle.at("graph");
        const Vector lo = vector_from_json(g.at("box_lo"), "box_lo");
        const Vector hi = vector_from_json(g.at("box_hi"), "box_hi");
        GridSpec grid = GridSpec::make(lo, hi, g.at("spacing").get<double>());
        const auto ax = axes_for(grid.dim(), project, "oracle bundle");
        if (grid.dim() == 1)
            geo.window = Window{lo[0], hi[0], -1.0, 1.0};
        else
            geo.window = Window{lo[ax.first], hi[ax.first], lo[ax.second], hi[ax.second]};
        for (const auto& idx : bundle.at("component"))
            geo.points.push_back(pick2(grid.node(idx.get<std::int64_t>()), ax));
        return geo;
    }

    if (bundle.contains("cloud")) {
        for (const auto& p : bundle.at("cloud").at("points")) {
            const Vector v = vector_from_json(p, "cloud point");
            Vector xy(2);
            xy[0] = v[0];
            xy[1] = v.size() > 2 ? v[1] : 0.0;
            geo.points.push_back(xy);
        }
        geo.window = Window{-1.1, 1.1, -1.1, 1.1};
        return geo;
    }

    throw NotPlottable("bundle has no 2-D set, graph component, or point cloud (command \"" +
                       cmd + "\")");
}

}  // namespace

std::string render_svg(const Json& bundle, std::optional<std::pair<int, int>> project) {
    const Geometry geo = collect(bundle, project);
    const Window& w = geo.window;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Style::width << "\" height=\""
        << Style::height << "\" viewBox=\"0 0 " << Style::width << " " << Style::height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"" << Style::background << "\"/>\n";
    // axes through the origin when visible
    if (w.lo_x < 0 && w.hi_x > 0)
        svg << "<line x1=\"" << fmt(w.px(0)) << "\" y1=\"" << fmt(w.py(w.lo_y)) << "\" x2=\""
            << fmt(w.px(0)) << "\" y2=\"" << fmt(w.py(w.hi_y)) << "\" stroke=\""
            << Style::axis_color << "\" stroke-width=\"1\"/>\n";
    if (w.lo_y < 0 && w.hi_y > 0)
        svg << "<line x1=\"" << fmt(w.px(w.lo_x)) << "\" y1=\"" << fmt(w.py(0)) << "\" x2=\""
            << fmt(w.px(w.hi_x)) << "\" y2=\"" << fmt(w.py(0)) << "\" stroke=\""
            << Style::axis_color << "\" stroke-width=\"1\"/>\n";

    auto emit_poly = [&](const Matrix& poly, const char* fill) {
        if (poly.cols() == 0) return;
        if (poly.cols() <= 2) {
            svg << "<polyline fill=\"none\" stroke=\"" << Style::set_stroke
                << "\" stroke-width=\"3\" points=\"";
            for (int i = 0; i < poly.cols(); ++i)
                svg << fmt(w.px(poly(0, i))) << "," << fmt(w.py(poly(1, i))) << " ";
            svg << "\"/>\n";
            return;
        }
        svg << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << Style::set_opacity
            << "\" stroke=\"" << Style::set_stroke << "\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i < poly.cols(); ++i)
            svg << fmt(w.px(poly(0, i))) << "," << fmt(w.py(poly(1, i))) << " ";
        svg << "\"/>\n";
    };
    for (const auto& p : geo.polygons) emit_poly(p, Style::set_fill);
    for (const auto& p : geo.aux_polygons) emit_poly(p, Style::aux_fill);
    for (const auto& pt : geo.points)
        svg << "<circle cx=\"" << fmt(w.px(pt[0])) << "\" cy=\"" << fmt(w.py(pt[1])) << "\" r=\""
            << Style::point_radius << "\" fill=\"" << Style::point_color << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string render_csv(const Json& bundle, std::optional<std::pair<int, int>> project) {
    const Geometry geo = collect(bundle, project);
    std::ostringstream csv;
    csv << "kind,x,y\n";
    int k = 0;
    for (const auto& poly : geo.polygons) {
        for (int i = 0; i < poly.cols(); ++i)
            csv << "set" << k << "," << poly(0, i) << "," << poly(1, i) << "\n";
        ++k;
    }
    for (const auto& poly : geo.aux_polygons) {
        for (int i = 0; i < poly.cols(); ++i)
            csv << "aux" << k << "," << poly(0, i) << "," << poly(1, i) << "\n";
        ++k;
    }
    for (const auto& pt : geo.points) csv << "point," << pt[0] << "," << pt[1] << "\n";
    return csv.str();
}

}  // namespace chainset
