#include <doctest.h>

#include <random>

#include "chainset/convex.hpp"

using namespace chainset;

namespace {

Matrix pts2(std::initializer_list<std::pair<double, double>> ps) {
    Matrix m(2, ps.size());
    int i = 0;
    for (auto& [x, y] : ps) {
        m(0, i) = x;
        m(1, i) = y;
        ++i;
    }
    return m;
}

const ConvexBody kUnitBox2 = ConvexBody::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));

}  // namespace

TEST_CASE("default direction sets") {
    const Matrix d1 = default_directions(1);
    CHECK(d1.cols() == 2);
    const Matrix d2 = default_directions(2);
    CHECK(d2.cols() == 128);
    CHECK((d2.col(0) - Vector{{1.0, 0.0}}).norm() < 1e-15);
    for (int j = 0; j < d2.cols(); ++j) CHECK(d2.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Matrix d3 = default_directions(3);
    CHECK(d3.cols() == 192);
    for (int j = 0; j < d3.cols(); j += 2)
        CHECK((d3.col(j) + d3.col(j + 1)).norm() < 1e-14);  // antipodal closure
}

TEST_CASE("minkowski sum of the two axis segments is the unit box") {
    const ConvexBody sx = ConvexBody::from_points(pts2({{-1, 0}, {1, 0}}));
    const ConvexBody sy = ConvexBody::from_points(pts2({{0, -1}, {0, 1}}));
    const ConvexBody sum = minkowski_sum(sx, sy);
    CHECK(hausdorff_distance(sum, kUnitBox2) < 1e-12);
}

TEST_CASE("minkowski sum with the origin is the identity") {
    const ConvexBody z = ConvexBody::origin(2);
    const ConvexBody s = minkowski_sum(kUnitBox2, z);
    CHECK(hausdorff_distance(s, kUnitBox2) < 1e-12);
    CHECK(support_distance(s, kUnitBox2) == 0.0);
}

TEST_CASE("summing a segment with itself doubles its supports") {
    const ConvexBody seg = ConvexBody::from_points(pts2({{-1, 0}, {1, 0}}));
    const ConvexBody sum = minkowski_sum(seg, seg);
    CHECK(sum.support(Vector{{1.0, 0.0}}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sum.support(Vector{{0.0, 1.0}}) == doctest::Approx(0.0).epsilon(1e-12));
    const ConvexBody expected = ConvexBody::from_points(pts2({{-2, 0}, {2, 0}}));
    CHECK(hausdorff_distance(sum, expected) < 1e-12);
}

TEST_CASE("minkowski sum commutes and associates") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix a(2, 5), b(2, 4), c(2, 3);
        for (auto* m : {&a, &b, &c})
            for (int i = 0; i < m->size(); ++i) (*m)(i / m->cols(), i % m->cols()) = dist(rng);
        const ConvexBody P = ConvexBody::from_points(a);
        const ConvexBody Q = ConvexBody::from_points(b);
        const ConvexBody R = ConvexBody::from_points(c);
        CHECK(support_distance(minkowski_sum(P, Q), minkowski_sum(Q, P)) == 0.0);
        CHECK(hausdorff_distance(minkowski_sum(minkowski_sum(P, Q), R),
                                 minkowski_sum(P, minkowski_sum(Q, R))) < 1e-9);
    }
}

TEST_CASE("projection of the unit box onto the x-axis") {
    Matrix Pi = Matrix::Zero(2, 2);
    Pi(0, 0) = 1.0;
    const ConvexBody seg = project_body(kUnitBox2, Pi);
    const ConvexBody expected = ConvexBody::from_points(pts2({{-1, 0}, {1, 0}}));
    CHECK(hausdorff_distance(seg, expected) < 1e-12);
}

TEST_CASE("projection of a sampled disc has support error below 1e-6") {
    Matrix dirs(2, 64);
    for (int j = 0; j < 64; ++j) {
        const double th = 2.0 * std::numbers::pi * j / 64;
        dirs(0, j) = std::cos(th);
        dirs(1, j) = std::sin(th);
    }
    const ConvexBody disc =
        ConvexBody::from_support(2, [](const Vector& d) { return d.norm(); }, dirs);
    Matrix Pi = Matrix::Zero(2, 2);
    Pi(0, 0) = 1.0;
    const ConvexBody seg = project_body(disc, Pi);
    CHECK(seg.support(Vector{{1.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(seg.support(Vector{{-1.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(seg.support(Vector{{0.0, 1.0}})) < 1e-6);
}

TEST_CASE("projection with the identity leaves the body unchanged") {
    const ConvexBody p = project_body(kUnitBox2, Matrix::Identity(2, 2));
    CHECK(support_distance(p, kUnitBox2) < 1e-12);
}

TEST_CASE("project_body rejects non-idempotent matrices") {
    Matrix M(2, 2);
    M << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(project_body(kUnitBox2, M), NotIdempotent);
}

TEST_CASE("projection is idempotent on the image") {
    Matrix Pi(2, 2);
    Pi << 1.0, 0.5, 0.0, 0.0;  // oblique projection onto the x-axis
    const ConvexBody once = project_body(kUnitBox2, Pi);
    const ConvexBody twice = project_body(once, Pi);
    CHECK(support_distance(once, twice) < 1e-10);
}

TEST_CASE("hausdorff distance examples") {
    CHECK(hausdorff_distance(kUnitBox2, kUnitBox2) == 0.0);

    const ConvexBody big = ConvexBody::box(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0));
    // support difference is 1 at the axis directions, sqrt(2) at the corner
    for (int axis = 0; axis < 2; ++axis) {
        Vector d = Vector::Zero(2);
        d[axis] = 1.0;
        CHECK(big.support(d) - kUnitBox2.support(d) == doctest::Approx(1.0));
    }
    CHECK(hausdorff_distance(kUnitBox2, big) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const ConvexBody shifted = ConvexBody::from_points(pts2({{-0.7, -1}, {1.3, -1}, {1.3, 1}, {-0.7, 1}}));
    CHECK(hausdorff_distance(kUnitBox2, shifted) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("support subadditivity on sampled direction sums") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Matrix pts(2, 7);
    for (int i = 0; i < pts.size(); ++i) pts(i % 2, i / 2) = dist(rng);
    const ConvexBody P = ConvexBody::from_points(pts);
    const Matrix& D = P.directions();
    for (int trial = 0; trial < 200; ++trial) {
        const int a = static_cast<int>(rng() % D.cols());
        const int b = static_cast<int>(rng() % D.cols());
        const Vector d = D.col(a) + D.col(b);
        if (d.norm() < 1e-9) continue;
        CHECK(P.support(d) <= P.support(D.col(a)) + P.support(D.col(b)) + 1e-9);
    }
}

TEST_CASE("membership in an affine set sum") {
    // compact [-1,1] along e2, subspace span{e1}: the Example-1 chain control set
    Matrix S(2, 1);
    S << 1.0, 0.0;
    AffineSetSum E = AffineSetSum::from_oracle(2, S, [](const Vector& d) { return std::abs(d[1]); });
    CHECK(membership(E, Vector{{17.0, 0.5}}));
    CHECK_FALSE(membership(E, Vector{{0.0, 1.5}}));
    CHECK(membership(E, Vector{{-3000.0, -1.0}}));

    // trivial subspace: membership is just the compact test
    AffineSetSum K = AffineSetSum::from_oracle(
        2, Matrix(2, 0), [](const Vector& d) { return std::abs(d[0]) + std::abs(d[1]); });
    CHECK(membership(K, Vector{{0.5, 0.5}}));
    CHECK_FALSE(membership(K, Vector{{1.2, 0.5}}));
}

TEST_CASE("support evaluation by LP matches the closed form when sampled on the H-rep") {
    Matrix axes(3, 6);
    axes.setZero();
    for (int i = 0; i < 3; ++i) {
        axes(i, 2 * i) = 1.0;
        axes(i, 2 * i + 1) = -1.0;
    }
    const Vector lo = Vector{{-1.0, -0.5, -2.0}};
    const Vector hi = Vector{{2.0, 1.5, 0.5}};
    const ConvexBody box = ConvexBody::from_support(
        3,
        [&](const Vector& d) {
            double h = 0.0;
            for (int i = 0; i < 3; ++i) h += d[i] > 0.0 ? hi[i] * d[i] : lo[i] * d[i];
            return h;
        },
        axes);
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector d(3);
        for (int i = 0; i < 3; ++i) d[i] = dist(rng);
        if (d.norm() < 1e-6) continue;
        double expected = 0.0;
        for (int i = 0; i < 3; ++i) expected += d[i] > 0.0 ? hi[i] * d[i] : lo[i] * d[i];
        CHECK(box.support(d) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("degenerate bodies keep ambient coordinates") {
    const ConvexBody pt = ConvexBody::point(Vector{{0.3, -0.4}});
    REQUIRE(pt.has_vertices());
    CHECK(pt.vertices().cols() == 1);
    CHECK(pt.contains(Vector{{0.3, -0.4}}, 1e-9));

    // segment sampled through its support oracle (width collapses)
    const ConvexBody seg = ConvexBody::from_support(2, [](const Vector& d) { return std::abs(d[0]); });
    REQUIRE(seg.has_vertices());
    REQUIRE(seg.vertices().cols() == 2);
    Vector lo = seg.vertices().col(0), hi = seg.vertices().col(1);
    if (lo[0] > hi[0]) std::swap(lo, hi);
    CHECK((lo - Vector{{-1.0, 0.0}}).norm() < 1e-8);
    CHECK((hi - Vector{{1.0, 0.0}}).norm() < 1e-8);
}

TEST_CASE("vertex lists agree with stored support values") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        Matrix pts(2, 3 + static_cast<int>(rng() % 6));
        for (int i = 0; i < pts.size(); ++i) pts(i % 2, i / 2) = dist(rng);
        const ConvexBody P = ConvexBody::from_points(pts);
        REQUIRE(P.has_vertices());
        for (int j = 0; j < P.directions().cols(); ++j) {
            const double from_vertices = (P.vertices().transpose() * P.directions().col(j)).maxCoeff();
            CHECK(std::abs(from_vertices - P.support_values()[j]) < 1e-9);
        }
    }
}

TEST_CASE("subspace intersection via stacked complements") {
    Matrix U1(3, 2), U2(3, 2);
    U1 << 1, 0, 0, 1, 0, 0;  // span{e1, e2}
    U2 << 0, 0, 1, 0, 0, 1;  // span{e2, e3}
    const Matrix I12 = subspace_intersection(U1, U2);
    REQUIRE(I12.cols() == 1);
    CHECK(std::abs(std::abs(I12(1, 0)) - 1.0) < 1e-12);

    CHECK(subspace_intersection(U1, Matrix(3, 0)).cols() == 0);
}

TEST_CASE("dimension mismatches are rejected") {
    const ConvexBody b3 = ConvexBody::box(Vector::Constant(3, -1.0), Vector::Constant(3, 1.0));
    CHECK_THROWS_AS(minkowski_sum(kUnitBox2, b3), DimensionMismatch);
    CHECK_THROWS_AS(hausdorff_distance(kUnitBox2, b3), DimensionMismatch);
}
