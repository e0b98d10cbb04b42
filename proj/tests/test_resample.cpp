#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "seilab/resample/interpolate.hpp"

using namespace seilab;
using testgen::for_all;
using testgen::Gen;

namespace {

/// Not-a-knot spline from the full 4(n-1) coefficient system, solved densely.
std::vector<std::array<cplx, 4>> dense_not_a_knot(const std::vector<double>& tau, const std::vector<cplx>& y) {
    const std::size_t n = tau.size(), p = n - 1, m = 4 * p;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(Eigen::Index(m), Eigen::Index(m));
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(Eigen::Index(m));
    Eigen::Index row = 0;
    auto col = [](std::size_t piece, int k) { return Eigen::Index(4 * piece + std::size_t(k)); };
    for (std::size_t i = 0; i < p; ++i) {
        const double h = tau[i + 1] - tau[i];
        a(row, col(i, 0)) = 1;
        b(row++) = y[i];
        for (int k = 0; k < 4; ++k) a(row, col(i, k)) = std::pow(h, k);
        b(row++) = y[i + 1];
    }
    for (std::size_t i = 0; i + 1 < p; ++i) {
        const double h = tau[i + 1] - tau[i];
        a(row, col(i, 1)) = 1;
        a(row, col(i, 2)) = 2 * h;
        a(row, col(i, 3)) = 3 * h * h;
        a(row++, col(i + 1, 1)) = -1;
        a(row, col(i, 2)) = 2;
        a(row, col(i, 3)) = 6 * h;
        a(row++, col(i + 1, 2)) = -2;
    }
    a(row, col(0, 3)) = 1;
    a(row++, col(1, 3)) = -1;
    a(row, col(p - 2, 3)) = 1;
    a(row++, col(p - 1, 3)) = -1;
    REQUIRE(row == Eigen::Index(m));
    const Eigen::VectorXcd x = a.fullPivLu().solve(b);
    std::vector<std::array<cplx, 4>> out(p);
    for (std::size_t i = 0; i < p; ++i)
        for (int k = 0; k < 4; ++k) out[i][std::size_t(k)] = x(col(i, k));
    return out;
}

}  // namespace

TEST_CASE("target rate") {
    CHECK(target_rate(8, 2.5e6) == 20e6);
    CHECK(target_rate(2, 10e6) == 20e6);
}

TEST_CASE("LAI: midpoints, tail extrapolation, rate and length") {
    const std::vector<cplx> v{{0, 0}, {2, 4}, {6, -2}, {7, 1}};
    const auto up = lai_upsample(ComplexSequence(v, 5e6), 2);
    REQUIRE(up.size() == 8);
    CHECK(up.fs() == 10e6);
    const std::vector<cplx> want{{0, 0}, {1, 2}, {2, 4}, {4, 1}, {6, -2}, {6.5, -0.5}, {7, 1}, {7.5, 2.5}};
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(up[i] - want[i]) < 1e-15);
}

TEST_CASE("CSI matches an independent dense not-a-knot solve") {
    for_all(20, 5, [](Gen& g) {
        const std::size_t n = g.size(4, 14);
        const auto y = g.samples(n);
        std::vector<double> tau(n);
        for (std::size_t i = 0; i < n; ++i) tau[i] = double(i);
        const auto ref = dense_not_a_knot(tau, y);
        const CubicSpline s(KnotGrid::uniform(y));
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (double u : {0.0, 0.25, 0.5, 0.9}) {
                const auto& c = ref[i];
                const cplx want = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
                CHECK(std::abs(s(tau[i] + u) - want) < 1e-9);
            }
    });
}

TEST_CASE("CSI on non-uniform knots reproduces cubics") {
    for_all(20, 6, [](Gen& g) {
        const std::size_t n = g.size(4, 12);
        KnotGrid k;
        double t = g.real(-1, 1);
        const std::array<cplx, 4> a{g.complex(), g.complex(), g.complex(), g.complex()};
        auto p = [&](double x) { return a[0] + x * (a[1] + x * (a[2] + x * a[3])); };
        for (std::size_t i = 0; i < n; ++i) {
            k.tau.push_back(t);
            k.values.push_back(p(t));
            t += g.real(0.2, 1.0);
        }
        const CubicSpline s(k);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double mid = 0.5 * (k.tau[i] + k.tau[i + 1]);
            CHECK(std::abs(s(mid) - p(mid)) < 1e-9);
            const cplx d = a[1] + mid * (2.0 * a[2] + 3.0 * mid * a[3]);
            CHECK(std::abs(s.derivative(mid) - d) < 1e-8);
        }
    });
}

TEST_CASE("property: not-a-knot makes the third derivative continuous at the second and penultimate knots") {
    for_all(50, 7, [](Gen& g) {
        const auto y = g.samples(g.size(5, 40));
        const CubicSpline s(KnotGrid::uniform(y));
        const auto p = s.pieces();
        const std::size_t m = p.size();
        CHECK(std::abs(p[0].coeffs[3] - p[1].coeffs[3]) < 1e-9);
        CHECK(std::abs(p[m - 2].coeffs[3] - p[m - 1].coeffs[3]) < 1e-9);
    });
}

TEST_CASE("property: second derivative continuous at interior knots") {
    for_all(50, 8, [](Gen& g) {
        const auto y = g.samples(g.size(4, 40));
        const CubicSpline s(KnotGrid::uniform(y));
        const auto p = s.pieces();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const double h = p[i].right - p[i].left;
            const cplx left = 2.0 * p[i].coeffs[2] + 6.0 * h * p[i].coeffs[3];
            CHECK(std::abs(left - 2.0 * p[i + 1].coeffs[2]) < 1e-8);
        }
    });
}

TEST_CASE("tridiagonal solver agrees with a dense solve") {
    for_all(20, 9, [](Gen& g) {
        const std::size_t n = g.size(1, 30);
        std::vector<double> sub(n), diag(n), sup(n);
        std::vector<cplx> rhs = g.samples(n);
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
        Eigen::VectorXcd b(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            sub[i] = g.real(-1, 1);
            sup[i] = g.real(-1, 1);
            diag[i] = g.real(2.5, 4);
            const auto k = Eigen::Index(i);
            a(k, k) = diag[i];
            if (i > 0) a(k, k - 1) = sub[i];
            if (i + 1 < n) a(k, k + 1) = sup[i];
            b(k) = rhs[i];
        }
        const Eigen::VectorXcd want = a.lu().solve(b);
        const auto got = solve_tridiagonal(sub, diag, sup, rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want(Eigen::Index(i))) < 1e-10);
    });
}

TEST_CASE("knot grid validation") {
    CHECK_THROWS_AS(CubicSpline(KnotGrid::uniform(std::vector<cplx>(3))), std::invalid_argument);
    KnotGrid k{{0, 1, 1, 2}, std::vector<cplx>(4)};
    CHECK_THROWS_AS(CubicSpline{k}, std::invalid_argument);
    CHECK_THROWS(lai_upsample(ComplexSequence(std::vector<cplx>(8), 5e6), 0));
}

TEST_CASE("upsampled lengths for the three collection rates") {
    Gen g(10);
    for (int v : {2, 4, 8}) {
        const auto x = g.signal(320 / std::size_t(v), 20e6 / v);
        CHECK(lai_upsample(x, v).size() == 320);
        CHECK(csi_upsample(x, v).size() == 320);
        CHECK(csi_upsample(x, v).fs() == doctest::Approx(20e6));
    }
}

TEST_CASE("cubic t^3 - 2t on 8 uniform knots, V = 4") {
    std::vector<cplx> y(8);
    for (std::size_t i = 0; i < 8; ++i) {
        const double t = double(i);
        y[i] = t * t * t - 2 * t;
    }
    const auto up = csi_upsample(ComplexSequence(y, 5e6), 4);
    REQUIRE(up.size() == 32);
    for (std::size_t j = 0; j < 32; ++j) {
        const double t = double(j) / 4;
        CHECK(std::abs(up[j] - (t * t * t - 2 * t)) < 1e-9);
    }
}

TEST_CASE("property: knot exactness and polynomial reproduction of both methods") {
    for_all(30, 11, [](Gen& g) {
        const int v = int(g.size(1, 8));
        const std::size_t n = g.size(4, 40);
        const auto x = g.signal(n, 20e6 / v);
        const auto lai = lai_upsample(x, v);
        const auto csi = csi_upsample(x, v);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(lai[i * std::size_t(v)] - x[i]) < 1e-12);
            CHECK(std::abs(csi[i * std::size_t(v)] - x[i]) < 1e-12);
        }
        const cplx a = g.complex(), b = g.complex();
        std::vector<cplx> line(n);
        for (std::size_t i = 0; i < n; ++i) line[i] = a + b * double(i);
        const auto l = lai_upsample(ComplexSequence(line, 1e6), v);
        for (std::size_t j = 0; j < l.size(); ++j) CHECK(std::abs(l[j] - (a + b * (double(j) / v))) < 1e-9);
    });
}

TEST_CASE("constant input stays constant") {
    const std::vector<cplx> c(10, cplx(0.3, -1.2));
    for (int v : {1, 2, 5}) {
        for (const auto& s : {lai_upsample(ComplexSequence(c, 1e6), v), csi_upsample(ComplexSequence(c, 1e6), v)})
            for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(s[j] - c[0]) < 1e-12);
    }
}

TEST_CASE("too few knots are rejected") {
    CHECK_THROWS(lai_upsample(ComplexSequence(std::vector<cplx>(1), 1e6), 2));
    CHECK_NOTHROW(lai_upsample(ComplexSequence(std::vector<cplx>(2), 1e6), 2));
    CHECK_THROWS(csi_upsample(ComplexSequence(std::vector<cplx>(3), 1e6), 2));
    CHECK_THROWS(target_rate(0, 5e6));
}

TEST_CASE("property: both operators are linear") {
    for_all(20, 12, [](Gen& g) {
        const int v = int(g.size(2, 8));
        const std::size_t n = g.size(4, 30);
        const auto x = g.samples(n), y = g.samples(n);
        const cplx a = g.complex(), b = g.complex();
        std::vector<cplx> mix(n);
        for (std::size_t i = 0; i < n; ++i) mix[i] = a * x[i] + b * y[i];
        for (auto* op : {&lai_upsample, &csi_upsample}) {
            const auto lhs = op(ComplexSequence(mix, 1e6), v);
            const auto ux = op(ComplexSequence(x, 1e6), v), uy = op(ComplexSequence(y, 1e6), v);
            for (std::size_t j = 0; j < lhs.size(); ++j) CHECK(std::abs(lhs[j] - (a * ux[j] + b * uy[j])) < 1e-10);
        }
    });
}

TEST_CASE("property: CSI beats LAI on smooth sinusoids") {
    for_all(30, 13, [](Gen& g) {
        const int v = int(g.size(2, 8));
        const std::size_t n = g.size(16, 80);
        const double f = g.real(0.01, 0.2) * 0.5, phase = g.real(0, 6.283);
        auto tone = [&](double t) { return std::polar(1.0, 2 * std::numbers::pi * f * t + phase); };
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = tone(double(i));
        const auto lai = lai_upsample(ComplexSequence(x, 1e6), v);
        const auto csi = csi_upsample(ComplexSequence(x, 1e6), v);
        const std::size_t inside = (n - 1) * std::size_t(v) + 1;
        double e_lai = 0, e_csi = 0;
        for (std::size_t j = 0; j < inside; ++j) {
            const cplx want = tone(double(j) / v);
            e_lai = std::max(e_lai, std::abs(lai[j] - want));
            e_csi = std::max(e_csi, std::abs(csi[j] - want));
        }
        CHECK(e_csi <= e_lai);
    });
}

TEST_CASE("property: spline value and slope are continuous at interior knots") {
    for_all(30, 14, [](Gen& g) {
        const auto y = g.samples(g.size(4, 40));
        const CubicSpline s(KnotGrid::uniform(y));
        const auto p = s.pieces();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const double h = p[i].right - p[i].left;
            const auto& c = p[i].coeffs;
            const cplx v_left = c[0] + h * (c[1] + h * (c[2] + h * c[3]));
            const cplx d_left = c[1] + h * (2.0 * c[2] + 3.0 * h * c[3]);
            CHECK(std::abs(v_left - p[i + 1].coeffs[0]) < 1e-9);
            CHECK(std::abs(d_left - p[i + 1].coeffs[1]) < 1e-9);
        }
    });
}
