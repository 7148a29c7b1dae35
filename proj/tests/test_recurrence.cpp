#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pmj/config.hpp"
#include "pmj/error.hpp"
#include "pmj/periodic.hpp"
#include "pmj/recurrence.hpp"

using namespace pmj;

namespace {

ModulatedModel linear_model() {
    ModulatedModel m;
    m.periodic = PeriodicParams({1}, {0});
    m.a_family = SequenceFamily::power(1.0);
    return m;
}

// elliptic periodic limit, so solutions grow at most polynomially
ModulatedModel random_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(1, 4);
    std::uniform_real_distribution<double> ad(0.5, 2), bd(-2, 2), gd(0.3, 0.9);
    PeriodicParams p;
    do {
        const int N = nd(rng);
        std::vector<double> a(N), b(N);
        for (int k = 0; k < N; ++k) {
            a[k] = ad(rng);
            b[k] = bd(rng);
        }
        p = PeriodicParams(a, b);
    } while (classify(p) != Case::I);
    ModulatedModel m;
    m.periodic = p;
    m.a_family = SequenceFamily::power(gd(rng));
    return m;
}

bool close(const Mat2& a, const Mat2& b, double tol) { return max_norm(a - b) <= tol; }

}  // namespace

TEST_CASE("one-step transfer matrices") {
    CHECK(close(transfer_B(linear_model(), 1, 0.0), Mat2{0, 1, -0.5, 0}, 1e-15));
    ModulatedModel m;
    m.periodic = PeriodicParams({1}, {1});
    m.a_family = SequenceFamily::explicit_values({1, 1, 1});
    m.b_mode = BMode::Independent;
    m.b_family = SequenceFamily::explicit_values({5, 5, 5});
    CHECK(close(transfer_B(m, 0, 5.0), Mat2{0, 1, -1, 0}, 0));
    const ModulatedModel r = fixtures::m1();
    for (long n = 1; n < 50; ++n) CHECK(transfer_B(r, n, 0.3).det() == doctest::Approx(r.a(n - 1) / r.a(n)));
}

TEST_CASE("N-step transfer matrices") {
    const ModulatedModel m1 = fixtures::m1();
    for (long n : {0L, 3L, 100L}) CHECK(close(transfer_X(m1, n, -0.4), transfer_B(m1, n, -0.4), 0));
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const ModulatedModel m = random_model(rng);
        const int N = m.N();
        for (long n = 1; n < 40; ++n)
            CHECK(transfer_X(m, n, 0.2).det() == doctest::Approx(m.a(n - 1) / m.a(n + N - 1)).epsilon(1e-12));
    }
    const Mat2 X0 = frak_X(m1.periodic, 0, 0);
    CHECK(max_norm(transfer_X(m1, 100000, -1.0) - X0) <= 1e-2);
}

TEST_CASE("orthonormal polynomials") {
    const ModulatedModel m = fixtures::diagonal_q_inverse(1.3);
    for (double x : {-1.0, 0.0, 2.5}) {
        const auto p = polys(m, x, 3);
        CHECK(p[0] == 1.0);
        CHECK(p[1] == doctest::Approx((x - m.b(0)) / m.a(0)));
    }
    CHECK(polys(linear_model(), 0.0, 2)[2] == doctest::Approx(-0.5));
    CHECK_THROWS_AS(eval_stream(m, Vec2{1, 1}, 0.0, 3), Error);
}

TEST_CASE("generalized eigenvector initial pair") {
    const ModulatedModel m = fixtures::m1();
    const double x = 0.7;
    Stream s(m, kE1, x);
    CHECK(s.prev() == 1.0);
    CHECK(s.cur() == 0.0);
    s.step();
    const Vec2 next = transfer_B(m, 0, x) * kE1;
    CHECK(s.prev() == next.x);
    CHECK(s.cur() == doctest::Approx(next.y));
}

TEST_CASE("cocycle consistency") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> xd(-2, 2), ed(0, 2 * M_PI);
    std::uniform_int_distribution<long> nd(1, 5000);
    for (int t = 0; t < 40; ++t) {
        const ModulatedModel m = random_model(rng);
        const double x = xd(rng), phi = ed(rng);
        const auto u = eval_stream(m, Vec2{std::cos(phi), std::sin(phi)}, x, 6000).values;
        auto at = [&](long n) { return n < 0 ? std::cos(phi) : u[static_cast<std::size_t>(n)]; };
        for (int k = 0; k < 10; ++k) {
            const long n = nd(rng);
            const Vec2 v = transfer_X(m, n, x) * Vec2{at(n - 1), at(n)};
            const double scale = std::max(std::hypot(at(n + m.N() - 1), at(n + m.N())), 1e-300);
            CHECK(std::fabs(v.x - at(n + m.N() - 1)) <= 1e-10 * scale);
            CHECK(std::fabs(v.y - at(n + m.N())) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("Wronskian is constant") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> xd(-2, 2);
    for (int t = 0; t < 40; ++t) {
        const ModulatedModel m = random_model(rng);
        const double x = xd(rng);
        const auto p = eval_stream(m, kE2, x, 400).values;
        const auto q = eval_stream(m, kE1, x, 400).values;
        const double w0 = m.a(0) * (p[1] * q[0] - p[0] * q[1]);
        for (long n = 1; n < 400; ++n) {
            const double w = m.a(n) * (p[n + 1] * q[n] - p[n] * q[n + 1]);
            const double scale = std::max(std::fabs(w0), m.a(n) * std::fabs(p[n + 1] * q[n]) + m.a(n) * std::fabs(p[n] * q[n + 1]));
            CHECK(std::fabs(w - w0) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("Christoffel-Darboux kernel") {
    const ModulatedModel m = fixtures::m1();
    CHECK(cd_kernel(m, 0, -1.0, 0.4) == 1.0);
    double prev = 0;
    for (long n : {0L, 1L, 10L, 100L, 1000L}) {
        const double k = cd_kernel(m, n, -0.8, -0.8);
        CHECK(k >= 1.0);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("Christoffel-Darboux identity") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> xd(-2, 2);
    std::uniform_int_distribution<long> nd(1, 1000);
    for (int t = 0; t < 100; ++t) {
        const ModulatedModel m = random_model(rng);
        const long n = nd(rng);
        const double x = xd(rng), y = x + 0.3 + xd(rng) * 0.1;
        const auto px = polys(m, x, n + 1), py = polys(m, y, n + 1);
        const double rhs = m.a(n) * (px[n + 1] * py[n] - px[n] * py[n + 1]);
        const double lhs = (x - y) * cd_kernel(m, n, x, y);
        const double scale = m.a(n) * (std::fabs(px[n + 1] * py[n]) + std::fabs(px[n] * py[n + 1]));
        CHECK(std::fabs(lhs - rhs) <= 1e-8 * std::max(scale, std::fabs(lhs)));
    }
}

TEST_CASE("scaled generalized eigenvectors stay bounded on Lambda_-") {
    const ModulatedModel m = fixtures::m1();
    for (double x : {-2.0, -1.0, -0.5}) {
        const double phi = 0.9;
        Stream s(m, Vec2{std::cos(phi), std::sin(phi)}, x);
        std::vector<double> block_max;
        double mx = 0;
        long edge = 1024;
        while (s.n() < 100000) {
            s.step();
            mx = std::max(mx, std::sqrt(m.a(s.n())) * (s.prev() * s.prev() + s.cur() * s.cur()));
            if (s.n() == edge) {
                block_max.push_back(mx);
                mx = 0;
                edge *= 2;
            }
        }
        REQUIRE(block_max.size() >= 4);
        for (std::size_t k = 1; k < block_max.size(); ++k) CHECK(block_max[k] <= 1.05 * block_max[k - 1]);
    }
}

TEST_CASE("hyperbolic growth is reported") {
    CHECK_THROWS_WITH_AS(polys(fixtures::m1(), 3.0, 4000000), "growth regime", Error);
}
