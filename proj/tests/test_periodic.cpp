#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pmj/error.hpp"
#include "pmj/periodic.hpp"

using namespace pmj;

namespace {

PeriodicParams random_params(std::mt19937_64& rng, int max_n = 6) {
    std::uniform_int_distribution<int> nd(1, max_n);
    std::uniform_real_distribution<double> ad(0.5, 2.0), bd(-2.0, 2.0);
    const int N = nd(rng);
    std::vector<double> a(N), b(N);
    for (int k = 0; k < N; ++k) {
        a[k] = ad(rng);
        b[k] = bd(rng);
    }
    return PeriodicParams(a, b);
}

bool close(const Mat2& a, const Mat2& b, double tol) { return max_norm(a - b) <= tol; }

double central_trace_derivative(const PeriodicParams& p, double x, double h = 1e-5) {
    return (frak_X(p, 0, x + h).tr() - frak_X(p, 0, x - h).tr()) / (2 * h);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(PeriodicParams({}, {}), Error);
    CHECK_THROWS_AS(PeriodicParams({1, 1}, {0}), Error);
    CHECK_THROWS_AS(PeriodicParams({1, -1}, {0, 0}), Error);
}

TEST_CASE("one-step periodic transfer matrices") {
    const double q = 0.7;
    CHECK(close(frak_B(PeriodicParams({1}, {q}), 0, 0), Mat2{0, 1, -1, -q}, 0));
    const PeriodicParams p({1, 1}, {0.3, 1.9});
    CHECK(close(frak_B(p, 0, 0), Mat2{0, 1, -1, -0.3}, 0));
    CHECK(close(frak_B(p, -1, 0.4), frak_B(p, 1, 0.4), 0));
}

TEST_CASE("N-step periodic transfer matrices") {
    const double b0 = 0.8, b1 = -1.3;
    CHECK(close(frak_X(PeriodicParams({1, 1}, {b0, b1}), 0, 0), Mat2{-1, -b0, b1, b0 * b1 - 1}, 1e-15));
    const double a0 = 0.7, a1 = 1.6;
    CHECK(close(frak_X(PeriodicParams({a0, a1}, {1, 1}), 0, 0),
                Mat2{-a1 / a0, -1 / a0, 1 / a0, -a0 / a1 + 1 / (a0 * a1)}, 1e-14));
}

TEST_CASE("periodic polynomials") {
    const PeriodicParams p({0.7, 1.3, 2.0}, {0.5, -1.0, 0.25});
    for (int k = 0; k < 3; ++k)
        for (double x : {-1.0, 0.0, 2.5}) {
            CHECK(periodic_poly(p, k, 0, x) == 1.0);
            CHECK(periodic_poly(p, k, 1, x) == doctest::Approx((x - p.b(k)) / p.a(k)));
        }
    CHECK(periodic_poly(PeriodicParams({1}, {0}), 0, 2, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("classification examples") {
    CHECK(classify(PeriodicParams({1}, {0})) == Case::I);
    CHECK(classify(PeriodicParams({1}, {2})) == Case::IIb);
    CHECK(classify(PeriodicParams({1}, {3})) == Case::III);
    // beta_0 beta_1 = 0 gives X_0(0) = [[-1, 0], [b1, -1]] which is -Id when b1 = 0
    CHECK(classify(PeriodicParams({1, 1}, {0, 0})) == Case::IIa);
    CHECK(classify(PeriodicParams({1, 1}, {1, 4})) == Case::IIb);
}

TEST_CASE("spectral bands") {
    auto b = spectral_bands(PeriodicParams({1}, {0}));
    REQUIRE(b.size() == 1);
    CHECK(b[0].lo == doctest::Approx(-2));
    CHECK(b[0].hi == doctest::Approx(2));
    b = spectral_bands(PeriodicParams({1}, {2}));
    REQUIRE(b.size() == 1);
    CHECK(b[0].lo == doctest::Approx(0).epsilon(1e-9));
    CHECK(b[0].hi == doctest::Approx(4));
    const PeriodicParams p({1, 1}, {1, 4});
    CHECK(frak_X(p, 0, 0).tr() == doctest::Approx(2));
    b = spectral_bands(p);
    bool edge = false;
    for (const auto& I : b) edge = edge || std::fabs(I.lo) < 1e-9 || std::fabs(I.hi) < 1e-9;
    CHECK(edge);
}

TEST_CASE("bands are where |tr| < 2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
        const PeriodicParams p = random_params(rng);
        const auto bands = spectral_bands(p);
        CHECK(bands.size() == static_cast<std::size_t>(p.N()));
        for (const auto& I : bands) {
            CHECK(std::fabs(std::fabs(frak_X(p, 0, I.lo).tr()) - 2) < 1e-7);
            CHECK(std::fabs(std::fabs(frak_X(p, 0, I.hi).tr()) - 2) < 1e-7);
            CHECK(std::fabs(frak_X(p, 0, I.lo + (I.hi - I.lo) * (0.05 + 0.9 * u(rng))).tr()) < 2);
        }
    }
}

TEST_CASE("trace derivative at zero") {
    CHECK(trace_derivative_at_zero(PeriodicParams({1}, {2})) == doctest::Approx(1.0));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    int seen = 0;
    while (seen < 50) {
        PeriodicParams p = random_params(rng, 1);
        p.beta[0] = (u(rng) < 0.5 ? 2.0 : -2.0) * p.alpha[0];
        if (classify(p) != Case::IIb) continue;
        ++seen;
        CHECK(trace_derivative_at_zero(p) != 0.0);
    }
}

TEST_CASE("trace derivative matches central differences") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> xd(-3, 3);
    for (int k = 0; k < 300; ++k) {
        const PeriodicParams p = random_params(rng);
        for (double x : {0.0, xd(rng)}) {
            const double fd = central_trace_derivative(p, x);
            CHECK(std::fabs(trace_derivative(p, x) - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST_CASE("absolute trace identity") {
    const auto [l1, r1] = absolute_trace_identity(PeriodicParams({1.3}, {0.4}), 0.1);
    CHECK(l1 == doctest::Approx(r1));
    const auto [l2, r2] = absolute_trace_identity(PeriodicParams({1, 1}, {1, 4}), 0.0);
    CHECK(l2 == doctest::Approx(5.0));
    CHECK(r2 == doctest::Approx(5.0));
    CHECK_THROWS_WITH_AS(absolute_trace_identity(PeriodicParams({1}, {0}), 3.0), "outside band closure", Error);
}

TEST_CASE("absolute trace identity inside bands") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 50; ++k) {
        const PeriodicParams p = random_params(rng);
        const auto bands = spectral_bands(p);
        for (int s = 0; s < 200; ++s) {
            const Interval& I = bands[static_cast<std::size_t>(s) % bands.size()];
            const double x = I.lo + (I.hi - I.lo) * u(rng);
            const auto [l, r] = absolute_trace_identity(p, x);
            CHECK(std::fabs(l - r) <= 1e-9 * std::max(1.0, l));
        }
    }
}

TEST_CASE("unit determinant and conjugation along the period") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> xd(-3, 3);
    for (int k = 0; k < 1000; ++k) {
        const PeriodicParams p = random_params(rng);
        const double x = xd(rng);
        for (int i = 0; i < p.N(); ++i) CHECK(std::fabs(frak_X(p, i, x).det() - 1) <= 1e-10 * std::max(1.0, max_norm(frak_X(p, i, x))));
        Mat2 S = Mat2::identity();
        for (int i = 1; i < p.N(); ++i) {
            S = frak_B(p, i - 1, 0) * S;
            const Mat2 conj = S * frak_X(p, 0, 0) * S.inverse();
            const Mat2 Xi = frak_X(p, i, 0);
            CHECK(max_norm(conj - Xi) <= 1e-9 * std::max(1.0, max_norm(Xi)));
        }
    }
}

TEST_CASE("classification is invariant under cyclic rotation") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 300; ++k) {
        PeriodicParams p = random_params(rng);
        if (k % 3 == 0) p = PeriodicParams({1, 1}, {u(rng) * 3 + 0.5, 0});
        const Case c = classify(p);
        for (int s = 1; s < p.N(); ++s) {
            std::vector<double> a(p.N()), b(p.N());
            for (int i = 0; i < p.N(); ++i) {
                a[i] = p.a(i + s);
                b[i] = p.b(i + s);
            }
            CHECK(classify(PeriodicParams(a, b)) == c);
        }
    }
}

TEST_CASE("conjugator chain") {
    const PeriodicCache c = conjugator_chain(PeriodicParams({1}, {-2}));
    CHECK(c.epsilon == 1);
    CHECK(close(c.frakX0, kParabolicNormal, 1e-15));
    CHECK(close(c.T[0].inverse() * c.frakX0 * c.T[0], kParabolicNormal, 1e-12));
    const PeriodicCache d = conjugator_chain(PeriodicParams({1}, {2}));
    CHECK(d.epsilon == -1);
    CHECK(d.T[0].det() == doctest::Approx(-0.5));
    CHECK_THROWS_WITH_AS(conjugator_chain(PeriodicParams({1}, {0})), "not parabolic", Error);
    CHECK_THROWS_WITH_AS(conjugator_chain(PeriodicParams({1, 1}, {0, 0})), "trivial parabolic", Error);
}

TEST_CASE("every conjugator in the chain brings X_i(0) to normal form") {
    for (const auto& p : {PeriodicParams({1, 1}, {1, 4}), PeriodicParams({1, 1}, {2.5, 0}),
                          PeriodicParams({0.5, 0.5}, {1, 1}), PeriodicParams({1, 2}, {1, 1})}) {
        const PeriodicCache c = conjugator_chain(p);
        for (int i = 0; i < p.N(); ++i) {
            const Mat2 back = double(c.epsilon) * (c.T[i].inverse() * frak_X(p, i, 0) * c.T[i]);
            CHECK(close(back, kParabolicNormal, 1e-10));
        }
    }
}
