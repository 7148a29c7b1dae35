#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pmj/config.hpp"
#include "pmj/error.hpp"
#include "pmj/oracle.hpp"
#include "pmj/turan.hpp"

using namespace pmj;

namespace {

ModulatedModel explicit_model(std::vector<double> a, std::vector<double> b) {
    ModulatedModel m;
    m.periodic = PeriodicParams({1}, {1});
    m.a_family = SequenceFamily::explicit_values(std::move(a));
    m.b_mode = BMode::Independent;
    m.b_family = SequenceFamily::explicit_values(std::move(b));
    return m;
}

Tridiagonal random_tridiagonal(std::mt19937_64& rng, int M) {
    std::uniform_real_distribution<double> d(-2, 2), e(0.1, 2);
    Tridiagonal t;
    for (int k = 0; k < M; ++k) t.diag.push_back(d(rng));
    for (int k = 0; k + 1 < M; ++k) t.offdiag.push_back(e(rng));
    return t;
}

// <A^k e0, e0> by repeated sparse products
std::vector<double> moments(const Tridiagonal& t, int kmax) {
    const std::size_t M = t.diag.size();
    std::vector<double> v(M, 0.0), out;
    v[0] = 1;
    for (int k = 0; k <= kmax; ++k) {
        out.push_back(v[0]);
        std::vector<double> w(M, 0.0);
        for (std::size_t i = 0; i < M; ++i) {
            w[i] += t.diag[i] * v[i];
            if (i + 1 < M) {
                w[i] += t.offdiag[i] * v[i + 1];
                w[i + 1] += t.offdiag[i] * v[i];
            }
        }
        v = w;
    }
    return out;
}

}  // namespace

TEST_CASE("truncation") {
    const ModulatedModel m1 = fixtures::m1();
    const Tridiagonal one = truncate(m1, 1);
    CHECK(one.diag == std::vector<double>{m1.b(0)});
    CHECK(one.offdiag.empty());
    ModulatedModel lin;
    lin.periodic = PeriodicParams({1}, {0});
    lin.a_family = SequenceFamily::power(1.0);
    const Tridiagonal t = truncate(lin, 3);
    CHECK(t.diag == std::vector<double>{0, 0, 0});
    CHECK(t.offdiag == std::vector<double>{1, 2});
    const ModulatedModel g = perturb(m1, PerturbationSeq::parse("geometric(0.5)"), PerturbationSeq{});
    CHECK(truncate(g, 4).offdiag[1] == doctest::Approx(m1.a(1) * 1.5));
    CHECK_THROWS_AS(truncate(m1, 0), Error);
}

TEST_CASE("small eigendecompositions") {
    const OracleMeasure a = eigendecomp({2.5}, {});
    CHECK(a.atoms == std::vector<double>{2.5});
    CHECK(a.weights == std::vector<double>{1.0});
    const OracleMeasure b = eigendecomp({0, 0}, {1});
    CHECK(b.atoms[0] == doctest::Approx(-1));
    CHECK(b.atoms[1] == doctest::Approx(1));
    CHECK(b.weights[0] == doctest::Approx(0.5));
    CHECK(b.weights[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(eigendecomp({0, 0}, {0}), Error);
}

TEST_CASE("eigendecomposition agrees with a dense solver") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const int M = 5 + trial * 3;
        const Tridiagonal t = random_tridiagonal(rng, M);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
        for (int i = 0; i < M; ++i) A(i, i) = t.diag[i];
        for (int i = 0; i + 1 < M; ++i) A(i, i + 1) = A(i + 1, i) = t.offdiag[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        const OracleMeasure om = eigendecomp(t.diag, t.offdiag);
        const double scale = A.cwiseAbs().maxCoeff();
        for (int k = 0; k < M; ++k) {
            CHECK(std::fabs(om.atoms[k] - es.eigenvalues()(k)) <= 1e-12 * scale * 10);
            const double w = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
            CHECK(std::fabs(om.weights[k] - w) <= 1e-10);
        }
    }
}

TEST_CASE("quadrature reproduces moments") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 30; ++trial) {
        const Tridiagonal t = random_tridiagonal(rng, 7 + trial);
        const OracleMeasure om = eigendecomp(t.diag, t.offdiag);
        const auto mom = moments(t, 6);
        for (int k = 0; k <= 6; ++k) {
            double s = 0;
            for (std::size_t j = 0; j < om.atoms.size(); ++j) s += om.weights[j] * std::pow(om.atoms[j], k);
            CHECK(std::fabs(s - mom[k]) <= 1e-8 * std::max(1.0, std::fabs(mom[k])));
        }
    }
}

TEST_CASE("measure invariants and interlacing") {
    const ModulatedModel m = fixtures::m1();
    for (long M : {50L, 400L}) {
        const Tridiagonal t = truncate(m, M), u = truncate(m, M + 1);
        const OracleMeasure a = eigendecomp(t.diag, t.offdiag), b = eigendecomp(u.diag, u.offdiag);
        double total = 0;
        for (double w : a.weights) {
            CHECK(w >= 0);
            total += w;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        for (std::size_t k = 1; k < a.atoms.size(); ++k) CHECK(a.atoms[k] > a.atoms[k - 1]);
        for (std::size_t k = 0; k < a.atoms.size(); ++k) {
            CHECK(b.atoms[k] <= a.atoms[k]);
            CHECK(a.atoms[k] <= b.atoms[k + 1]);
        }
    }
}

TEST_CASE("Chebyshev-like truncation") {
    const int M = 100;
    const ModulatedModel m = explicit_model(std::vector<double>(M, 0.5), std::vector<double>(M, 0.0));
    const Tridiagonal t = truncate(m, M);
    const OracleMeasure om = eigendecomp(t.diag, t.offdiag);
    double sum = 0;
    for (double x : om.atoms) {
        CHECK(x > -1);
        CHECK(x < 1);
        sum += x;
    }
    CHECK(std::fabs(sum) <= 1e-10);
    // semicircle: second moment a_0^2 = 1/4, fourth 2 a_0^4 = 1/8
    double m2 = 0, m4 = 0;
    for (std::size_t k = 0; k < om.atoms.size(); ++k) {
        m2 += om.weights[k] * std::pow(om.atoms[k], 2);
        m4 += om.weights[k] * std::pow(om.atoms[k], 4);
    }
    CHECK(m2 == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(m4 == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("CDF comparison") {
    const int M = 2000;
    const ModulatedModel m = explicit_model(std::vector<double>(M, 0.5), std::vector<double>(M, 0.0));
    const Tridiagonal t = truncate(m, M);
    const OracleMeasure om = eigendecomp(t.diag, t.offdiag);
    std::vector<double> grid, dens, twice;
    for (int k = 0; k <= 200; ++k) {
        const double x = -0.5 + k / 200.0;
        grid.push_back(x);
        dens.push_back(2 / std::numbers::pi * std::sqrt(1 - x * x));
        twice.push_back(2 * dens.back());
    }
    const CdfComparison ok = cdf_compare(om, grid, dens);
    CHECK(ok.sup_gap <= 2e-3);
    CHECK(ok.mass == doctest::Approx(ok.density_mass).epsilon(0.01));
    const CdfComparison bad = cdf_compare(om, grid, twice);
    CHECK(bad.sup_gap == doctest::Approx(ok.mass).epsilon(0.02));
    CHECK(cdf_gap(grid, dens, dens) == 0.0);
    CHECK(cdf_gap(grid, dens, twice) == doctest::Approx(ok.density_mass));
}

TEST_CASE("oracle and Turan densities approach each other") {
    const Analysis an = analyse(fixtures::m1());
    const DensityTable d = density_table(an, 0, -2.0, -1.0, 32, 1e-3);
    double prev = 1;
    for (long M : {250L, 1000L, 4000L}) {
        const Tridiagonal t = truncate(an.model, M);
        const double gap = cdf_compare(eigendecomp(t.diag, t.offdiag), d.grid(), d.mu_prime()).sup_gap;
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev <= 0.01);
}

TEST_CASE("no accumulation of eigenvalues inside Lambda_+") {
    const Analysis an = analyse(fixtures::m1());
    const ProbeResult p = ess_spectrum_probe(an, {0.5, 1.5}, {1000, 2000, 4000});
    REQUIRE(p.counts.size() == 3);
    for (std::size_t k = 1; k < p.counts.size(); ++k) CHECK(std::labs(p.counts[k] - p.counts[k - 1]) <= 1);
    CHECK_THROWS_AS(ess_spectrum_probe(an, {-2.0, -1.0}, {100}), Error);

    const Analysis pan = analyse_perturbed(
        an, perturb(an.model, PerturbationSeq::parse("geometric(0.5)"), PerturbationSeq{}));
    const ProbeResult q = ess_spectrum_probe(pan, {0.5, 1.5}, {1000, 2000, 4000});
    for (std::size_t k = 1; k < q.counts.size(); ++k) CHECK(std::labs(q.counts[k] - q.counts[k - 1]) <= 1);
}

TEST_CASE("probe removes a margin around x0") {
    const Analysis an = analyse(fixtures::m1());
    const ProbeResult p = ess_spectrum_probe(an, {0.0 + 1e-6, 1.0}, {100});
    CHECK(p.K.lo >= an.tau.x0 + 0.1 * (1.0 - 1e-6) - 1e-12);
}

TEST_CASE("measure CSV") {
    const OracleMeasure om = eigendecomp({0, 0}, {1});
    std::ostringstream os;
    write_csv(os, om);
    CHECK(os.str().rfind("atom,weight\n", 0) == 0);
}
