#include "pmj/periodic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmj/error.hpp"

namespace pmj {

namespace {
constexpr double kClassTol = 1e-9;
constexpr double kRootTol = 1e-7;
}

PeriodicParams::PeriodicParams(std::vector<double> a, std::vector<double> b)
    : alpha(std::move(a)), beta(std::move(b)) {
    if (alpha.empty() || alpha.size() != beta.size())
        throw Error("periodic data: alpha and beta must have equal positive length");
    for (double v : alpha)
        if (!(v > 0)) throw Error("periodic data: alpha must be positive");
}

const char* case_name(Case c) {
    switch (c) {
        case Case::I: return "I";
        case Case::IIa: return "IIa";
        case Case::IIb: return "IIb";
        case Case::III: return "III";
    }
    return "?";
}

Mat2 frak_B(const PeriodicParams& p, long n, double x) {
    const double an = p.a(n);
    return {0.0, 1.0, -p.a(n - 1) / an, (x - p.b(n)) / an};
}

Mat2 frak_X(const PeriodicParams& p, long n, double x) {
    Mat2 m = frak_B(p, n, x);
    for (long k = n + 1; k < n + p.N(); ++k) m = frak_B(p, k, x) * m;
    return m;
}

double periodic_poly(const PeriodicParams& p, long k, long n, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = (x - p.b(k)) / p.a(k);
    for (long m = 1; m < n; ++m) {
        const double next = ((x - p.b(m + k)) * cur - p.a(m + k - 1) * prev) / p.a(m + k);
        prev = cur;
        cur = next;
    }
    return cur;
}

Case classify(const PeriodicParams& p) {
    const Mat2 X = frak_X(p, 0, 0.0);
    const double t = std::fabs(X.tr());
    if (t < 2.0 - kClassTol) return Case::I;
    if (t > 2.0 + kClassTol) return Case::III;
    const double s = X.tr() > 0 ? 1.0 : -1.0;
    if (max_norm(X - s * Mat2::identity()) <= kClassTol) return Case::IIa;
    return Case::IIb;
}

namespace {

// real roots of a polynomial given by monomial coefficients c[0] + c[1] t + ... (degree = size-1)
std::vector<double> real_roots(const std::vector<double>& c, int expected) {
    int deg = static_cast<int>(c.size()) - 1;
    while (deg > 0 && c[deg] == 0.0) --deg;
    if (deg < 1) throw Error("degenerate band structure");
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<double> out;
    for (int i = 0; i < deg; ++i) {
        const auto z = es.eigenvalues()[i];
        if (std::fabs(z.imag()) <= kRootTol * std::max(1.0, std::abs(z))) out.push_back(z.real());
    }
    if (static_cast<int>(out.size()) != expected) throw Error("degenerate band structure");
    return out;
}

}  // namespace

std::vector<Interval> spectral_bands(const PeriodicParams& p) {
    const int N = p.N();
    // Gershgorin bound for the periodic operator contains every band
    double lo = 1e300, hi = -1e300;
    for (int n = 0; n < N; ++n) {
        const double r = p.a(n) + p.a(n - 1);
        lo = std::min(lo, p.b(n) - r);
        hi = std::max(hi, p.b(n) + r);
    }
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);

    // interpolate tr X_0(c + h t) at N+1 Chebyshev points, solve for monomial coefficients in t
    Eigen::MatrixXd V(N + 1, N + 1);
    Eigen::VectorXd f(N + 1);
    for (int k = 0; k <= N; ++k) {
        const double t = std::cos(std::numbers::pi * (k + 0.5) / (N + 1));
        double pw = 1.0;
        for (int d = 0; d <= N; ++d) {
            V(k, d) = pw;
            pw *= t;
        }
        f(k) = frak_X(p, 0, c + h * t).tr();
    }
    const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(f);

    std::vector<double> roots;
    for (double shift : {2.0, -2.0}) {
        std::vector<double> cc(coef.data(), coef.data() + N + 1);
        cc[0] -= shift;
        for (double t : real_roots(cc, N)) roots.push_back(c + h * t);
    }
    std::sort(roots.begin(), roots.end());

    std::vector<Interval> bands;
    for (std::size_t k = 0; k + 1 < roots.size(); ++k) {
        const double l = roots[k], r = roots[k + 1];
        if (r - l <= kRootTol * std::max(1.0, h)) continue;
        if (std::fabs(frak_X(p, 0, 0.5 * (l + r)).tr()) < 2.0) bands.push_back({l, r});
    }
    return bands;
}

double trace_derivative(const PeriodicParams& p, double x) {
    double s = 0.0;
    for (int i = 1; i <= p.N(); ++i) s += frak_X(p, i, x).m21 / p.a(i - 1);
    return -s;
}

double trace_derivative_at_zero(const PeriodicParams& p) { return trace_derivative(p, 0.0); }

std::pair<double, double> absolute_trace_identity(const PeriodicParams& p, double x) {
    if (std::fabs(frak_X(p, 0, x).tr()) > 2.0 + kClassTol) throw Error("outside band closure");
    double lhs = 0.0, rhs = 0.0;
    for (int i = 1; i <= p.N(); ++i) {
        const double v = frak_X(p, i, x).m21 / p.a(i - 1);
        lhs += std::fabs(v);
        rhs += v;
    }
    return {lhs, std::fabs(rhs)};
}

PeriodicCache conjugator_chain(const PeriodicParams& p, double v_scale) {
    PeriodicCache c;
    c.classification = classify(p);
    c.frakX0 = frak_X(p, 0, 0.0);
    if (c.classification != Case::IIb) {
        if (c.classification == Case::IIa) throw Error("trivial parabolic");
        throw Error("not parabolic");
    }
    const ParabolicForm pf = parabolic_conjugator(c.frakX0, v_scale);
    c.epsilon = pf.epsilon;
    c.T.push_back(pf.T);
    for (int i = 1; i < p.N(); ++i) c.T.push_back(frak_B(p, i - 1, 0.0) * c.T.back());
    c.bands = spectral_bands(p);
    return c;
}

}  // namespace pmj
