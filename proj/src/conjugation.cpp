#include "pmj/conjugation.hpp"

#include <cmath>
#include <numbers>

#include "pmj/error.hpp"
#include "pmj/kahan.hpp"
#include "pmj/recurrence.hpp"

namespace pmj {

namespace {

double theta_arg(const Mat2& Y, double sign) {
    double t = sign * Y.tr() / (2.0 * std::sqrt(Y.det()));
    if (std::fabs(t) >= 1.0) {
        if (std::fabs(t) - 1.0 > 1e-12) throw Error("elliptic failure");
        t = std::copysign(1.0 - 1e-15, t);
    }
    return t;
}

Mat2 shift_block(double t) { return {1.0, 1.0, std::exp(t), std::exp(-t)}; }

}  // namespace

double vartheta(const Analysis& an, int i, long j, double x) {
    const double tau = an.tau.tau(x);
    if (std::fabs(tau) <= 1e-12 * (std::fabs(an.tau.slope) + std::fabs(an.tau.intercept)))
        throw Error("critical point");
    const int N = an.model.N();
    return std::sqrt(an.model.periodic.a(i - 1) * std::fabs(tau) / an.model.a((j + 1) * N + i - 1));
}

Mat2 limit_R(int sigma) {
    const double s = sigma;
    return {0.5 * (1 + s), 0.5 * (-1 + s), 0.5 * (1 - s), 0.5 * (-1 - s)};
}

ConjugationFrame frame(const Analysis& an, int i, long j, double x, long j0) {
    const int N = an.model.N();
    const int eps = an.cache.epsilon;
    const Mat2& T = an.cache.T[static_cast<std::size_t>(i)];
    ConjugationFrame f;
    f.i = i;
    f.j = j;
    f.x = x;
    const double t = vartheta(an, i, j, x);
    const double s = vartheta(an, i, j + 1, x);
    f.vartheta = t;
    f.Z = T * shift_block(t);
    const Mat2 Z1 = T * shift_block(s);
    const Mat2 X = transfer_X(an.model, j * N + i, x);
    f.Y = Z1.inverse() * X * f.Z;
    f.R = (1.0 / t) * (double(eps) * f.Y - Mat2::identity());

    // Z_j^{-1} Z_{j+1} - Id; T cancels, expm1 keeps the small differences accurate
    const double den = -2.0 * std::sinh(t);
    const double em = std::expm1(t - s), ep = std::expm1(s - t);
    const Mat2 D{std::exp(s) * em / den, std::exp(-s) * ep / den, std::exp(t) * ep / den, std::exp(-t) * em / den};
    f.Q = (1.0 / t) * D;

    f.elliptic = discr(f.Y) < 0;
    if (f.elliptic) {
        const ComplexEigen e = eig_complex(f.R);
        f.lambda = double(eps) * (1.0 + t * e.xi);
        f.theta = std::acos(theta_arg(f.Y, 1.0));
        f.theta_small = std::acos(theta_arg(f.Y, eps));
    } else if (j0 >= 0 && j >= j0 && an.tau.in_minus(x)) {
        throw Error("elliptic failure");
    }
    return f;
}

double scaled_discriminant(const Analysis& an, int i, long j, double x) {
    const int N = an.model.N();
    return an.model.a((j + 1) * N + i - 1) * discr(transfer_X(an.model, j * N + i, x));
}

long detect_j0(const Analysis& an, int i, double x, long j_max) {
    long j0 = 0;
    for (long j = 0; j <= j_max; ++j)
        if (!frame(an, i, j, x).elliptic) j0 = j + 1;
    if (j0 > j_max) throw Error("elliptic failure");
    return j0;
}

PhaseSum phase_sum(const Analysis& an, int i, long j0, long j, double x) {
    PhaseSum ps;
    CompensatedSum acc;
    const int N = an.model.N();
    const double al = an.model.periodic.a(i - 1);
    for (long k = j0; k < j; ++k) {
        const ConjugationFrame f = frame(an, i, k, x, j0);
        if (!f.elliptic) throw Error("elliptic failure");
        acc += f.theta;
        ps.scaled.push_back(std::sqrt(an.model.a((k + 1) * N + i - 1) / al) * f.theta_small);
    }
    ps.sum = acc.value();
    return ps;
}

}  // namespace pmj
