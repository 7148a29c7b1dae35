#include "pmj/mat2.hpp"

#include <cmath>

#include "pmj/error.hpp"

namespace pmj {

namespace {
constexpr double kParabolicTol = 1e-9;
}

Mat2 Mat2::inverse() const {
    const double d = det();
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
}

bool Mat2::finite() const {
    return std::isfinite(m11) && std::isfinite(m12) && std::isfinite(m21) && std::isfinite(m22);
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}

Mat2 operator*(double s, const Mat2& a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }

Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a.m11 * v.x + a.m12 * v.y, a.m21 * v.x + a.m22 * v.y};
}

double max_norm(const Mat2& a) {
    return std::fmax(std::fmax(std::fabs(a.m11), std::fabs(a.m12)),
                     std::fmax(std::fabs(a.m21), std::fabs(a.m22)));
}

double discr(const Mat2& a) {
    // (m11 - m22)^2 + 4 m12 m21 equals tr^2 - 4 det but avoids the cancellation near |tr| = 2.
    const double d = a.m11 - a.m22;
    return d * d + 4.0 * a.m12 * a.m21;
}

Mat2 sym(const Mat2& a) {
    const double off = 0.5 * (a.m12 + a.m21);
    return {a.m11, off, off, a.m22};
}

Mat2 ordered_product(std::span<const Mat2> ms) {
    if (ms.empty()) throw Error("empty product");
    Mat2 p = ms.front();
    for (std::size_t k = 1; k < ms.size(); ++k) p = ms[k] * p;
    return p;
}

ParabolicForm parabolic_conjugator(const Mat2& X, double v_scale) {
    const double t = X.tr();
    if (std::fabs(std::fabs(t) - 2.0) > kParabolicTol || std::fabs(X.det() - 1.0) > kParabolicTol)
        throw Error("not parabolic");
    const int eps = t > 0 ? 1 : -1;
    const Mat2 A = double(eps) * X - Mat2::identity();
    if (max_norm(A) <= kParabolicTol) throw Error("trivial parabolic");

    // A is rank one and nilpotent: A = u w^T with w the dominant row direction.
    const double r1 = std::hypot(A.m11, A.m12);
    const double r2 = std::hypot(A.m21, A.m22);
    double wx, wy;
    if (r1 >= r2) {
        wx = A.m11; wy = A.m12;
    } else {
        wx = A.m21; wy = A.m22;
    }
    const double wn = std::hypot(wx, wy);
    double vx = -wy / wn, vy = wx / wn;
    if (vx < 0 || (vx == 0 && vy < 0)) {
        vx = -vx; vy = -vy;
    }
    vx *= v_scale;
    vy *= v_scale;

    // minimal-norm solution of A t2 = v via the pseudo-inverse A^+ = A^T / ||A||_F^2
    const double f2 = A.m11 * A.m11 + A.m12 * A.m12 + A.m21 * A.m21 + A.m22 * A.m22;
    const double t2x = (A.m11 * vx + A.m21 * vy) / f2;
    const double t2y = (A.m12 * vx + A.m22 * vy) / f2;
    return {{vx - t2x, t2x, vy - t2y, t2y}, eps};
}

bool CMat2::finite() const {
    auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(m11) && ok(m12) && ok(m21) && ok(m22);
}

CMat2 operator*(const CMat2& a, const CMat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

CMat2 sym(const CMat2& a) {
    const cplx off = 0.5 * (a.m12 + std::conj(a.m21));
    return {a.m11.real(), off, std::conj(off), a.m22.real()};
}

ComplexEigen eig_complex(const Mat2& R) {
    const double d = discr(R);
    if (d >= 0) throw Error("real spectrum");
    if (std::fabs(R.m12) < 1e-14) throw Error("degenerate column");
    const cplx xi(0.5 * R.tr(), 0.5 * std::sqrt(-d));
    const CMat2 C{1.0, 1.0, (xi - R.m11) / R.m12, (std::conj(xi) - R.m11) / R.m12};
    return {xi, C};
}

}  // namespace pmj
