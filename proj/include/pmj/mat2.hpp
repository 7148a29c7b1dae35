#pragma once
#include <complex>
#include <span>
#include <vector>

namespace pmj {

struct Mat2 {
    double m11 = 0, m12 = 0, m21 = 0, m22 = 0;

    static Mat2 identity() { return {1, 0, 0, 1}; }

    double tr() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
    Mat2 transpose() const { return {m11, m21, m12, m22}; }
    Mat2 inverse() const;
    bool finite() const;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(double s, const Mat2& a);

// (u1, u2) column vector
struct Vec2 {
    double x = 0, y = 0;
};
Vec2 operator*(const Mat2& a, const Vec2& v);

double max_norm(const Mat2& a);
double discr(const Mat2& a);
Mat2 sym(const Mat2& a);

// Product C_{last} ... C_{first}: the element at the back of the span is the leftmost factor.
Mat2 ordered_product(std::span<const Mat2> ms);

inline const Mat2 kParabolicNormal{0, 1, -1, 2};

struct ParabolicForm {
    Mat2 T;
    int epsilon = 1;
};

// v_scale rescales the kernel vector v; any positive value gives a valid conjugator.
ParabolicForm parabolic_conjugator(const Mat2& X, double v_scale = 1.0);

using cplx = std::complex<double>;

struct CMat2 {
    cplx m11, m12, m21, m22;

    cplx tr() const { return m11 + m22; }
    cplx det() const { return m11 * m22 - m12 * m21; }
    bool finite() const;
};

CMat2 operator*(const CMat2& a, const CMat2& b);
CMat2 sym(const CMat2& a);

struct ComplexEigen {
    cplx xi;
    CMat2 C;
};

ComplexEigen eig_complex(const Mat2& R);

}  // namespace pmj
