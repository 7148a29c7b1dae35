#pragma once
#include <vector>

#include "pmj/mat2.hpp"
#include "pmj/modulation.hpp"

namespace pmj {

struct ConjugationFrame {
    int i = 0;
    long j = 0;
    double x = 0;
    double vartheta = 0;
    Mat2 Z, Y, R, Q;
    bool elliptic = false;
    cplx lambda;             // eps (1 + vartheta xi), defined when elliptic
    double theta = 0;        // arccos(tr Y / (2 sqrt(det Y))), in (0, pi)
    double theta_small = 0;  // arccos(eps tr Y / (2 sqrt(det Y))): theta or pi - theta
};

double vartheta(const Analysis& an, int i, long j, double x);

// R_i = 1/2 [[1+sigma, -1+sigma], [1-sigma, -1-sigma]]
Mat2 limit_R(int sigma);

// j0 < 0 disables the ellipticity requirement; otherwise a non-elliptic frame with j >= j0
// at x in Lambda_- raises "elliptic failure"
ConjugationFrame frame(const Analysis& an, int i, long j, double x, long j0 = -1);

double scaled_discriminant(const Analysis& an, int i, long j, double x);

// smallest j0 <= j_max with every frame in [j0, j_max] elliptic
long detect_j0(const Analysis& an, int i, double x, long j_max);

struct PhaseSum {
    double sum = 0;
    std::vector<double> scaled;  // sqrt(a_{(k+1)N+i-1}/alpha_{i-1}) * theta_small_k
};
PhaseSum phase_sum(const Analysis& an, int i, long j0, long j, double x);

}  // namespace pmj
