#pragma once
#include <utility>
#include <vector>

#include "pmj/mat2.hpp"

namespace pmj {

// N-periodic Jacobi parameters; indices wrap over all of Z.
struct PeriodicParams {
    std::vector<double> alpha;
    std::vector<double> beta;

    PeriodicParams() = default;
    PeriodicParams(std::vector<double> a, std::vector<double> b);

    int N() const { return static_cast<int>(alpha.size()); }
    int wrap(long n) const {
        const long m = static_cast<long>(alpha.size());
        const long r = n % m;
        return static_cast<int>(r < 0 ? r + m : r);
    }
    double a(long n) const { return alpha[wrap(n)]; }
    double b(long n) const { return beta[wrap(n)]; }
};

enum class Case { I, IIa, IIb, III };
const char* case_name(Case c);

Mat2 frak_B(const PeriodicParams& p, long n, double x);
Mat2 frak_X(const PeriodicParams& p, long n, double x);
double periodic_poly(const PeriodicParams& p, long k, long n, double x);

Case classify(const PeriodicParams& p);

struct Interval {
    double lo, hi;
};
std::vector<Interval> spectral_bands(const PeriodicParams& p);

double trace_derivative_at_zero(const PeriodicParams& p);
// -sum_i [X_i(x)]_21 / alpha_{i-1}; equals (tr X_0)'(x)
double trace_derivative(const PeriodicParams& p, double x);

std::pair<double, double> absolute_trace_identity(const PeriodicParams& p, double x);

struct PeriodicCache {
    Mat2 frakX0;            // X_0(0)
    std::vector<Mat2> T;    // T_i, i = 0..N-1
    int epsilon = 1;
    Case classification = Case::IIb;
    std::vector<Interval> bands;
};

// v_scale forwards to parabolic_conjugator
PeriodicCache conjugator_chain(const PeriodicParams& p, double v_scale = 1.0);

}  // namespace pmj
