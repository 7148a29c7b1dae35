#pragma once
#include <vector>

#include "pmj/mat2.hpp"
#include "pmj/modulation.hpp"

namespace pmj {

Mat2 transfer_B(const ModulatedModel& m, long n, double x);
Mat2 transfer_X(const ModulatedModel& m, long n, double x);

// Generalized eigenvector u_n(eta, x), with (u_{-1}, u_0) = eta and a_{-1} = 1.
// eta = e2 gives the orthonormal polynomials.
class Stream {
public:
    Stream(const ModulatedModel& m, Vec2 eta, double x);

    long n() const { return n_; }
    double prev() const { return prev_; }  // u_{n-1}
    double cur() const { return cur_; }    // u_n
    double a_prev() const { return a_prev_; }  // a_{n-1}
    void step();
    void advance_to(long n) {
        while (n_ < n) step();
    }

private:
    const ModulatedModel* m_;
    double x_;
    long n_ = 0;
    double prev_, cur_;
    double a_prev_ = 1.0;
};

inline constexpr Vec2 kE1{1.0, 0.0};
inline constexpr Vec2 kE2{0.0, 1.0};

struct RecurrenceTrace {
    double x = 0;
    Vec2 eta;
    long n_max = 0;
    std::vector<double> values;  // u_0 .. u_{n_max}
};

RecurrenceTrace eval_stream(const ModulatedModel& m, Vec2 eta, double x, long n_max);

// p_0(x) .. p_n(x)
std::vector<double> polys(const ModulatedModel& m, double x, long n);

double cd_kernel(const ModulatedModel& m, long n, double x, double y);

}  // namespace pmj
