#pragma once
#include <ostream>
#include <string>
#include <vector>

#include "pmj/modulation.hpp"

namespace pmj {

struct UpsilonForms {
    double sum_form = 0;    // sum_k |[X_k(0)]_21| / alpha_{k-1}
    double trace_form = 0;  // |tr X_0'(0)|
};
UpsilonForms upsilon_forms(const Analysis& an, double x);
double upsilon(const Analysis& an, double x);

double rho(const ModulatedModel& m, long n);

struct AsymptoticsReport {
    double x = 0;
    int i = 0;
    long j_lo = 0, j_hi = 0;
    long j0 = 0;
    double mu_prime = 0;
    double amplitude_measured = 0;
    double amplitude_predicted = 0;
    double amplitude_spread = 0;  // max relative deviation of single-pair estimates from the mean
    double max_scaled_value = 0;  // sup over the window of |a^{1/4} p|
    std::vector<double> phase_residuals;
    double ratio() const { return amplitude_measured / amplitude_predicted; }
};

// A^2 = (w_j^2 + w_{j+1}^2 - 2 w_j w_{j+1} cos th) / sin^2 th for w_j = A sin(phi), w_{j+1} = A sin(phi + th)
double two_point_amplitude(double w0, double w1, double theta);

// window j in [j_lo, j_hi); mu_prime <= 0 means "compute from the Turan density"
AsymptoticsReport amplitude_extract(const Analysis& an, int i, double x, long j_lo, long j_hi,
                                    double mu_prime = -1, double rel_tol = 1e-3);

// perturbed polynomials with unperturbed phases; `perturbed` from analyse_perturbed
AsymptoticsReport perturbed_asymptotics(const Analysis& base, const Analysis& perturbed, int i, double x,
                                        long j_lo, long j_hi, double mu_prime = -1, double rel_tol = 1e-3);

struct KernelProfile {
    double x = 0;
    long n = 0;
    double rho_n = 0;
    double upsilon = 0;
    double mu_prime = 0;
    std::vector<double> u_grid;
    std::vector<std::vector<double>> values;      // [u][v]
    std::vector<std::vector<double>> prediction;  // [u][v]
    // max |value - prediction| / (upsilon/mu') over pairs with |u - v| <= span
    double max_deviation(double span) const;
};

double sinc(double t);

KernelProfile universality_profile(const Analysis& an, long n, double x, const std::vector<double>& u_grid,
                                   double mu_prime = -1, double rel_tol = 1e-3);

struct DiagonalConstant {
    double value = 0;
    double candidate_pi = 0;      // 1/(pi mu' sqrt|x+r|)
    double candidate_two_pi = 0;  // 1/(2 pi mu' sqrt|x+r|)
    double rel_dev_pi = 0, rel_dev_two_pi = 0;
    std::string matched;          // "1/pi", "1/(2pi)", "none" or "both"
};
// N=1 only: which of the two candidate constants the scaled kernel diagonal approaches
DiagonalConstant diagonal_constant(const Analysis& an, long n, double x, double mu_prime = -1,
                                   double rel_tol = 1e-3, double match_tol = 0.02);

void write_csv(std::ostream& os, const KernelProfile& k);
void write_json(std::ostream& os, const AsymptoticsReport& r);

}  // namespace pmj
