#pragma once
#include <ostream>
#include <string>
#include <vector>

#include "pmj/error.hpp"
#include "pmj/modulation.hpp"

namespace pmj {

double turan(const ModulatedModel& m, long n, double x);
// a_{n+N-1}^{3/2} <E u_{n+N}, u_n>, E = [[0,-1],[1,0]]
double gen_turan(const ModulatedModel& m, Vec2 eta, long n, double x);

struct TuranState {
    int i = 0;
    double x = 0;
    std::vector<std::pair<long, double>> samples;  // (n, a_{n+N-1}^{3/2} |D_n(x)|)
    double g_estimate = 0;
    double cauchy_gap = 0;
    bool converged = false;
};

class HorizonExhausted : public Error {
public:
    HorizonExhausted(const std::string& what, TuranState st) : Error(what), state(std::move(st)) {}
    TuranState state;
};

// dyadic j = 2^k j_start, n = jN + i; stops once consecutive samples agree to rel_tol
TuranState g_limit(const Analysis& an, int i, double x, double rel_tol);
double density(const Analysis& an, int i, double x, double rel_tol);
double density_from_g(const Analysis& an, int i, double x, double g);

ModulatedModel truncated_params(const ModulatedModel& m, long L);
double truncated_density(const Analysis& an, long L, double x);

// Analysis of the perturbed model: s, r, tau and conjugators of the unperturbed one
Analysis analyse_perturbed(const Analysis& base, const ModulatedModel& m_perturbed);
double perturbed_density(const Analysis& perturbed, int i, double x, double rel_tol);

struct DensityRow {
    double x, tau, g, mu_prime, gap;
    std::string flags;
};

struct DensityTable {
    std::vector<DensityRow> rows;
    int residue = 0;
    long horizon = 0;
    double rel_tol = 0;
    bool conjectural = false;
    std::vector<std::string> header_notes;

    std::vector<double> grid() const;
    std::vector<double> mu_prime() const;
};

DensityTable density_table(const Analysis& an, int i, double x_lo, double x_hi, int points, double rel_tol);
void write_csv(std::ostream& os, const DensityTable& t);

}  // namespace pmj
