#pragma once
#include <ostream>
#include <vector>

#include "pmj/modulation.hpp"

namespace pmj {

struct Tridiagonal {
    std::vector<double> diag;     // b_0 .. b_{M-1}
    std::vector<double> offdiag;  // a_0 .. a_{M-2}
};

Tridiagonal truncate(const ModulatedModel& m, long M);

// number of eigenvalues strictly below x (Sturm sequence)
long sturm_count(const Tridiagonal& t, double x);

struct OracleMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;
};

// Eigenvalues by bisection; weights from the interlacing product
// w_k = prod_j (lambda_k - mu_j) / prod_{j != k} (lambda_k - lambda_j), mu the eigenvalues of the trailing minor.
OracleMeasure eigendecomp(const std::vector<double>& diag, const std::vector<double>& offdiag);
std::vector<double> eigenvalues(const Tridiagonal& t);

struct CdfComparison {
    double sup_gap = 0;       // probability units
    double mass = 0;          // quadrature mass of (c, d]
    double density_mass = 0;  // integral of the density over [c, d]
};

// grid must start at c and end at d; both CDFs anchored at c
CdfComparison cdf_compare(const OracleMeasure& om, const std::vector<double>& grid, const std::vector<double>& density);
// two densities on a shared grid
double cdf_gap(const std::vector<double>& grid, const std::vector<double>& f, const std::vector<double>& g);

struct ProbeResult {
    Interval K;         // after removing the margin around x0
    std::vector<long> sizes;
    std::vector<long> counts;
};
ProbeResult ess_spectrum_probe(const Analysis& an, Interval K, const std::vector<long>& sizes);

void write_csv(std::ostream& os, const OracleMeasure& om);

}  // namespace pmj
