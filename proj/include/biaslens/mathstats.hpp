#pragma once

// Small numeric helpers shared by the analytics and threshold code.
// All spreads are population statistics (divide by n, not n-1).

#include <cstddef>
#include <vector>

namespace biaslens {

// Throws EmptyInputError on an empty vector.
double mean(const std::vector<double>& values);

// Population standard deviation: sqrt(sum((x-mean)^2)/n).
double population_stddev(const std::vector<double>& values);

// Linear-interpolation quantile (the "type 7" definition used by most
// statistics packages): h = (n-1)*p, interpolate between floor(h) and
// floor(h)+1. p must be in [0,1]. Throws EmptyInputError on empty input.
double quantile(std::vector<double> values, double p);

double median(std::vector<double> values);

// Upper tail of the standard normal, Phi_bar(z) = P(Z > z).
double normal_sf(double z);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (Lentz), accurate to ~1e-14.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace biaslens
