#include "biaslens/mathstats.hpp"

#include <algorithm>
#include <cmath>

#include "biaslens/errors.hpp"

namespace biaslens {

double mean(const std::vector<double>& values) {
    if (values.empty()) {
        throw EmptyInputError("mean of empty input");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double population_stddev(const std::vector<double>& values) {
    double m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        double d = v - m;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw EmptyInputError("quantile of empty input");
    }
    if (p < 0.0 || p > 1.0) {
        throw DomainError("quantile p outside [0,1]");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double median(std::vector<double> values) {
    return quantile(std::move(values), 0.5);
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) {
        throw DomainError("incomplete_beta requires a, b > 0");
    }
    if (x < 0.0 || x > 1.0) {
        throw DomainError("incomplete_beta requires x in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log(1.0 - x);
    double bt = std::exp(ln_bt);
    // Use the expansion that converges fastest, mirror for the other half.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) {
        throw DomainError("student_t_two_sided_p requires df > 0");
    }
    double x = df / (df + t * t);
    double p = incomplete_beta(df / 2.0, 0.5, x);
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace biaslens
