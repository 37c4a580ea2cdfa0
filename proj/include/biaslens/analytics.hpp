#pragma once

// Cohort analytics: prevalence with two-proportion z-tests, construct
// co-occurrence, engagement regressions, the engagement-by-trigger-count
// curve, and descriptive corpus statistics.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/triggers.hpp"

namespace biaslens {

inline constexpr std::array<const char*, 4> kEngagementMetrics = {
    "favorites", "retweets", "replies", "quotes"};

// Tweet -> cohort assignment for the analytics passes. Unknown tweets are
// excluded everywhere below.
std::vector<Cohort> cohort_assignments(const Corpus& corpus, double bot_cutoff);

struct ZTestResult {
    double z = 0.0;
    double p = 1.0;
};

// Pooled two-proportion z-test for x1/n1 vs x2/n2, two-sided p from the
// normal distribution. Equal proportions give z = 0, p = 1 exactly.
// Throws DomainError on x > n or n == 0.
ZTestResult two_proportion_ztest(std::int64_t x1, std::int64_t n1, std::int64_t x2,
                                 std::int64_t n2);

struct ConstructPrevalence {
    std::size_t flagged = 0;
    std::size_t total = 0;
    double proportion = 0.0;
};

struct CohortPrevalence {
    std::size_t total_tweets = 0;
    std::array<ConstructPrevalence, kConstructCount> by_construct;
    std::size_t with_any_trigger = 0;
    std::size_t with_no_trigger = 0;
};

struct PrevalenceReport {
    CohortPrevalence bot;
    CohortPrevalence human;
    // Bot vs human per construct, in construct order.
    std::array<ZTestResult, kConstructCount> ztests;
};

// Throws EmptyCohortError when either cohort has no tweets.
PrevalenceReport prevalence_by_cohort(const std::vector<TriggerVector>& vectors,
                                      const Corpus& corpus,
                                      const std::vector<Cohort>& cohorts);

// Symmetric 7x7 matrix; cell (i,j) counts tweets flagged with both
// constructs, the diagonal carries per-construct flagged counts.
using CooccurrenceMatrix = std::array<std::array<std::size_t, kConstructCount>, kConstructCount>;

CooccurrenceMatrix cooccurrence(const std::vector<TriggerVector>& vectors,
                                const Corpus& corpus, const std::vector<Cohort>& cohorts,
                                Cohort which);

// --- Ordinary least squares ------------------------------------------------

struct OlsResult {
    std::vector<std::string> terms;       // retained columns, intercept first
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;         // two-sided, Student-t with df = n - p
    std::vector<std::string> dropped;     // degenerate columns, reported not fitted
    double residual_variance = 0.0;       // RSS / (n - p)
    double r_squared = 0.0;
    std::size_t n = 0;
    std::int64_t df = 0;
};

// Least squares via Householder QR (never the normal equations, which
// square the condition number). Columns with zero variance, and columns
// found rank deficient during factorization, are dropped and reported in
// `dropped`. Covariance is sigma^2 (R^T R)^-1 from the QR factor. Throws
// RankDeficientError when not even an intercept can be fit (n == 0).
// X is row-major n x p; `terms` names the columns.
OlsResult ols_fit(const std::vector<double>& x, std::size_t n, std::size_t p,
                  const std::vector<double>& y, const std::vector<std::string>& terms);

struct RegressionModel {
    Cohort cohort;
    std::string metric;
    OlsResult fit;
};

struct RegressionReport {
    std::vector<RegressionModel> models;
    // e.g. "no human tweets; human models skipped"
    std::vector<std::string> notices;
};

// log(1 + metric) on intercept + the seven construct dummies, one model
// per (cohort, metric). Empty cohorts are skipped with a notice.
RegressionReport regress_all(const Corpus& corpus, const std::vector<TriggerVector>& vectors,
                             const std::vector<Cohort>& cohorts);

// --- Curves and descriptive stats ------------------------------------------

struct CurveCell {
    int trigger_count = 0;
    std::size_t n = 0;
    double mean_log = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct CurveReport {
    // metric -> rows for trigger_count 0..7 (rows with n == 0 omitted)
    std::map<std::string, std::vector<CurveCell>> by_metric;
};

CurveReport engagement_by_trigger_count(const Corpus& corpus,
                                        const std::vector<TriggerVector>& vectors,
                                        const std::vector<Cohort>& cohorts, Cohort which);

struct StatRow {
    std::string name;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  // population
};

struct DescriptiveStats {
    std::map<std::string, std::vector<StatRow>> by_cohort;  // "bot" / "human"
};

DescriptiveStats descriptive_stats(const Corpus& corpus, const std::vector<Cohort>& cohorts,
                                   const Lexicon& lexicon);

}  // namespace biaslens
