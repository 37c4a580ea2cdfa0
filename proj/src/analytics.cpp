#include "biaslens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "biaslens/errors.hpp"
#include "biaslens/mathstats.hpp"

namespace biaslens {

std::vector<Cohort> cohort_assignments(const Corpus& corpus, double bot_cutoff) {
    std::vector<Cohort> out(corpus.tweets().size(), Cohort::Unknown);
    std::unordered_map<std::string, Cohort> by_user;
    for (std::size_t i = 0; i < corpus.tweets().size(); ++i) {
        const auto& author = corpus.tweets()[i].author_id;
        auto it = by_user.find(author);
        if (it == by_user.end()) {
            it = by_user.emplace(author, corpus.cohort_of(author, bot_cutoff)).first;
        }
        out[i] = it->second;
    }
    return out;
}

ZTestResult two_proportion_ztest(std::int64_t x1, std::int64_t n1, std::int64_t x2,
                                 std::int64_t n2) {
    if (n1 <= 0 || n2 <= 0) {
        throw DomainError("z-test sample sizes must be positive");
    }
    if (x1 < 0 || x2 < 0 || x1 > n1 || x2 > n2) {
        throw DomainError("z-test successes must be within [0, n]");
    }
    double p1 = static_cast<double>(x1) / static_cast<double>(n1);
    double p2 = static_cast<double>(x2) / static_cast<double>(n2);
    if (p1 == p2) {
        return {0.0, 1.0};
    }
    double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    double se = std::sqrt(pooled * (1.0 - pooled) *
                          (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    // p1 != p2 forces pooled into (0,1), so se > 0 here.
    double z = (p1 - p2) / se;
    double p = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return {z, p};
}

namespace {

void accumulate_prevalence(CohortPrevalence& acc, const TriggerFlags& flags) {
    ++acc.total_tweets;
    bool any = false;
    for (std::size_t c = 0; c < kConstructCount; ++c) {
        if (flags.construct_flag(static_cast<Construct>(c))) {
            ++acc.by_construct[c].flagged;
            any = true;
        }
    }
    if (any) {
        ++acc.with_any_trigger;
    } else {
        ++acc.with_no_trigger;
    }
}

void finalize_prevalence(CohortPrevalence& acc) {
    for (auto& c : acc.by_construct) {
        c.total = acc.total_tweets;
        c.proportion = acc.total_tweets == 0
                           ? 0.0
                           : static_cast<double>(c.flagged) / static_cast<double>(acc.total_tweets);
    }
}

}  // namespace

PrevalenceReport prevalence_by_cohort(const std::vector<TriggerVector>& vectors,
                                      const Corpus& corpus,
                                      const std::vector<Cohort>& cohorts) {
    if (cohorts.size() != corpus.tweets().size()) {
        throw InvariantError("cohort assignment size mismatch");
    }
    PrevalenceReport report;
    for (const auto& tv : vectors) {
        const TweetRecord* t = corpus.find_tweet(tv.tweet_id);
        if (!t) {
            throw InvariantError("trigger vector for unknown tweet: " + tv.tweet_id);
        }
        std::size_t idx = static_cast<std::size_t>(t - corpus.tweets().data());
        switch (cohorts[idx]) {
            case Cohort::Bot: accumulate_prevalence(report.bot, tv.flags); break;
            case Cohort::Human: accumulate_prevalence(report.human, tv.flags); break;
            case Cohort::Unknown: break;
        }
    }
    if (report.bot.total_tweets == 0 || report.human.total_tweets == 0) {
        throw EmptyCohortError("prevalence comparison requires both cohorts to have tweets");
    }
    finalize_prevalence(report.bot);
    finalize_prevalence(report.human);
    for (std::size_t c = 0; c < kConstructCount; ++c) {
        report.ztests[c] = two_proportion_ztest(
            static_cast<std::int64_t>(report.bot.by_construct[c].flagged),
            static_cast<std::int64_t>(report.bot.total_tweets),
            static_cast<std::int64_t>(report.human.by_construct[c].flagged),
            static_cast<std::int64_t>(report.human.total_tweets));
    }
    return report;
}

CooccurrenceMatrix cooccurrence(const std::vector<TriggerVector>& vectors,
                                const Corpus& corpus, const std::vector<Cohort>& cohorts,
                                Cohort which) {
    CooccurrenceMatrix m{};
    for (const auto& tv : vectors) {
        const TweetRecord* t = corpus.find_tweet(tv.tweet_id);
        if (!t) {
            throw InvariantError("trigger vector for unknown tweet: " + tv.tweet_id);
        }
        std::size_t idx = static_cast<std::size_t>(t - corpus.tweets().data());
        if (cohorts[idx] != which) {
            continue;
        }
        for (std::size_t a = 0; a < kConstructCount; ++a) {
            if (!tv.flags.construct_flag(static_cast<Construct>(a))) {
                continue;
            }
            for (std::size_t b = 0; b < kConstructCount; ++b) {
                if (tv.flags.construct_flag(static_cast<Construct>(b))) {
                    ++m[a][b];
                }
            }
        }
    }
    return m;
}

// --- OLS -------------------------------------------------------------------

namespace {

// In-place Householder QR on the n x p column-major matrix `a` augmented
// with `qty` (initially y). After the loop, the upper triangle of `a`
// holds R and qty[0..p) holds Q^T y; the tail norm of qty is the RSS.
// Returns false (rank deficiency) via *bad_col when a pivot collapses.
bool householder_qr(std::vector<double>& a, std::size_t n, std::size_t p,
                    std::vector<double>& qty, std::size_t* bad_col) {
    auto col = [&](std::size_t j) { return a.data() + j * n; };
    double max_pivot = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        double* ck = col(k);
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            norm += ck[i] * ck[i];
        }
        norm = std::sqrt(norm);
        double pivot_scale = std::max(max_pivot, norm);
        if (norm == 0.0 || (pivot_scale > 0.0 && norm <= 1e-12 * pivot_scale)) {
            *bad_col = k;
            return false;
        }
        double alpha = ck[k] > 0.0 ? -norm : norm;
        // Householder vector v lives in ck[k..n); v_k = ck[k] - alpha.
        double vk = ck[k] - alpha;
        double vnorm2 = vk * vk;
        for (std::size_t i = k + 1; i < n; ++i) {
            vnorm2 += ck[i] * ck[i];
        }
        if (vnorm2 == 0.0) {
            *bad_col = k;
            return false;
        }
        // Apply H = I - 2 v v^T / (v^T v) to the remaining columns and qty.
        for (std::size_t j = k + 1; j < p; ++j) {
            double* cj = col(j);
            double dot = vk * cj[k];
            for (std::size_t i = k + 1; i < n; ++i) {
                dot += ck[i] * cj[i];
            }
            double f = 2.0 * dot / vnorm2;
            cj[k] -= f * vk;
            for (std::size_t i = k + 1; i < n; ++i) {
                cj[i] -= f * ck[i];
            }
        }
        {
            double dot = vk * qty[k];
            for (std::size_t i = k + 1; i < n; ++i) {
                dot += ck[i] * qty[i];
            }
            double f = 2.0 * dot / vnorm2;
            qty[k] -= f * vk;
            for (std::size_t i = k + 1; i < n; ++i) {
                qty[i] -= f * ck[i];
            }
        }
        ck[k] = alpha;
        for (std::size_t i = k + 1; i < n; ++i) {
            ck[i] = 0.0;  // logically zero; keep the array clean
        }
        max_pivot = std::max(max_pivot, std::fabs(alpha));
    }
    return true;
}

}  // namespace

OlsResult ols_fit(const std::vector<double>& x, std::size_t n, std::size_t p,
                  const std::vector<double>& y, const std::vector<std::string>& terms) {
    if (x.size() != n * p || y.size() != n || terms.size() != p) {
        throw DimensionMismatchError("ols_fit input sizes disagree");
    }
    if (n == 0) {
        throw RankDeficientError("ols_fit on empty sample");
    }

    OlsResult out;
    out.n = n;

    // Retained column indexes into the caller's matrix. Zero-variance
    // columns (other than a constant first column, the intercept) never
    // enter the factorization.
    std::vector<std::size_t> retained;
    for (std::size_t j = 0; j < p; ++j) {
        if (j > 0) {
            double first = x[j];  // row 0, column j (row-major)
            bool constant = true;
            for (std::size_t i = 1; i < n; ++i) {
                if (x[i * p + j] != first) {
                    constant = false;
                    break;
                }
            }
            if (constant) {
                out.dropped.push_back(terms[j]);
                continue;
            }
        }
        retained.push_back(j);
    }

    // QR with a rank-deficiency retry loop: a collapsed pivot drops that
    // column and refactorizes. Terminates because each pass removes one.
    std::vector<double> a, qty, rhs;
    for (;;) {
        std::size_t pr = retained.size();
        if (pr == 0) {
            throw RankDeficientError("ols_fit: no usable columns");
        }
        if (n < pr) {
            // More parameters than rows: shed trailing columns first.
            out.dropped.push_back(terms[retained.back()]);
            retained.pop_back();
            continue;
        }
        a.assign(n * pr, 0.0);
        for (std::size_t jj = 0; jj < pr; ++jj) {
            std::size_t j = retained[jj];
            for (std::size_t i = 0; i < n; ++i) {
                a[jj * n + i] = x[i * p + j];
            }
        }
        qty = y;
        std::size_t bad_col = 0;
        if (householder_qr(a, n, pr, qty, &bad_col)) {
            break;
        }
        out.dropped.push_back(terms[retained[bad_col]]);
        retained.erase(retained.begin() + static_cast<std::ptrdiff_t>(bad_col));
    }

    std::size_t pr = retained.size();
    // Back-substitution: R beta = (Q^T y)[0..pr)
    std::vector<double> beta(pr, 0.0);
    for (std::size_t k = pr; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < pr; ++j) {
            s -= a[j * n + k] * beta[j];
        }
        beta[k] = s / a[k * n + k];
    }

    double rss = 0.0;
    for (std::size_t i = pr; i < n; ++i) {
        rss += qty[i] * qty[i];
    }
    out.df = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(pr);
    out.residual_variance = out.df > 0 ? rss / static_cast<double>(out.df) : 0.0;

    double y_mean = 0.0;
    for (double v : y) {
        y_mean += v;
    }
    y_mean /= static_cast<double>(n);
    double tss = 0.0;
    for (double v : y) {
        tss += (v - y_mean) * (v - y_mean);
    }
    out.r_squared = tss > 0.0 ? 1.0 - rss / tss : (rss <= 1e-12 ? 1.0 : 0.0);

    // (X^T X)^-1 = R^-1 R^-T; invert the pr x pr upper triangle.
    std::vector<double> rinv(pr * pr, 0.0);  // column-major
    for (std::size_t j = pr; j-- > 0;) {
        rinv[j * pr + j] = 1.0 / a[j * n + j];
        for (std::size_t i = j; i-- > 0;) {
            double s = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) {
                s += a[k * n + i] * rinv[j * pr + k];
            }
            rinv[j * pr + i] = -s / a[i * n + i];
        }
    }

    out.terms.reserve(pr);
    out.coefficients = beta;
    out.std_errors.resize(pr);
    out.t_values.resize(pr);
    out.p_values.resize(pr);
    for (std::size_t i = 0; i < pr; ++i) {
        out.terms.push_back(terms[retained[i]]);
        double cov = 0.0;  // row i of R^-1 dotted with itself
        for (std::size_t j = i; j < pr; ++j) {
            cov += rinv[j * pr + i] * rinv[j * pr + i];
        }
        double se = std::sqrt(out.residual_variance * cov);
        out.std_errors[i] = se;
        if (se > 0.0 && out.df > 0) {
            out.t_values[i] = beta[i] / se;
            out.p_values[i] =
                student_t_two_sided_p(out.t_values[i], static_cast<double>(out.df));
        } else {
            out.t_values[i] = 0.0;
            out.p_values[i] = 1.0;
        }
    }
    return out;
}

RegressionReport regress_all(const Corpus& corpus, const std::vector<TriggerVector>& vectors,
                             const std::vector<Cohort>& cohorts) {
    RegressionReport report;

    std::vector<std::string> terms;
    terms.push_back("intercept");
    for (Construct c : all_constructs()) {
        terms.push_back(construct_name(c));
    }
    const std::size_t p = terms.size();

    for (Cohort cohort : {Cohort::Bot, Cohort::Human}) {
        // Gather this cohort's rows once; vectors are in tweet_id order so
        // the design matrix is deterministic.
        std::vector<const TriggerVector*> rows;
        std::vector<const TweetRecord*> tweets;
        for (const auto& tv : vectors) {
            const TweetRecord* t = corpus.find_tweet(tv.tweet_id);
            if (!t) {
                throw InvariantError("trigger vector for unknown tweet: " + tv.tweet_id);
            }
            std::size_t idx = static_cast<std::size_t>(t - corpus.tweets().data());
            if (cohorts[idx] == cohort) {
                rows.push_back(&tv);
                tweets.push_back(t);
            }
        }
        if (rows.empty()) {
            report.notices.push_back(std::string("no ") + cohort_name(cohort) +
                                     " tweets; models skipped");
            continue;
        }
        std::size_t n = rows.size();
        std::vector<double> x(n * p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            x[i * p] = 1.0;
            for (std::size_t c = 0; c < kConstructCount; ++c) {
                x[i * p + 1 + c] =
                    rows[i]->flags.construct_flag(static_cast<Construct>(c)) ? 1.0 : 0.0;
            }
        }
        for (const char* metric : kEngagementMetrics) {
            std::vector<double> y(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const TweetRecord* t = tweets[i];
                std::int64_t count = 0;
                if (std::string(metric) == "favorites") count = t->favorites;
                else if (std::string(metric) == "retweets") count = t->retweets;
                else if (std::string(metric) == "replies") count = t->replies;
                else count = t->quotes;
                y[i] = log_engagement(count);
            }
            RegressionModel model;
            model.cohort = cohort;
            model.metric = metric;
            model.fit = ols_fit(x, n, p, y, terms);
            report.models.push_back(std::move(model));
        }
    }
    return report;
}

CurveReport engagement_by_trigger_count(const Corpus& corpus,
                                        const std::vector<TriggerVector>& vectors,
                                        const std::vector<Cohort>& cohorts, Cohort which) {
    CurveReport report;
    for (const char* metric : kEngagementMetrics) {
        // trigger_count -> log engagement values
        std::array<std::vector<double>, kConstructCount + 1> groups;
        for (const auto& tv : vectors) {
            const TweetRecord* t = corpus.find_tweet(tv.tweet_id);
            if (!t) {
                throw InvariantError("trigger vector for unknown tweet: " + tv.tweet_id);
            }
            std::size_t idx = static_cast<std::size_t>(t - corpus.tweets().data());
            if (cohorts[idx] != which) {
                continue;
            }
            std::int64_t count = 0;
            if (std::string(metric) == "favorites") count = t->favorites;
            else if (std::string(metric) == "retweets") count = t->retweets;
            else if (std::string(metric) == "replies") count = t->replies;
            else count = t->quotes;
            groups[static_cast<std::size_t>(tv.flags.trigger_count())].push_back(
                log_engagement(count));
        }
        std::vector<CurveCell> cells;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].empty()) {
                continue;
            }
            CurveCell cell;
            cell.trigger_count = static_cast<int>(k);
            cell.n = groups[k].size();
            cell.mean_log = mean(groups[k]);
            cell.q1 = quantile(groups[k], 0.25);
            cell.median = quantile(groups[k], 0.5);
            cell.q3 = quantile(groups[k], 0.75);
            cells.push_back(cell);
        }
        report.by_metric[metric] = std::move(cells);
    }
    return report;
}

namespace {

StatRow make_row(const std::string& name, const std::vector<double>& values) {
    StatRow row;
    row.name = name;
    if (!values.empty()) {
        row.mean = mean(values);
        row.median = median(values);
        row.stddev = population_stddev(values);
    }
    return row;
}

}  // namespace

DescriptiveStats descriptive_stats(const Corpus& corpus, const std::vector<Cohort>& cohorts,
                                   const Lexicon& lexicon) {
    DescriptiveStats out;
    for (Cohort cohort : {Cohort::Bot, Cohort::Human}) {
        std::vector<double> favorites, retweets, replies, quotes, engagement;
        std::vector<double> emotion_words, negative_words;
        std::unordered_map<std::string, std::size_t> tweets_per_user, shares_per_user;
        for (std::size_t i = 0; i < corpus.tweets().size(); ++i) {
            if (cohorts[i] != cohort) {
                continue;
            }
            const TweetRecord& t = corpus.tweets()[i];
            favorites.push_back(static_cast<double>(t.favorites));
            retweets.push_back(static_cast<double>(t.retweets));
            replies.push_back(static_cast<double>(t.replies));
            quotes.push_back(static_cast<double>(t.quotes));
            engagement.push_back(
                static_cast<double>(t.favorites + t.retweets + t.replies + t.quotes));
            auto tokens = tokenize(t.text);
            emotion_words.push_back(
                static_cast<double>(lexicon.count_category(tokens, LexCategory::Emotion)));
            negative_words.push_back(
                static_cast<double>(lexicon.count_category(tokens, LexCategory::Negative)));
            ++tweets_per_user[t.author_id];
            if (is_share(t)) {
                ++shares_per_user[t.author_id];
            }
        }
        if (favorites.empty()) {
            continue;
        }
        std::vector<double> per_user_tweets, per_user_shares;
        for (const auto& [user, count] : tweets_per_user) {
            per_user_tweets.push_back(static_cast<double>(count));
            auto it = shares_per_user.find(user);
            per_user_shares.push_back(
                it == shares_per_user.end() ? 0.0 : static_cast<double>(it->second));
        }
        // Map iteration order is not deterministic across platforms for
        // unordered_map; sort so mean/median see a canonical order.
        std::sort(per_user_tweets.begin(), per_user_tweets.end());
        std::sort(per_user_shares.begin(), per_user_shares.end());

        std::vector<StatRow> rows;
        rows.push_back(make_row("favorites_per_tweet", favorites));
        rows.push_back(make_row("retweets_per_tweet", retweets));
        rows.push_back(make_row("replies_per_tweet", replies));
        rows.push_back(make_row("quotes_per_tweet", quotes));
        rows.push_back(make_row("engagement_per_tweet", engagement));
        rows.push_back(make_row("emotion_words_per_tweet", emotion_words));
        rows.push_back(make_row("negative_words_per_tweet", negative_words));
        rows.push_back(make_row("tweets_per_user", per_user_tweets));
        rows.push_back(make_row("shares_per_user", per_user_shares));
        out.by_cohort[cohort_name(cohort)] = std::move(rows);
    }
    return out;
}

}  // namespace biaslens
