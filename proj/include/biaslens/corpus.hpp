#pragma once

// Corpus model: tweets, user profiles, per-user timelines, and the
// interaction indexes the network stage needs. A Corpus is immutable once
// loaded (annotate_profiles being the one post-load step), so all scan
// phases can read it concurrently without locks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace biaslens {

struct TweetRecord {
    std::string tweet_id;
    std::string author_id;
    std::int64_t timestamp = 0;  // seconds, UTC
    std::string text;
    std::optional<std::string> retweeted_tweet_id;
    std::optional<std::string> quoted_tweet_id;
    std::optional<std::string> replied_to_tweet_id;
    std::vector<std::string> mentioned_user_ids;
    std::int64_t favorites = 0;
    std::int64_t retweets = 0;
    std::int64_t replies = 0;
    std::int64_t quotes = 0;
};

struct UserProfile {
    std::string user_id;
    std::string bio;
    std::optional<double> bot_score;  // in [0,1] when present
    // Filled by annotate_profiles(): lexicon terms found in the bio.
    std::vector<std::string> affiliations;
    std::vector<std::string> authority_terms;
};

enum class Cohort { Bot, Human, Unknown };

const char* cohort_name(Cohort c);

// Bot iff score >= cutoff. Throws DomainError if score or cutoff is
// outside [0,1].
Cohort classify_account(double bot_score, double cutoff);

// ln(1 + count); throws DomainError on negative counts.
double log_engagement(std::int64_t count);

// Whether the tweet is a share (retweet or quote).
bool is_share(const TweetRecord& t);

// Grouping key for "shared the exact same tweet": the source tweet id when
// present, otherwise the tweet's trimmed text. Text comparison is byte
// exact; inputs are expected to be in a consistent Unicode normal form.
std::string share_key(const TweetRecord& t);

// Source tweet id of a share (retweet wins over quote if both are set).
std::optional<std::string> share_source_id(const TweetRecord& t);

// Parses one JSON line. Required fields: tweet_id, author_id, timestamp,
// text. Engagement counts default to 0; negative counts are rejected.
// Unknown fields are ignored. Throws ParseError.
TweetRecord parse_tweet_record(const std::string& line);

// Parses one profile JSON line: {user_id, bio?, bot_score?}.
UserProfile parse_user_profile(const std::string& line);

std::string serialize_tweet_record(const TweetRecord& t);
std::string serialize_user_profile(const UserProfile& p);

struct LoadReport {
    std::size_t tweets_read = 0;
    std::size_t tweets_skipped = 0;
    std::size_t profiles_read = 0;
    std::size_t profiles_skipped = 0;
    std::size_t profiles_synthesized = 0;
    // reason -> count, e.g. "missing required field" -> 3
    std::map<std::string, std::size_t> skip_reasons;
};

class Lexicon;

class Corpus {
  public:
    // Moves records in, indexes everything. Throws DuplicateIdError on a
    // repeated tweet_id or user_id. Authors without a profile get a
    // synthesized empty profile (cohort Unknown).
    Corpus(std::vector<TweetRecord> tweets, std::vector<UserProfile> profiles,
           LoadReport* report = nullptr);

    const std::vector<TweetRecord>& tweets() const { return tweets_; }
    const std::vector<UserProfile>& profiles() const { return profiles_; }

    const TweetRecord* find_tweet(const std::string& tweet_id) const;
    const UserProfile* find_profile(const std::string& user_id) const;

    // User ids in lexicographic order; each has a timeline (possibly empty
    // for profile-only users).
    const std::vector<std::string>& user_ids() const { return user_ids_; }

    // Tweet indexes for one user, ordered by (timestamp, tweet_id).
    const std::vector<std::size_t>& timeline(const std::string& user_id) const;

    // All tweet indexes ordered by tweet_id (canonical output order).
    const std::vector<std::size_t>& by_tweet_id_order() const { return id_order_; }

    // Tweets that mention the given user, and tweets that retweet/quote/
    // reply to the given tweet. Both ordered by (timestamp, tweet_id).
    const std::vector<std::size_t>* mentions_of(const std::string& user_id) const;
    const std::vector<std::size_t>* interactions_with(const std::string& tweet_id) const;

    // Fills profile affiliation/authority term lists from bios.
    void annotate_profiles(const Lexicon& lexicon);

    Cohort cohort_of(const std::string& user_id, double bot_cutoff) const;

  private:
    std::vector<TweetRecord> tweets_;
    std::vector<UserProfile> profiles_;
    std::unordered_map<std::string, std::size_t> tweet_index_;
    std::unordered_map<std::string, std::size_t> profile_index_;
    std::vector<std::string> user_ids_;
    std::unordered_map<std::string, std::vector<std::size_t>> timelines_;
    std::vector<std::size_t> id_order_;
    std::unordered_map<std::string, std::vector<std::size_t>> mention_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> target_index_;
    std::vector<std::size_t> empty_;
};

// Reads JSON-lines files. Malformed lines are skipped and counted in the
// report; duplicate ids are a hard error. profile_path may be empty, in
// which case every author gets a synthesized profile.
Corpus load_corpus(const std::string& tweet_path, const std::string& profile_path,
                   LoadReport* report = nullptr);

}  // namespace biaslens
