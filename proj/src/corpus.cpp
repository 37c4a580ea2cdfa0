#include "biaslens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "biaslens/errors.hpp"
#include "biaslens/lexicon.hpp"

namespace biaslens {

using nlohmann::json;

const char* cohort_name(Cohort c) {
    switch (c) {
        case Cohort::Bot: return "bot";
        case Cohort::Human: return "human";
        case Cohort::Unknown: return "unknown";
    }
    return "unknown";
}

Cohort classify_account(double bot_score, double cutoff) {
    if (!(bot_score >= 0.0 && bot_score <= 1.0)) {
        throw DomainError("bot_score outside [0,1]");
    }
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) {
        throw DomainError("bot cutoff outside [0,1]");
    }
    return bot_score >= cutoff ? Cohort::Bot : Cohort::Human;
}

double log_engagement(std::int64_t count) {
    if (count < 0) {
        throw DomainError("negative engagement count");
    }
    return std::log1p(static_cast<double>(count));
}

bool is_share(const TweetRecord& t) {
    return t.retweeted_tweet_id.has_value() || t.quoted_tweet_id.has_value();
}

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string share_key(const TweetRecord& t) {
    if (t.retweeted_tweet_id && !t.retweeted_tweet_id->empty()) {
        return "id:" + *t.retweeted_tweet_id;
    }
    if (t.quoted_tweet_id && !t.quoted_tweet_id->empty()) {
        return "id:" + *t.quoted_tweet_id;
    }
    return "text:" + trim_copy(t.text);
}

std::optional<std::string> share_source_id(const TweetRecord& t) {
    if (t.retweeted_tweet_id && !t.retweeted_tweet_id->empty()) {
        return t.retweeted_tweet_id;
    }
    if (t.quoted_tweet_id && !t.quoted_tweet_id->empty()) {
        return t.quoted_tweet_id;
    }
    return std::nullopt;
}

namespace {

std::string require_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        throw ParseError(std::string("missing required field: ") + key);
    }
    if (!it->is_string()) {
        throw ParseError(std::string("malformed value for field: ") + key);
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw ParseError(std::string("malformed value for field: ") + key);
    }
    return it->get<std::string>();
}

std::int64_t count_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return 0;
    }
    if (!it->is_number_integer()) {
        throw ParseError(std::string("malformed value for field: ") + key);
    }
    std::int64_t v = it->get<std::int64_t>();
    if (v < 0) {
        throw ParseError(std::string("negative count for field: ") + key);
    }
    return v;
}

}  // namespace

TweetRecord parse_tweet_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw ParseError("malformed JSON");
    }
    if (!j.is_object()) {
        throw ParseError("line is not a JSON object");
    }
    TweetRecord t;
    t.tweet_id = require_string(j, "tweet_id");
    t.author_id = require_string(j, "author_id");
    auto ts = j.find("timestamp");
    if (ts == j.end() || ts->is_null()) {
        throw ParseError("missing required field: timestamp");
    }
    if (!ts->is_number_integer()) {
        throw ParseError("malformed value for field: timestamp");
    }
    t.timestamp = ts->get<std::int64_t>();
    auto text = j.find("text");
    if (text == j.end() || text->is_null()) {
        throw ParseError("missing required field: text");
    }
    if (!text->is_string()) {
        throw ParseError("malformed value for field: text");
    }
    t.text = text->get<std::string>();
    t.retweeted_tweet_id = optional_string(j, "retweeted_tweet_id");
    t.quoted_tweet_id = optional_string(j, "quoted_tweet_id");
    t.replied_to_tweet_id = optional_string(j, "replied_to_tweet_id");
    auto mentions = j.find("mentioned_user_ids");
    if (mentions != j.end() && !mentions->is_null()) {
        if (!mentions->is_array()) {
            throw ParseError("malformed value for field: mentioned_user_ids");
        }
        for (const auto& m : *mentions) {
            if (!m.is_string()) {
                throw ParseError("malformed value for field: mentioned_user_ids");
            }
            t.mentioned_user_ids.push_back(m.get<std::string>());
        }
    }
    t.favorites = count_field(j, "favorites");
    t.retweets = count_field(j, "retweets");
    t.replies = count_field(j, "replies");
    t.quotes = count_field(j, "quotes");
    return t;
}

UserProfile parse_user_profile(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw ParseError("malformed JSON");
    }
    if (!j.is_object()) {
        throw ParseError("line is not a JSON object");
    }
    UserProfile p;
    p.user_id = require_string(j, "user_id");
    auto bio = optional_string(j, "bio");
    p.bio = bio.value_or("");
    auto score = j.find("bot_score");
    if (score != j.end() && !score->is_null()) {
        if (!score->is_number()) {
            throw ParseError("malformed value for field: bot_score");
        }
        double v = score->get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParseError("bot_score outside [0,1]");
        }
        p.bot_score = v;
    }
    return p;
}

std::string serialize_tweet_record(const TweetRecord& t) {
    json j;
    j["tweet_id"] = t.tweet_id;
    j["author_id"] = t.author_id;
    j["timestamp"] = t.timestamp;
    j["text"] = t.text;
    if (t.retweeted_tweet_id) j["retweeted_tweet_id"] = *t.retweeted_tweet_id;
    if (t.quoted_tweet_id) j["quoted_tweet_id"] = *t.quoted_tweet_id;
    if (t.replied_to_tweet_id) j["replied_to_tweet_id"] = *t.replied_to_tweet_id;
    j["mentioned_user_ids"] = t.mentioned_user_ids;
    j["favorites"] = t.favorites;
    j["retweets"] = t.retweets;
    j["replies"] = t.replies;
    j["quotes"] = t.quotes;
    return j.dump();
}

std::string serialize_user_profile(const UserProfile& p) {
    json j;
    j["user_id"] = p.user_id;
    j["bio"] = p.bio;
    if (p.bot_score) {
        j["bot_score"] = *p.bot_score;
    }
    return j.dump();
}

Corpus::Corpus(std::vector<TweetRecord> tweets, std::vector<UserProfile> profiles,
               LoadReport* report)
    : tweets_(std::move(tweets)), profiles_(std::move(profiles)) {
    tweet_index_.reserve(tweets_.size());
    for (std::size_t i = 0; i < tweets_.size(); ++i) {
        auto [it, inserted] = tweet_index_.emplace(tweets_[i].tweet_id, i);
        (void)it;
        if (!inserted) {
            throw DuplicateIdError("duplicate tweet_id: " + tweets_[i].tweet_id);
        }
    }
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        auto [it, inserted] = profile_index_.emplace(profiles_[i].user_id, i);
        (void)it;
        if (!inserted) {
            throw DuplicateIdError("duplicate user_id: " + profiles_[i].user_id);
        }
    }
    // Synthesize profiles for authors we have tweets but no profile for.
    for (const auto& t : tweets_) {
        if (!profile_index_.count(t.author_id)) {
            UserProfile p;
            p.user_id = t.author_id;
            profile_index_.emplace(p.user_id, profiles_.size());
            profiles_.push_back(std::move(p));
            if (report) {
                ++report->profiles_synthesized;
            }
        }
    }

    for (const auto& p : profiles_) {
        user_ids_.push_back(p.user_id);
    }
    std::sort(user_ids_.begin(), user_ids_.end());

    for (std::size_t i = 0; i < tweets_.size(); ++i) {
        timelines_[tweets_[i].author_id].push_back(i);
    }
    auto time_order = [this](std::size_t a, std::size_t b) {
        if (tweets_[a].timestamp != tweets_[b].timestamp) {
            return tweets_[a].timestamp < tweets_[b].timestamp;
        }
        return tweets_[a].tweet_id < tweets_[b].tweet_id;
    };
    for (auto& [user, line] : timelines_) {
        std::sort(line.begin(), line.end(), time_order);
    }

    id_order_.resize(tweets_.size());
    for (std::size_t i = 0; i < tweets_.size(); ++i) {
        id_order_[i] = i;
    }
    std::sort(id_order_.begin(), id_order_.end(), [this](std::size_t a, std::size_t b) {
        return tweets_[a].tweet_id < tweets_[b].tweet_id;
    });

    for (std::size_t i = 0; i < tweets_.size(); ++i) {
        const auto& t = tweets_[i];
        for (const auto& m : t.mentioned_user_ids) {
            mention_index_[m].push_back(i);
        }
        if (t.retweeted_tweet_id) target_index_[*t.retweeted_tweet_id].push_back(i);
        if (t.quoted_tweet_id) target_index_[*t.quoted_tweet_id].push_back(i);
        if (t.replied_to_tweet_id) target_index_[*t.replied_to_tweet_id].push_back(i);
    }
    for (auto& [key, vec] : mention_index_) {
        std::sort(vec.begin(), vec.end(), time_order);
    }
    for (auto& [key, vec] : target_index_) {
        std::sort(vec.begin(), vec.end(), time_order);
    }
}

const TweetRecord* Corpus::find_tweet(const std::string& tweet_id) const {
    auto it = tweet_index_.find(tweet_id);
    return it == tweet_index_.end() ? nullptr : &tweets_[it->second];
}

const UserProfile* Corpus::find_profile(const std::string& user_id) const {
    auto it = profile_index_.find(user_id);
    return it == profile_index_.end() ? nullptr : &profiles_[it->second];
}

const std::vector<std::size_t>& Corpus::timeline(const std::string& user_id) const {
    auto it = timelines_.find(user_id);
    return it == timelines_.end() ? empty_ : it->second;
}

const std::vector<std::size_t>* Corpus::mentions_of(const std::string& user_id) const {
    auto it = mention_index_.find(user_id);
    return it == mention_index_.end() ? nullptr : &it->second;
}

const std::vector<std::size_t>* Corpus::interactions_with(const std::string& tweet_id) const {
    auto it = target_index_.find(tweet_id);
    return it == target_index_.end() ? nullptr : &it->second;
}

void Corpus::annotate_profiles(const Lexicon& lexicon) {
    for (auto& p : profiles_) {
        auto terms = extract_profile_terms(p.bio, lexicon);
        p.affiliations = std::move(terms.affiliations);
        p.authority_terms = std::move(terms.authority_terms);
    }
}

Cohort Corpus::cohort_of(const std::string& user_id, double bot_cutoff) const {
    const UserProfile* p = find_profile(user_id);
    if (!p || !p->bot_score) {
        return Cohort::Unknown;
    }
    return classify_account(*p->bot_score, bot_cutoff);
}

namespace {

template <typename Parser, typename Record>
void load_jsonl(const std::string& path, Parser parse, std::vector<Record>& out,
                std::size_t& read, std::size_t& skipped,
                std::map<std::string, std::size_t>* reasons) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (trim_copy(line).empty()) {
            continue;
        }
        try {
            out.push_back(parse(line));
            ++read;
        } catch (const ParseError& e) {
            ++skipped;
            if (reasons) {
                ++(*reasons)[e.what()];
            }
        }
    }
}

}  // namespace

Corpus load_corpus(const std::string& tweet_path, const std::string& profile_path,
                   LoadReport* report) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    std::vector<TweetRecord> tweets;
    std::vector<UserProfile> profiles;
    load_jsonl(tweet_path, parse_tweet_record, tweets, rep.tweets_read, rep.tweets_skipped,
               &rep.skip_reasons);
    if (!profile_path.empty()) {
        load_jsonl(profile_path, parse_user_profile, profiles, rep.profiles_read,
                   rep.profiles_skipped, &rep.skip_reasons);
    }
    return Corpus(std::move(tweets), std::move(profiles), report);
}

}  // namespace biaslens
