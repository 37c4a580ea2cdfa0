#pragma once

// Report writers. Every writer is a pure function from a report struct to
// a string, so outputs are bit-exact given identical inputs; file output
// goes through write_file_atomic (temp + rename) so partial runs never
// leave a corrupt report behind.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/analytics.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/simulator.hpp"
#include "biaslens/triggers.hpp"

namespace biaslens {

inline constexpr const char* kToolVersion = "0.1.0";

// Writes to `path + ".tmp"` and renames over `path`. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

// --- Trigger vector rows (JSON-lines) ---------------------------------------

nlohmann::ordered_json trigger_vector_to_json(const TriggerVector& v);
TriggerVector trigger_vector_from_json(const nlohmann::json& j);

std::string serialize_trigger_vectors(const std::vector<TriggerVector>& vectors);
// Throws IoError / ParseError (with line number).
std::vector<TriggerVector> load_trigger_vectors(const std::string& path);

// --- Corpus emission --------------------------------------------------------

std::string serialize_tweets(const std::vector<TweetRecord>& tweets);
std::string serialize_profiles(const std::vector<UserProfile>& profiles);

// --- Tabular reports --------------------------------------------------------

std::string prevalence_to_json(const PrevalenceReport& report);
std::string prevalence_to_csv(const PrevalenceReport& report);

std::string cooccurrence_to_json(const CooccurrenceMatrix& matrix);
std::string cooccurrence_to_csv(const CooccurrenceMatrix& matrix);
// Heatmap; linear color scale from white (0) to dark blue (the matrix
// maximum), documented in the file itself.
std::string cooccurrence_to_svg(const CooccurrenceMatrix& matrix);

std::string regression_to_json(const RegressionReport& report);
std::string regression_to_csv(const RegressionReport& report);

std::string curve_to_json(const CurveReport& report);
std::string curve_to_csv(const CurveReport& report);

std::string stats_to_json(const DescriptiveStats& stats);
std::string stats_to_csv(const DescriptiveStats& stats);

std::string confusion_to_json(const ConfusionReport& report);
std::string confusion_to_text(const ConfusionReport& report);

std::string threshold_audit_to_json(const ThresholdConfig& config);
std::string load_report_to_json(const LoadReport& report);

// --- Run manifest -----------------------------------------------------------

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string command;
    int jobs = 1;
    std::map<std::string, std::string> input_digests;    // label or path -> sha256
    std::map<std::string, std::string> lexicon_digests;  // file name -> sha256
    ThresholdConfig thresholds;
    std::vector<StageTiming> timings;  // excluded from determinism comparisons
};

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace biaslens
