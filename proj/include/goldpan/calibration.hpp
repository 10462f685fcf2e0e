#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "goldpan/core.hpp"

namespace goldpan {

// One calibration trial: where the gold item sat and which position the
// model cited (absent citation = the model cited nothing, which counts as a
// negative observation for every position).
struct TrialRecord {
  std::string trial_id;
  std::size_t gold_position = 0;
  std::optional<std::size_t> cited_position;
  std::size_t n_positions = 0;
};

struct PositionEstimate {
  std::optional<double> tpr;  // undefined when n_gold_trials == 0
  std::optional<double> fpr;  // undefined when n_nongold_trials == 0
  std::size_t n_gold_trials = 0;
  std::size_t n_nongold_trials = 0;
};

struct ProfileFile {
  std::size_t n_positions = 0;
  std::vector<PositionEstimate> positions;
};

// Parse/schema failures carry the offending line (1-based, 0 = whole file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line)
      : std::runtime_error(std::move(message)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Unreadable/unwritable files, as opposed to malformed content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-position ratios:
//   tpr_j = #(cited j | gold at j) / #(gold at j)
//   fpr_j = #(cited j | gold elsewhere) / #(gold elsewhere)
// Zero-denominator positions are marked undefined. With smoothing, ratios
// become (num+1)/(den+2) so downstream Bayes updates never absorb.
ProfileFile estimate_profiles(const std::vector<TrialRecord>& records,
                              bool add_one_smoothing = false);

// JSON-lines trial log; see README for the record schema.
std::vector<TrialRecord> load_trial_log(const std::string& path);

// Profile file round-trips losslessly for defined estimates.
void save_profiles(const ProfileFile& profiles, const std::string& path);
ProfileFile load_profile_file(const std::string& path);

// Profiles as detectors. Undefined estimates fail the load unless fill_value
// is given, in which case they are substituted.
std::vector<DetectorProfile> load_profiles(const std::string& path,
                                           std::optional<double> fill_value = std::nullopt);

}  // namespace goldpan
