#include "goldpan/calibration.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace goldpan {

using nlohmann::json;

ProfileFile estimate_profiles(const std::vector<TrialRecord>& records,
                              bool add_one_smoothing) {
  if (records.empty())
    throw ParseError("estimate_profiles: no records", 0);
  const std::size_t n = records.front().n_positions;
  if (n == 0) throw ParseError("estimate_profiles: n_positions must be >= 1", 0);

  std::vector<std::size_t> gold_count(n, 0), tp_count(n, 0), fp_count(n, 0);
  std::size_t line = 0;
  for (const auto& rec : records) {
    ++line;
    if (rec.n_positions != n)
      throw ParseError("estimate_profiles: mixed n_positions", line);
    if (rec.gold_position >= n)
      throw ParseError("estimate_profiles: gold_position out of range", line);
    if (rec.cited_position && *rec.cited_position >= n)
      throw ParseError("estimate_profiles: cited_position out of range", line);
    ++gold_count[rec.gold_position];
    if (rec.cited_position) {
      if (*rec.cited_position == rec.gold_position)
        ++tp_count[*rec.cited_position];
      else
        ++fp_count[*rec.cited_position];
    }
  }

  ProfileFile out;
  out.n_positions = n;
  out.positions.resize(n);
  const std::size_t total = records.size();
  for (std::size_t j = 0; j < n; ++j) {
    PositionEstimate& est = out.positions[j];
    est.n_gold_trials = gold_count[j];
    est.n_nongold_trials = total - gold_count[j];
    const double shift = add_one_smoothing ? 1.0 : 0.0;
    const double denom_pad = add_one_smoothing ? 2.0 : 0.0;
    if (est.n_gold_trials > 0 || add_one_smoothing)
      est.tpr = (static_cast<double>(tp_count[j]) + shift) /
                (static_cast<double>(est.n_gold_trials) + denom_pad);
    if (est.n_nongold_trials > 0 || add_one_smoothing)
      est.fpr = (static_cast<double>(fp_count[j]) + shift) /
                (static_cast<double>(est.n_nongold_trials) + denom_pad);
  }
  return out;
}

std::vector<TrialRecord> load_trial_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trial log: " + path);
  std::vector<TrialRecord> records;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("trial log: ") + e.what(), line);
    }
    TrialRecord out;
    try {
      out.trial_id = rec.at("trial_id").is_string()
                         ? rec.at("trial_id").get<std::string>()
                         : rec.at("trial_id").dump();
      out.gold_position = rec.at("gold_position").get<std::size_t>();
      out.n_positions = rec.at("n_positions").get<std::size_t>();
      if (rec.contains("cited_position") && !rec.at("cited_position").is_null())
        out.cited_position = rec.at("cited_position").get<std::size_t>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("trial log field: ") + e.what(), line);
    }
    if (out.n_positions == 0)
      throw ParseError("trial log: n_positions must be >= 1", line);
    if (out.gold_position >= out.n_positions)
      throw ParseError("trial log: gold_position out of range", line);
    if (out.cited_position && *out.cited_position >= out.n_positions)
      throw ParseError("trial log: cited_position out of range", line);
    records.push_back(std::move(out));
  }
  if (records.empty()) throw ParseError("trial log is empty: " + path, 0);
  return records;
}

void save_profiles(const ProfileFile& profiles, const std::string& path) {
  json doc;
  doc["n_positions"] = profiles.n_positions;
  doc["positions"] = json::array();
  for (std::size_t j = 0; j < profiles.positions.size(); ++j) {
    const PositionEstimate& est = profiles.positions[j];
    json entry;
    entry["position"] = j;
    entry["tpr"] = est.tpr ? json(*est.tpr) : json(nullptr);
    entry["fpr"] = est.fpr ? json(*est.fpr) : json(nullptr);
    entry["n_gold_trials"] = est.n_gold_trials;
    entry["n_nongold_trials"] = est.n_nongold_trials;
    doc["positions"].push_back(std::move(entry));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write profile file: " + path);
  out << doc.dump(2) << "\n";
}

ProfileFile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("profile file: ") + e.what(), 0);
  }

  ProfileFile out;
  try {
    out.n_positions = doc.at("n_positions").get<std::size_t>();
    const json& positions = doc.at("positions");
    if (!positions.is_array())
      throw ParseError("profile file: positions must be an array", 0);
    out.positions.resize(out.n_positions);
    std::vector<char> seen(out.n_positions, 0);
    for (const json& entry : positions) {
      const std::size_t j = entry.at("position").get<std::size_t>();
      if (j >= out.n_positions)
        throw ParseError("profile file: position index out of range", 0);
      seen[j] = 1;
      PositionEstimate& est = out.positions[j];
      if (!entry.at("tpr").is_null()) est.tpr = entry.at("tpr").get<double>();
      if (!entry.at("fpr").is_null()) est.fpr = entry.at("fpr").get<double>();
      est.n_gold_trials = entry.at("n_gold_trials").get<std::size_t>();
      est.n_nongold_trials = entry.at("n_nongold_trials").get<std::size_t>();
    }
    for (std::size_t j = 0; j < out.n_positions; ++j)
      if (!seen[j]) throw ParseError("profile file: missing position entry", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("profile file field: ") + e.what(), 0);
  }

  if (out.n_positions == 0 || out.positions.empty())
    throw ParseError("profile file: empty positions list", 0);
  for (const PositionEstimate& est : out.positions) {
    if (est.tpr && (*est.tpr < 0.0 || *est.tpr > 1.0))
      throw ParseError("profile file: tpr outside [0, 1]", 0);
    if (est.fpr && (*est.fpr < 0.0 || *est.fpr > 1.0))
      throw ParseError("profile file: fpr outside [0, 1]", 0);
  }
  return out;
}

std::vector<DetectorProfile> load_profiles(const std::string& path,
                                           std::optional<double> fill_value) {
  const ProfileFile file = load_profile_file(path);
  std::vector<DetectorProfile> out;
  out.reserve(file.positions.size());
  for (std::size_t j = 0; j < file.positions.size(); ++j) {
    const PositionEstimate& est = file.positions[j];
    if ((!est.tpr || !est.fpr) && !fill_value) {
      std::ostringstream msg;
      msg << "profile file: position " << j
          << " has an undefined estimate (pass a fill value to default it)";
      throw ParseError(msg.str(), 0);
    }
    out.push_back({est.tpr.value_or(fill_value.value_or(0.5)),
                   est.fpr.value_or(fill_value.value_or(0.5))});
  }
  return out;
}

}  // namespace goldpan
