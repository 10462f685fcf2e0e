#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "goldpan/calibration.hpp"
#include "goldpan/rng.hpp"

using namespace goldpan;

namespace {

TrialRecord make_record(std::size_t gold, std::optional<std::size_t> cited,
                        std::size_t n_positions, int serial) {
  TrialRecord r;
  r.trial_id = "t" + std::to_string(serial);
  r.gold_position = gold;
  r.cited_position = cited;
  r.n_positions = n_positions;
  return r;
}

// Single-citation generator whose marginals follow the observation model:
// cite the gold position with probability tpr_gold, otherwise cite each other
// position j with probability fpr_j, otherwise cite nothing. Requires
// tpr_g + sum_{j != g} fpr_j <= 1 for every g.
std::vector<TrialRecord> synthesize_log(const std::vector<double>& tpr,
                                        const std::vector<double>& fpr,
                                        int trials_per_position, Rng& rng) {
  const std::size_t p = tpr.size();
  for (std::size_t g = 0; g < p; ++g) {
    double budget = tpr[g];
    for (std::size_t j = 0; j < p; ++j)
      if (j != g) budget += fpr[j];
    REQUIRE(budget <= 1.0 + 1e-12);
  }
  std::vector<TrialRecord> records;
  int serial = 0;
  for (std::size_t g = 0; g < p; ++g) {
    for (int t = 0; t < trials_per_position; ++t) {
      double u = rng.uniform();
      std::optional<std::size_t> cited;
      if (u < tpr[g]) {
        cited = g;
      } else {
        u -= tpr[g];
        for (std::size_t j = 0; j < p && !cited; ++j) {
          if (j == g) continue;
          if (u < fpr[j]) cited = j;
          else u -= fpr[j];
        }
      }
      records.push_back(make_record(g, cited, p, serial++));
    }
  }
  return records;
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "goldpan_calib_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("estimate_profiles computes the two ratios") {
  std::vector<TrialRecord> records;
  int serial = 0;
  // gold at 0 in 10 trials, 7 cited correctly
  for (int i = 0; i < 7; ++i) records.push_back(make_record(0, 0, 2, serial++));
  for (int i = 0; i < 3; ++i) records.push_back(make_record(0, std::nullopt, 2, serial++));
  // gold at 1 in 90 trials, position 0 cited in 9 of them
  for (int i = 0; i < 9; ++i) records.push_back(make_record(1, 0, 2, serial++));
  for (int i = 0; i < 81; ++i) records.push_back(make_record(1, 1, 2, serial++));

  const ProfileFile out = estimate_profiles(records);
  REQUIRE(out.n_positions == 2);
  CHECK(*out.positions[0].tpr == doctest::Approx(0.7));
  CHECK(*out.positions[0].fpr == doctest::Approx(0.1));
  CHECK(out.positions[0].n_gold_trials == 10);
  CHECK(out.positions[0].n_nongold_trials == 90);
  CHECK(*out.positions[1].tpr == doctest::Approx(0.9));
}

TEST_CASE("estimate_profiles recovers known profiles from a synthetic log") {
  Rng rng(401);
  const std::vector<double> tpr = {0.8, 0.8};
  const std::vector<double> fpr = {0.15, 0.15};
  const auto records = synthesize_log(tpr, fpr, 10000, rng);
  const ProfileFile out = estimate_profiles(records);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(*out.positions[j].tpr - tpr[j]) < 0.02);
    CHECK(std::abs(*out.positions[j].fpr - fpr[j]) < 0.02);
  }
}

TEST_CASE("count conservation over the gold/non-gold split") {
  Rng rng(402);
  const std::vector<double> tpr = {0.5, 0.6, 0.7};
  const std::vector<double> fpr = {0.05, 0.05, 0.05};
  const auto records = synthesize_log(tpr, fpr, 50, rng);
  const ProfileFile out = estimate_profiles(records);
  std::size_t gold_total = 0, nongold_total = 0;
  for (const auto& est : out.positions) {
    gold_total += est.n_gold_trials;
    nongold_total += est.n_nongold_trials;
  }
  CHECK(gold_total == records.size());
  CHECK(nongold_total == records.size() * 2);
}

TEST_CASE("estimate_profiles input validation") {
  CHECK_THROWS_AS(estimate_profiles({}), ParseError);

  std::vector<TrialRecord> mixed = {make_record(0, 0, 2, 0), make_record(0, 0, 3, 1)};
  CHECK_THROWS_AS(estimate_profiles(mixed), ParseError);
}

TEST_CASE("zero-denominator positions are undefined, not defaulted") {
  // every gold at position 0: position 1 has no gold trials, position 0 no
  // non-gold trials
  std::vector<TrialRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back(make_record(0, 0, 2, i));
  const ProfileFile out = estimate_profiles(records);
  CHECK(out.positions[0].tpr.has_value());
  CHECK_FALSE(out.positions[0].fpr.has_value());
  CHECK_FALSE(out.positions[1].tpr.has_value());
  CHECK(out.positions[1].fpr.has_value());

  SUBCASE("smoothing defines every estimate") {
    const ProfileFile smoothed = estimate_profiles(records, true);
    REQUIRE(smoothed.positions[1].tpr.has_value());
    CHECK(*smoothed.positions[1].tpr == doctest::Approx(0.5));  // (0+1)/(0+2)
    CHECK(*smoothed.positions[0].tpr == doctest::Approx(6.0 / 7.0));
  }
}

TEST_CASE("a single-position log estimates one row") {
  std::vector<TrialRecord> records;
  for (int i = 0; i < 8; ++i) records.push_back(make_record(0, i < 6 ? std::optional<std::size_t>(0) : std::nullopt, 1, i));
  const ProfileFile out = estimate_profiles(records);
  REQUIRE(out.n_positions == 1);
  CHECK(*out.positions[0].tpr == doctest::Approx(0.75));
  CHECK_FALSE(out.positions[0].fpr.has_value());  // no gold-elsewhere trials exist
  CHECK(out.positions[0].n_nongold_trials == 0);
}

TEST_CASE("records without a citation count against every position") {
  std::vector<TrialRecord> records;
  for (int i = 0; i < 4; ++i) records.push_back(make_record(0, std::nullopt, 2, i));
  for (int i = 0; i < 4; ++i) records.push_back(make_record(1, 1, 2, 4 + i));
  const ProfileFile out = estimate_profiles(records);
  CHECK(*out.positions[0].tpr == 0.0);
  CHECK(*out.positions[0].fpr == 0.0);
  CHECK(out.positions[0].n_gold_trials == 4);
  CHECK(out.positions[0].n_nongold_trials == 4);
}

TEST_CASE("profile files round-trip losslessly") {
  Rng rng(403);
  const auto records = synthesize_log({0.7, 0.5}, {0.1, 0.2}, 200, rng);
  const ProfileFile original = estimate_profiles(records);
  const auto path = temp_file("roundtrip.json");
  save_profiles(original, path.string());
  const ProfileFile loaded = load_profile_file(path.string());

  REQUIRE(loaded.n_positions == original.n_positions);
  for (std::size_t j = 0; j < loaded.n_positions; ++j) {
    CHECK(*loaded.positions[j].tpr == *original.positions[j].tpr);
    CHECK(*loaded.positions[j].fpr == *original.positions[j].fpr);
    CHECK(loaded.positions[j].n_gold_trials == original.positions[j].n_gold_trials);
  }

  const auto detectors = load_profiles(path.string());
  REQUIRE(detectors.size() == 2);
  CHECK(detectors[0].tpr == *original.positions[0].tpr);
}

TEST_CASE("profile file validation") {
  SUBCASE("tpr outside [0,1] is a parse error") {
    const auto path = temp_file("bad_tpr.json");
    std::ofstream(path) << R"({"n_positions":1,"positions":[
      {"position":0,"tpr":1.2,"fpr":0.1,"n_gold_trials":5,"n_nongold_trials":5}]})";
    CHECK_THROWS_AS(load_profile_file(path.string()), ParseError);
  }
  SUBCASE("empty positions list is a schema error") {
    const auto path = temp_file("empty.json");
    std::ofstream(path) << R"({"n_positions":0,"positions":[]})";
    CHECK_THROWS_AS(load_profile_file(path.string()), ParseError);
  }
  SUBCASE("missing file is an i/o error") {
    CHECK_THROWS_AS(load_profile_file("/nonexistent/prof.json"), IoError);
  }
  SUBCASE("undefined estimates fail the detector load unless filled") {
    const auto path = temp_file("undef.json");
    std::ofstream(path) << R"({"n_positions":1,"positions":[
      {"position":0,"tpr":null,"fpr":0.1,"n_gold_trials":0,"n_nongold_trials":5}]})";
    CHECK_THROWS_AS(load_profiles(path.string()), ParseError);
    const auto filled = load_profiles(path.string(), 0.5);
    REQUIRE(filled.size() == 1);
    CHECK(filled[0].tpr == 0.5);
    CHECK(filled[0].fpr == 0.1);
  }
}

TEST_CASE("trial logs parse from JSON lines with line diagnostics") {
  SUBCASE("well-formed log") {
    const auto path = temp_file("log.jsonl");
    std::ofstream(path)
        << R"({"trial_id":"a","gold_position":0,"cited_position":1,"n_positions":2})"
        << "\n"
        << R"({"trial_id":"b","gold_position":1,"cited_position":null,"n_positions":2})"
        << "\n";
    const auto records = load_trial_log(path.string());
    REQUIRE(records.size() == 2);
    CHECK(records[0].cited_position == 1);
    CHECK_FALSE(records[1].cited_position.has_value());
  }
  SUBCASE("malformed line is reported with its number") {
    const auto path = temp_file("bad.jsonl");
    std::ofstream(path)
        << R"({"trial_id":"a","gold_position":0,"cited_position":0,"n_positions":2})"
        << "\n"
        << "not json\n";
    try {
      load_trial_log(path.string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("out-of-range positions are schema errors") {
    const auto path = temp_file("range.jsonl");
    std::ofstream(path)
        << R"({"trial_id":"a","gold_position":5,"cited_position":0,"n_positions":2})"
        << "\n";
    CHECK_THROWS_AS(load_trial_log(path.string()), ParseError);
  }
  SUBCASE("empty log is rejected") {
    const auto path = temp_file("empty.jsonl");
    std::ofstream(path) << "";
    CHECK_THROWS_AS(load_trial_log(path.string()), ParseError);
  }
}
