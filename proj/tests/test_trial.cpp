#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "locomode/error.hpp"
#include "locomode/rng.hpp"
#include "locomode/trial.hpp"

using namespace locomode;
namespace fs = std::filesystem;

namespace {

// Scratch directory that cleans up after each test case.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("locomode_trial_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

Trial make_trial(Eigen::Index frames, std::uint64_t seed) {
  Trial t;
  t.subject_id = "hc01";
  t.trial_id = "t01";
  t.signal.resize(frames, 36);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < frames; ++i)
    for (Eigen::Index c = 0; c < 36; ++c) t.signal(i, c) = rng.normal(0.0, 2.0);
  t.labels.assign(static_cast<std::size_t>(frames), TaskCategory::LW);
  t.sublabels.assign(static_cast<std::size_t>(frames), SubLabel::None);
  // a plausible label timeline: LWp walk-in, stair ascent, platform walk
  for (Eigen::Index i = 0; i < frames; ++i) {
    auto j = static_cast<std::size_t>(i);
    if (i < frames / 4) {
      t.sublabels[j] = SubLabel::LWp;
    } else if (i < frames / 2) {
      t.labels[j] = TaskCategory::SA;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("trial CSV round-trips exactly") {
  TempDir dir;
  Trial t = make_trial(1200, 42);
  fs::path file = dir.path / "trial.csv";
  save_trial(t, file);

  Trial back = load_trial(file);
  REQUIRE(back.frames() == 1200);
  CHECK(back.signal == t.signal);  // bitwise: format prints round-trip digits
  CHECK(back.labels == t.labels);
  CHECK(back.sublabels == t.sublabels);

  // and a second save produces identical bytes
  fs::path file2 = dir.path / "trial2.csv";
  save_trial(back, file2);
  std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("channel columns are reordered into canonical order") {
  TempDir dir;
  Trial t = make_trial(120, 7);
  fs::path file = dir.path / "trial.csv";
  save_trial(t, file);

  // rewrite the file with the first two channel columns swapped
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();

  // split preserving trailing empty fields (rows with no sublabel end in ',')
  auto swap_fields = [](const std::string& row) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(row.substr(start));
        break;
      }
      fields.push_back(row.substr(start, comma - start));
      start = comma + 1;
    }
    std::swap(fields[1], fields[2]);  // field 0 is t
    std::string out = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) out += "," + fields[i];
    return out;
  };

  fs::path shuffled = dir.path / "shuffled.csv";
  std::ofstream out(shuffled);
  out << swap_fields(header) << "\n";
  for (const auto& line : lines) out << swap_fields(line) << "\n";
  out.close();

  Trial back = load_trial(shuffled);
  CHECK(back.signal == t.signal);
}

TEST_CASE("loader reports the offending column or row") {
  TempDir dir;
  Trial t = make_trial(80, 3);
  fs::path file = dir.path / "trial.csv";

  SUBCASE("missing channel column") {
    save_trial(t, file);
    std::ifstream in(file);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();

    // drop the foot_l_gyr_z column from every row
    std::vector<std::string> header;
    std::stringstream hs(lines[0]);
    for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
    std::size_t drop = 0;
    while (header[drop] != "foot_l_gyr_z") ++drop;

    std::ofstream out(file);
    for (const auto& line : lines) {
      std::vector<std::string> fields;
      std::stringstream ss(line);
      for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
      fields.erase(fields.begin() + static_cast<std::ptrdiff_t>(drop));
      for (std::size_t i = 0; i < fields.size(); ++i)
        out << fields[i] << (i + 1 < fields.size() ? "," : "\n");
    }
    out.close();

    try {
      load_trial(file);
      FAIL("expected MissingChannel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingChannel);
      CHECK(std::string(e.what()).find("foot_l_gyr_z") != std::string::npos);
    }
  }

  SUBCASE("sub-label on a non-LW frame") {
    t.labels[10] = TaskCategory::SA;
    t.sublabels[10] = SubLabel::LWp;
    CHECK_THROWS_AS(validate_trial(t), Error);
    // the CSV loader rejects the same row
    t.labels[10] = TaskCategory::LW;
    save_trial(t, file);
    std::ifstream in(file);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    auto comma = lines[11].rfind(",LW,");
    REQUIRE(comma != std::string::npos);
    lines[11].replace(comma, 4, ",SA,");
    std::ofstream out(file);
    for (const auto& line : lines) out << line << "\n";
    out.close();

    try {
      load_trial(file);
      FAIL("expected BadLabel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadLabel);
      CHECK(std::string(e.what()).find("10") != std::string::npos);
    }
  }

  SUBCASE("unknown label text") {
    save_trial(t, file);
    std::ifstream in(file);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    auto pos = content.find(",LW,");
    REQUIRE(pos != std::string::npos);
    content.replace(pos, 4, ",XX,");
    std::ofstream(file) << content;
    CHECK_THROWS_AS(load_trial(file), Error);
  }

  SUBCASE("non-monotonic timestamps") {
    save_trial(t, file);
    std::ifstream in(file);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    lines[5] = "0.99" + lines[5].substr(lines[5].find(','));
    std::ofstream out(file);
    for (const auto& line : lines) out << line << "\n";
    out.close();

    try {
      load_trial(file);
      FAIL("expected NonMonotonicTime");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonMonotonicTime);
    }
  }

  SUBCASE("non-finite sample") {
    t.signal(20, 4) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(save_trial(t, file), Error);  // save validates too
    t.signal(20, 4) = 0.0;
    save_trial(t, file);
    std::ifstream in(file);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    auto pos = content.find("\n0.20,");
    REQUIRE(pos != std::string::npos);
    pos = content.find(',', pos + 1);
    auto end = content.find(',', pos + 1);
    content.replace(pos + 1, end - pos - 1, "nan");
    std::ofstream(file) << content;

    try {
      load_trial(file);
      FAIL("expected NonFiniteSample");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonFiniteSample);
    }
  }
}

TEST_CASE("manifest round-trips and the dataset loader attaches metadata") {
  TempDir dir;
  Trial t1 = make_trial(200, 1);
  Trial t2 = make_trial(150, 2);
  fs::create_directories(dir.path / "trials");
  save_trial(t1, dir.path / "trials" / "hc01_t01.csv");
  save_trial(t2, dir.path / "trials" / "pd01_t01.csv");

  std::vector<ManifestEntry> entries(2);
  entries[0] = {"hc01", Cohort::Healthy, "t01", "trials/hc01_t01.csv",
                Leg::Left, CircuitOrder::SaFirst, false};
  entries[1] = {"pd01", Cohort::Pd, "t01", "trials/pd01_t01.csv",
                Leg::Right, CircuitOrder::RaFirst, true};
  fs::path manifest = dir.path / "manifest.csv";
  save_manifest(entries, manifest);

  auto back = load_manifest(manifest);
  REQUIRE(back.size() == 2);
  CHECK(back[1].subject_id == "pd01");
  CHECK(back[1].cohort == Cohort::Pd);
  CHECK(back[1].leading_leg == Leg::Right);
  CHECK(back[1].circuit_order == CircuitOrder::RaFirst);
  CHECK(back[1].handrail == true);

  Dataset ds = load_dataset(manifest);
  REQUIRE(ds.trials.size() == 2);
  CHECK(ds.trials[0].subject_id == "hc01");
  CHECK(ds.trials[0].cohort == Cohort::Healthy);
  CHECK(ds.trials[0].frames() == 200);
  CHECK(ds.trials[1].subject_id == "pd01");
  CHECK(ds.trials[1].handrail == true);
  CHECK(ds.trials[1].signal == t2.signal);
}
