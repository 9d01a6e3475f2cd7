#include "locomode/trial.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "locomode/error.hpp"

namespace locomode {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_sample(const std::string& text, const std::string& column, std::size_t row) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw Error(ErrorKind::NonFiniteSample,
                "column " + column + ", row " + std::to_string(row) + ": '" + text + "'");
  }
  return v;
}

// Shortest-exact formatting for doubles: %.17g always round-trips.
void append_double(std::string& out, double v) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

void validate_trial(const Trial& trial) {
  const auto frames = static_cast<std::size_t>(trial.signal.rows());
  if (trial.signal.cols() != kChannelCount)
    throw Error(ErrorKind::ChannelMismatch,
                "trial has " + std::to_string(trial.signal.cols()) + " channels, expected 36");
  if (trial.labels.size() != frames || trial.sublabels.size() != frames)
    throw Error(ErrorKind::LengthMismatch, "label count does not match frame count");
  if (trial.sample_rate != kSampleRateHz)
    throw Error(ErrorKind::TypeError, "sample rate must be 100 Hz");
  for (std::size_t i = 0; i < frames; ++i) {
    if (trial.sublabels[i] != SubLabel::None && trial.labels[i] != TaskCategory::LW)
      throw Error(ErrorKind::BadLabel,
                  "row " + std::to_string(i) + ": sublabel on non-LW frame");
  }
  if (!trial.signal.allFinite())
    throw Error(ErrorKind::NonFiniteSample, "signal contains NaN or Inf");
}

Trial load_trial(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line))
    throw Error(ErrorKind::IoFailure, "empty file " + path.string());
  const std::vector<std::string> header = split_csv_line(header_line);

  // Map file columns onto canonical positions.
  const auto& names = channel_names();
  std::unordered_map<std::string, int> canonical;
  for (int c = 0; c < kChannelCount; ++c) canonical[names[c]] = c;

  int t_col = -1, label_col = -1, sublabel_col = -1;
  std::vector<int> channel_of_column(header.size(), -1);
  std::vector<bool> seen(kChannelCount, false);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    if (name == "t") {
      t_col = static_cast<int>(i);
    } else if (name == "label") {
      label_col = static_cast<int>(i);
    } else if (name == "sublabel") {
      sublabel_col = static_cast<int>(i);
    } else {
      auto it = canonical.find(name);
      if (it == canonical.end())
        throw Error(ErrorKind::MissingChannel, "unknown column '" + name + "'");
      if (seen[static_cast<std::size_t>(it->second)])
        throw Error(ErrorKind::MissingChannel, "duplicate column '" + name + "'");
      seen[static_cast<std::size_t>(it->second)] = true;
      channel_of_column[i] = it->second;
    }
  }
  if (t_col < 0) throw Error(ErrorKind::MissingChannel, "t");
  if (label_col < 0) throw Error(ErrorKind::MissingChannel, "label");
  if (sublabel_col < 0) throw Error(ErrorKind::MissingChannel, "sublabel");
  for (int c = 0; c < kChannelCount; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw Error(ErrorKind::MissingChannel, names[static_cast<std::size_t>(c)]);

  std::vector<std::array<double, kChannelCount>> rows;
  std::vector<TaskCategory> labels;
  std::vector<SubLabel> sublabels;
  double prev_t = 0.0;
  std::string line;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(ErrorKind::LengthMismatch,
                  "row " + std::to_string(row_index) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));

    double t = parse_sample(fields[static_cast<std::size_t>(t_col)], "t", row_index);
    if (row_index > 0 && std::abs(t - prev_t - 0.01) > 1e-9)
      throw Error(ErrorKind::NonMonotonicTime,
                  "row " + std::to_string(row_index) + ": t=" +
                      fields[static_cast<std::size_t>(t_col)] +
                      " does not advance by 0.01 s");
    prev_t = t;

    std::array<double, kChannelCount> row{};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      int c = channel_of_column[i];
      if (c >= 0)
        row[static_cast<std::size_t>(c)] =
            parse_sample(fields[i], header[i], row_index);
    }
    rows.push_back(row);

    auto label = parse_task_category(fields[static_cast<std::size_t>(label_col)]);
    if (!label)
      throw Error(ErrorKind::BadLabel,
                  "row " + std::to_string(row_index) + ": label '" +
                      fields[static_cast<std::size_t>(label_col)] + "'");
    auto sub = parse_sublabel(fields[static_cast<std::size_t>(sublabel_col)]);
    if (!sub)
      throw Error(ErrorKind::BadLabel,
                  "row " + std::to_string(row_index) + ": sublabel '" +
                      fields[static_cast<std::size_t>(sublabel_col)] + "'");
    if (*sub != SubLabel::None && *label != TaskCategory::LW)
      throw Error(ErrorKind::BadLabel,
                  "row " + std::to_string(row_index) + ": sublabel " +
                      std::string(to_string(*sub)) + " on label " +
                      std::string(to_string(*label)));
    labels.push_back(*label);
    sublabels.push_back(*sub);
    ++row_index;
  }

  Trial trial;
  trial.signal.resize(static_cast<Eigen::Index>(rows.size()), kChannelCount);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < kChannelCount; ++c)
      trial.signal(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  trial.labels = std::move(labels);
  trial.sublabels = std::move(sublabels);
  validate_trial(trial);
  return trial;
}

void save_trial(const Trial& trial, const std::filesystem::path& path) {
  validate_trial(trial);
  std::string out;
  out.reserve(static_cast<std::size_t>(trial.frames()) * 24 * (kChannelCount + 3));

  out += "t";
  for (const auto& name : channel_names()) {
    out += ',';
    out += name;
  }
  out += ",label,sublabel\n";

  char tbuf[32];
  for (Eigen::Index r = 0; r < trial.frames(); ++r) {
    std::snprintf(tbuf, sizeof tbuf, "%.2f", static_cast<double>(r) / 100.0);
    out += tbuf;
    for (int c = 0; c < kChannelCount; ++c) {
      out += ',';
      append_double(out, trial.signal(r, c));
    }
    out += ',';
    out += to_string(trial.labels[static_cast<std::size_t>(r)]);
    out += ',';
    out += to_string(trial.sublabels[static_cast<std::size_t>(r)]);
    out += '\n';
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  file << out;
  if (!file) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

namespace {

constexpr const char* kManifestHeader =
    "subject_id,cohort,trial_id,path,leading_leg,circuit_order,handrail";

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::IoFailure, "empty manifest " + path.string());

  std::vector<ManifestEntry> entries;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7)
      throw Error(ErrorKind::LengthMismatch,
                  "manifest row " + std::to_string(row) + ": expected 7 fields");
    ManifestEntry e;
    e.subject_id = fields[0];
    auto cohort = parse_cohort(fields[1]);
    auto leg = parse_leg(fields[4]);
    auto order = parse_circuit_order(fields[5]);
    if (!cohort || !leg || !order || (fields[6] != "true" && fields[6] != "false"))
      throw Error(ErrorKind::TypeError, "manifest row " + std::to_string(row));
    e.cohort = *cohort;
    e.trial_id = fields[2];
    e.path = fields[3];
    e.leading_leg = *leg;
    e.circuit_order = *order;
    e.handrail = fields[6] == "true";
    entries.push_back(std::move(e));
    ++row;
  }
  return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << kManifestHeader << "\n";
  for (const auto& e : entries) {
    out << e.subject_id << ',' << to_string(e.cohort) << ',' << e.trial_id << ','
        << e.path << ',' << to_string(e.leading_leg) << ','
        << to_string(e.circuit_order) << ',' << (e.handrail ? "true" : "false")
        << "\n";
  }
  if (!out) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  Dataset dataset;
  const auto base = manifest_path.parent_path();
  for (const auto& entry : load_manifest(manifest_path)) {
    std::filesystem::path trial_path(entry.path);
    if (trial_path.is_relative()) trial_path = base / trial_path;
    Trial trial = load_trial(trial_path);
    trial.subject_id = entry.subject_id;
    trial.cohort = entry.cohort;
    trial.trial_id = entry.trial_id;
    trial.leading_leg = entry.leading_leg;
    trial.circuit_order = entry.circuit_order;
    trial.handrail = entry.handrail;
    dataset.trials.push_back(std::move(trial));
  }
  return dataset;
}

}  // namespace locomode
