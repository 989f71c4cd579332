#include "oran/xapps/slicing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oran/common/error.hpp"

namespace oran::xapps {

namespace {

std::vector<std::size_t> priority_order(const SlicingObjectives& obj, std::size_t slices) {
  std::vector<std::size_t> order;
  for (auto id : obj.priority) {
    if (id < slices && std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
  }
  for (std::size_t i = 0; i < slices; ++i) {
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  }
  return order;
}

std::string join(const PrbVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

PrbVector parse_vector(std::string_view text, std::size_t line) {
  PrbVector out;
  for (const auto& part : split(text, ',')) {
    const auto t = trim(part);
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
      fail(Errc::parse_error, "line " + std::to_string(line) + ": bad PRB value '" + std::string(t) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::not_found, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PrbVector PolicyModel::quantize(const PrbVector& demand) const {
  PrbVector q(demand.size());
  const auto s = std::max<std::uint32_t>(step, 1);
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const auto rounded = (demand[i] + s - 1) / s * s;
    q[i] = std::min(rounded, capacity / s * s);
  }
  return q;
}

const PrbVector& PolicyModel::lookup(const PrbVector& demand) const {
  if (table.empty()) fail(Errc::not_found, "model " + model_id + " has an empty table");
  const auto key = quantize(demand);
  if (auto it = table.find(key); it != table.end()) return it->second;
  const PrbVector* best = nullptr;
  std::uint64_t best_dist = 0;
  for (const auto& [k, v] : table) {
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < std::max(k.size(), key.size()); ++i) {
      const std::int64_t a = i < k.size() ? k[i] : 0;
      const std::int64_t b = i < key.size() ? key[i] : 0;
      d += static_cast<std::uint64_t>(std::llabs(a - b));
    }
    if (!best || d < best_dist) {
      best = &v;
      best_dist = d;
    }
  }
  return *best;
}

SlicingDecision decide_allocation(const PrbVector& demand, std::uint32_t capacity, const SlicingObjectives& objectives,
                                  const PolicyModel* model) {
  SlicingDecision out;
  if (model) {
    out.dedicated_prb = model->lookup(demand);
    out.dedicated_prb.resize(demand.size(), 0);
    return out;
  }
  const auto order = priority_order(objectives, demand.size());
  PrbVector grant(demand.size(), 0);
  std::uint32_t left = capacity;
  for (auto i : order) {
    grant[i] = std::min(demand[i], left);
    left -= grant[i];
  }
  std::uint64_t unmet_total = 0;
  for (std::size_t i = 0; i < demand.size(); ++i) unmet_total += demand[i] - grant[i];
  if (left > 0 && unmet_total > 0) {
    const auto pool = left;
    for (std::size_t i = 0; i < demand.size(); ++i) {
      const auto share = static_cast<std::uint32_t>(std::uint64_t{pool} * (demand[i] - grant[i]) / unmet_total);
      grant[i] += share;
      left -= share;
    }
    for (auto i : order) {
      if (left > 0 && grant[i] < demand[i]) {
        const auto extra = std::min(left, demand[i] - grant[i]);
        grant[i] += extra;
        left -= extra;
      }
    }
  }
  out.dedicated_prb = std::move(grant);
  return out;
}

std::string write_model_table(const PolicyModel& m) {
  std::string out;
  out += "model_id = " + m.model_id + "\n";
  out += "capacity = " + std::to_string(m.capacity) + "\n";
  out += "step = " + std::to_string(m.step) + "\n";
  out += "dataset_hash = " + m.dataset_hash + "\n";
  std::string scen;
  for (std::size_t i = 0; i < m.training_scenarios.size(); ++i) scen += (i ? ", " : "") + m.training_scenarios[i];
  out += "training_scenarios = " + scen + "\n";
  for (const auto& [k, v] : m.table) out += join(k) + " -> " + join(v) + "\n";
  return out;
}

PolicyModel read_model_table(std::string_view text) {
  PolicyModel m;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (auto arrow = line.find("->"); arrow != std::string_view::npos) {
      auto key = parse_vector(line.substr(0, arrow), line_no);
      auto val = parse_vector(line.substr(arrow + 2), line_no);
      if (key.size() != val.size()) {
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": demand and split differ in length");
      }
      m.table[std::move(key)] = std::move(val);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const std::string value(trim(line.substr(eq + 1)));
    try {
      if (key == "model_id") {
        m.model_id = value;
      } else if (key == "capacity") {
        m.capacity = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "step") {
        m.step = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "dataset_hash") {
        m.dataset_hash = value;
      } else if (key == "training_scenarios") {
        for (const auto& s : split(value, ',')) {
          if (!trim(s).empty()) m.training_scenarios.emplace_back(trim(s));
        }
      } else {
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
      }
    } catch (const std::logic_error&) {
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad number '" + value + "'");
    }
  }
  for (const auto& [k, v] : m.table) {
    std::uint64_t sum = 0;
    for (auto x : v) sum += x;
    if (sum > m.capacity) fail(Errc::parse_error, "split " + join(v) + " exceeds capacity");
  }
  return m;
}

PolicyModel load_model_dir(const std::string& model_path) {
  std::filesystem::path p(model_path);
  if (p.filename() == "model.tbl") p = p.parent_path();
  auto model = read_model_table(read_file(p / "model.tbl"));
  const auto manifest = p / "manifest.txt";
  if (!std::filesystem::exists(manifest)) return model;
  std::optional<double> pass_rate;
  std::vector<std::string> scenarios;
  for (const auto& raw : split(read_file(manifest), '\n')) {
    const auto line = trim(raw);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "pass_rate" && !value.empty()) pass_rate = std::stod(std::string(value));
    if (key == "validation_scenarios") {
      for (const auto& s : split(value, ',')) {
        if (!trim(s).empty()) scenarios.emplace_back(trim(s));
      }
    }
  }
  if (pass_rate) model.validation = ValidationRecord{*pass_rate, std::move(scenarios)};
  return model;
}

PolicyModel load_deployable_model(const std::string& model_path, double threshold) {
  auto model = load_model_dir(model_path);
  if (!model.validation) fail(Errc::model_rejected, "model " + model.model_id + " has no validation record");
  if (model.validation->pass_rate < threshold) {
    fail(Errc::model_rejected, "model " + model.model_id + " passed " + format_double(model.validation->pass_rate) +
                                   " of validation, below " + format_double(threshold));
  }
  return model;
}

}  // namespace oran::xapps
