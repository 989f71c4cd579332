#include "oran/mlops/mlops.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "oran/common/measurement.hpp"

namespace oran::mlops {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDemandMetric = "prb_requested";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(Errc::missing_file, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string column_name(const std::string& metric, std::uint32_t slice) {
  return metric + "/" + std::to_string(slice);
}

/// Measurement files of a run, kpm-monitor first, then PM files by name.
std::vector<fs::path> run_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (fs::exists(dir / "kpm.csv")) out.push_back(dir / "kpm.csv");
  std::vector<fs::path> pm;
  if (fs::exists(dir / "pm")) {
    for (const auto& e : fs::recursive_directory_iterator(dir / "pm")) {
      if (e.is_regular_file() && e.path().extension() == ".csv") pm.push_back(e.path());
    }
  }
  std::sort(pm.begin(), pm.end());
  out.insert(out.end(), pm.begin(), pm.end());
  return out;
}

std::string hash_rows(const std::vector<std::string>& columns, const std::vector<DataRow>& rows) {
  Fnv1a h;
  for (const auto& c : columns) h.add(c).add_u64(0);
  for (const auto& r : rows) {
    h.add(r.scenario).add_u64(0).add_i64(r.time_ms).add(r.node).add_u64(0).add_u64(r.cell);
    for (double v : r.values) h.add_double(v);
  }
  return h.hex();
}

}  // namespace

// --- collection ----------------------------------------------------------

std::size_t Dataset::slices() const {
  std::size_t n = 0;
  for (const auto& c : columns) {
    if (c.rfind(std::string(kDemandMetric) + "/", 0) == 0) {
      n = std::max<std::size_t>(n, std::stoul(c.substr(kDemandMetric.size() + 1)) + 1);
    }
  }
  return n;
}

xapps::PrbVector Dataset::demand(const DataRow& row) const {
  xapps::PrbVector d(slices(), 0);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    if (c.rfind(std::string(kDemandMetric) + "/", 0) != 0) continue;
    const auto s = std::stoul(c.substr(kDemandMetric.size() + 1));
    // same rounding as the slicing xApp applies to KPM values
    d[s] = static_cast<std::uint32_t>(std::max(0.0, std::ceil(row.values[i] - 1e-9)));
  }
  return d;
}

Dataset collect(const std::vector<DataRef>& refs) {
  if (refs.empty()) fail(Errc::empty_input, "no runs to collect");
  using Key = std::tuple<std::string, TimeMs, std::string, std::uint32_t>;
  std::map<Key, std::map<std::string, double>> merged;
  std::set<std::string> columns;

  for (const auto& ref : refs) {
    const fs::path dir(ref.run_dir);
    const auto report_path = dir / "report.json";
    if (!fs::exists(report_path)) fail(Errc::missing_file, report_path.string() + ": not a run directory");
    std::string scenario;
    try {
      scenario = nlohmann::json::parse(read_file(report_path)).at("scenario").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::parse_error, report_path.string() + ": " + e.what());
    }

    std::set<Key> before;
    for (const auto& [k, v] : merged) before.insert(k);
    for (const auto& file : run_files(dir)) {
      std::vector<MeasurementRow> rows;
      try {
        rows = parse_measurement_csv(read_file(file));
      } catch (const Error& e) {
        fail(Errc::parse_error, file.string() + ": " + e.what());
      }
      std::map<Key, std::map<std::string, double>> local;
      for (const auto& r : rows) {
        if (r.time_ms < ref.from_ms || r.time_ms >= ref.to_ms) continue;
        if (r.metric == kDemandMetric && r.value < 0) {
          fail(Errc::parse_error, file.string() + ": negative demand at t=" + std::to_string(r.time_ms));
        }
        local[{scenario, r.time_ms, r.node, r.cell}][column_name(r.metric, r.slice)] = r.value;
      }
      for (auto& [k, v] : local) {
        if (merged.contains(k)) continue;
        for (const auto& [c, x] : v) columns.insert(c);
        merged.emplace(k, std::move(v));
      }
    }
  }
  if (merged.empty()) fail(Errc::empty_input, "no measurement rows in the referenced runs");

  Dataset ds;
  ds.columns.assign(columns.begin(), columns.end());
  for (const auto& [k, v] : merged) {
    DataRow row{std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), {}};
    for (const auto& c : ds.columns) {
      const auto it = v.find(c);
      row.values.push_back(it == v.end() ? 0.0 : it->second);
    }
    ds.rows.push_back(std::move(row));
  }
  ds.hash = hash_rows(ds.columns, ds.rows);
  return ds;
}

Dataset collect_runs(const std::vector<std::string>& run_dirs) {
  std::vector<DataRef> refs;
  for (const auto& d : run_dirs) refs.push_back({d});
  return collect(refs);
}

Dataset prepare(const Dataset& raw) {
  if (raw.normalized()) return raw;
  Dataset out = raw;
  out.params.assign(raw.columns.size(), {});
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    auto& p = out.params[c];
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
      const double v = raw.rows[i].values[c];
      p.min = i == 0 ? v : std::min(p.min, v);
      p.max = i == 0 ? v : std::max(p.max, v);
    }
    for (auto& r : out.rows) {
      auto& v = r.values[c];
      v = p.max == p.min ? 0.0 : (v - p.min) / (p.max - p.min);
    }
  }
  return out;
}

Dataset denormalize(const Dataset& prepared) {
  if (!prepared.normalized()) return prepared;
  Dataset out = prepared;
  out.params.clear();
  for (auto& r : out.rows) {
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      const auto& p = prepared.params[c];
      r.values[c] = p.min + r.values[c] * (p.max - p.min);
    }
  }
  return out;
}

// --- training ------------------------------------------------------------

TrainedModel train(const Dataset& prepared, const TrainConfig& config, const std::vector<std::string>& scenarios) {
  if (config.step == 0) fail(Errc::invariant_violation, "quantization step must be positive");
  const auto raw = denormalize(prepared);
  const auto n = raw.slices();
  if (n == 0) fail(Errc::empty_input, "dataset has no demand columns");

  TrainedModel out;
  auto& m = out.model;
  m.capacity = config.capacity;
  m.step = config.step;
  m.dataset_hash = prepared.hash;
  m.training_scenarios = scenarios;

  std::set<xapps::PrbVector> cells;
  for (const auto& r : raw.rows) {
    auto d = raw.demand(r);
    for (auto& x : d) x = std::min(x, config.capacity);
    cells.insert(m.quantize(d));
  }
  const auto per_cell = partition_count(config.capacity, n);
  std::uint64_t budget = 0;
  for (const auto& c : cells) {
    std::uint64_t sum = 0;
    for (auto x : c) sum += x;
    if (sum > config.capacity) budget += per_cell;
  }
  if (budget > config.max_evaluations) {
    fail(Errc::grid_too_large, std::to_string(cells.size()) + " grid cells need " + std::to_string(budget) +
                                   " evaluations, above " + std::to_string(config.max_evaluations) +
                                   "; raise the quantization step");
  }

  const auto weights = priority_weights(config.objectives, n);
  for (const auto& c : cells) {
    const auto best = optimal_split(c, config.capacity, weights);
    m.table[c] = best.split;
    out.evaluated_per_cell[c] = best.evaluated;
    out.evaluated += best.evaluated;
  }
  m.model_id = model_id_for(m);
  return out;
}

std::string model_id_for(const xapps::PolicyModel& model) {
  Fnv1a h;
  h.add(model.dataset_hash).add_u64(model.capacity).add_u64(model.step);
  for (const auto& [k, v] : model.table) {
    for (auto x : k) h.add_u64(x);
    for (auto x : v) h.add_u64(x);
  }
  return "slicing-" + h.hex().substr(0, 12);
}

// --- validation ----------------------------------------------------------

xapps::ValidationRecord ValidationReport::record() const {
  xapps::ValidationRecord r;
  r.pass_rate = pass_rate;
  for (const auto& s : scenarios) r.scenarios.push_back(s.scenario);
  return r;
}

ValidationReport validate(const xapps::PolicyModel& model, const std::vector<harness::Scenario>& scenarios,
                          const ValidationConfig& config) {
  if (scenarios.empty()) fail(Errc::empty_input, "no validation scenarios, pass rate undefined");
  ValidationReport rep;
  std::size_t passed = 0;
  for (const auto& sc : scenarios) {
    if (std::none_of(sc.xapps.begin(), sc.xapps.end(), [](const auto& x) { return x.name == "slicing-control"; })) {
      fail(Errc::scenario_invalid, sc.source + ": validation needs slicing-control deployed");
    }
    harness::RunOptions opt;
    opt.catalog_dir = config.catalog_dir;
    opt.candidate_model = model;
    const auto r = harness::run(sc, opt);
    ScenarioResult res{sc.name, 0, 0, false};
    for (const auto& c : r.ran.cells) {
      res.scored_ticks += c.scored_ticks;
      res.violation_ticks += c.violation_ticks;
    }
    res.passed = static_cast<double>(res.violation_ticks) <= config.violation_budget * static_cast<double>(res.scored_ticks);
    passed += res.passed ? 1 : 0;
    rep.scenarios.push_back(res);
  }
  rep.pass_rate = static_cast<double>(passed) / static_cast<double>(scenarios.size());
  rep.passed = rep.pass_rate >= config.pass_threshold;
  return rep;
}

// --- catalog -------------------------------------------------------------

std::string_view to_string(ModelState s) {
  switch (s) {
    case ModelState::trained: return "trained";
    case ModelState::validated: return "validated";
    case ModelState::published: return "published";
  }
  return "?";
}

std::string write_manifest(const CatalogEntry& e) {
  std::string scenarios;
  if (e.validation) {
    for (const auto& s : e.validation->scenarios) scenarios += (scenarios.empty() ? "" : ", ") + s.scenario;
  }
  std::string training;
  for (const auto& s : e.model.training_scenarios) training += (training.empty() ? "" : ", ") + s;
  std::string out;
  out += "model_id = " + e.model.model_id + "\n";
  out += "state = " + std::string(to_string(e.state)) + "\n";
  out += "dataset_hash = " + e.model.dataset_hash + "\n";
  out += "pass_rate = " + (e.validation ? format_double(e.validation->pass_rate) : std::string()) + "\n";
  out += "created_at_ms = " + std::to_string(e.created_at_ms) + "\n";
  out += "capacity = " + std::to_string(e.model.capacity) + "\n";
  out += "step = " + std::to_string(e.model.step) + "\n";
  out += "training_scenarios = " + training + "\n";
  out += "validation_scenarios = " + scenarios + "\n";
  return out;
}

CatalogEntry& Catalog::entry(const std::string& model_id) {
  auto it = entries_.find(model_id);
  if (it == entries_.end()) fail(Errc::unknown_id, "no catalog entry " + model_id);
  return it->second;
}

const CatalogEntry* Catalog::find(const std::string& model_id) const {
  auto it = entries_.find(model_id);
  return it == entries_.end() ? nullptr : &it->second;
}

const CatalogEntry& Catalog::add_trained(xapps::PolicyModel model, TimeMs created_at_ms) {
  if (model.model_id.empty()) model.model_id = model_id_for(model);
  model.validation.reset();
  const auto id = model.model_id;
  if (entries_.contains(id)) fail(Errc::duplicate_id, "catalog entry " + id + " exists");
  CatalogEntry e;
  e.model = std::move(model);
  e.created_at_ms = created_at_ms;
  return entries_.emplace(id, std::move(e)).first->second;
}

const CatalogEntry& Catalog::record_validation(const std::string& model_id, ValidationReport report) {
  auto& e = entry(model_id);
  if (e.state == ModelState::published) fail(Errc::immutable_entry, model_id + " is published");
  e.state = report.pass_rate >= threshold_ ? ModelState::validated : ModelState::trained;
  e.model.validation = report.record();
  e.validation = std::move(report);
  return e;
}

const CatalogEntry& Catalog::publish(const std::string& model_id) {
  auto& e = entry(model_id);
  if (e.state == ModelState::published) fail(Errc::immutable_entry, model_id + " is already published");
  const auto target = fs::path(dir_) / model_id;
  if (fs::exists(target)) fail(Errc::immutable_entry, target.string() + " already exists");
  if (e.state != ModelState::validated) {
    fail(Errc::not_validated, model_id + " has not passed validation" +
                                  (e.validation ? " (pass rate " + format_double(e.validation->pass_rate) + ")" : ""));
  }

  fs::create_directories(dir_);
  const auto tmp = fs::path(dir_) / ("." + model_id + ".tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  e.state = ModelState::published;
  {
    std::ofstream(tmp / "model.tbl", std::ios::binary) << xapps::write_model_table(e.model);
    std::ofstream(tmp / "manifest.txt", std::ios::binary) << write_manifest(e);
  }
  fs::rename(tmp, target);
  return e;
}

std::string Catalog::model_path(const std::string& model_id) const {
  const auto p = fs::path(dir_) / model_id;
  const auto* e = find(model_id);
  const bool on_disk = fs::exists(p / "model.tbl") && fs::exists(p / "manifest.txt");
  if ((e && e->state != ModelState::published) || !on_disk) {
    fail(Errc::not_published, "model " + model_id + " is not published in " + dir_);
  }
  return p.string();
}

void Catalog::deploy(const std::string& model_id, ric::NearRtRic& ric, std::map<std::string, std::string> overrides) const {
  overrides["model_path"] = model_path(model_id);
  ric.deploy("slicing-control", overrides);
}

// --- monitoring ----------------------------------------------------------

void RetrainMonitor::observe(TimeMs now, std::uint64_t scored, std::uint64_t violated) {
  while (now >= window_start_ + window_ms_) {
    const auto ds = scored - scored_at_start_;
    const auto dv = violated - violated_at_start_;
    const double rate = ds == 0 ? 0.0 : static_cast<double>(dv) / static_cast<double>(ds);
    rates_.push_back(rate);
    const auto end = window_start_ + window_ms_;
    if (rate > threshold_) events_.push_back({window_start_, end, rate, {run_dir_, window_start_, end}});
    window_start_ = end;
    scored_at_start_ = scored;
    violated_at_start_ = violated;
  }
}

void RetrainMonitor::observe(const sim::RanSim& sim) {
  std::uint64_t scored = 0, violated = 0;
  for (const auto& c : sim.cells()) {
    const auto& st = sim.objective_stats(c.config.cell_id);
    scored += st.scored_ticks;
    violated += st.violation_ticks;
  }
  observe(sim.now(), scored, violated);
}

// --- pipeline ------------------------------------------------------------

std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const auto dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  const auto name = p.filename().string();
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && ::fnmatch(name.c_str(), e.path().filename().c_str(), 0) == 0) {
      out.push_back((p.parent_path() / e.path().filename()).string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrainResult train_pipeline(const TrainRequest& req) {
  const auto train_paths = expand_glob(req.train_glob);
  if (train_paths.empty()) fail(Errc::empty_input, "no scenarios match " + req.train_glob);
  const auto holdout_paths = expand_glob(req.holdout_glob);
  if (holdout_paths.empty()) fail(Errc::empty_input, "no scenarios match " + req.holdout_glob);

  std::vector<harness::Scenario> training, holdout;
  for (const auto& p : train_paths) training.push_back(harness::load_scenario(p, req.catalog_dir));
  for (const auto& p : holdout_paths) holdout.push_back(harness::load_scenario(p, req.catalog_dir));

  std::vector<std::string> run_dirs, names;
  TimeMs newest = 0;
  for (const auto& sc : training) {
    harness::RunOptions opt;
    opt.catalog_dir = req.catalog_dir;
    opt.out_dir = (fs::path(req.work_dir) / sc.name).string();
    fs::remove_all(opt.out_dir);
    harness::run(sc, opt);
    run_dirs.push_back(opt.out_dir);
    names.push_back(sc.name);
    newest = std::max(newest, sc.duration_ms);
  }

  const auto dataset = prepare(collect_runs(run_dirs));
  TrainConfig cfg;
  cfg.capacity = training.front().sim.nodes.front().cells.front().total_prb;
  cfg.step = req.step;
  cfg.objectives = training.front().sim.objectives;
  auto trained = train(dataset, cfg, names);

  Catalog catalog(req.catalog_dir);
  const auto id = catalog.add_trained(trained.model, newest).model.model_id;
  ValidationConfig vcfg;
  vcfg.catalog_dir = req.catalog_dir;
  auto report = validate(trained.model, holdout, vcfg);

  TrainResult res;
  res.dataset_hash = dataset.hash;
  res.rows = dataset.rows.size();
  res.model_id = id;
  res.entries = trained.model.table.size();
  res.validation = report;
  const auto& e = catalog.record_validation(id, std::move(report));
  if (e.state == ModelState::validated) {
    catalog.publish(id);
    res.published = true;
  }
  return res;
}

}  // namespace oran::mlops
