#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/common/bytes.hpp"
#include "oran/common/slicing.hpp"
#include "oran/harness/runner.hpp"
#include "oran/ric/ric.hpp"
#include "oran/xapps/slicing.hpp"

namespace oran::mlops {

// --- collection ----------------------------------------------------------

/// A slice of one run's measurements, [from_ms, to_ms).
struct DataRef {
  std::string run_dir;
  TimeMs from_ms = 0;
  TimeMs to_ms = INT64_MAX;
  bool operator==(const DataRef&) const = default;
};

struct DataRow {
  std::string scenario;
  TimeMs time_ms = 0;
  std::string node;
  std::uint32_t cell = 0;
  std::vector<double> values;  // one per Dataset::columns
  bool operator==(const DataRow&) const = default;
};

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const ColumnRange&) const = default;
};

/// Per-cell measurement rows. Columns are "<metric>/<slice>", sorted; the
/// demand columns are "prb_requested/<slice>".
struct Dataset {
  std::vector<std::string> columns;
  std::vector<DataRow> rows;  // sorted by (scenario, time, node, cell)
  std::string hash;           // over the raw rows
  std::vector<ColumnRange> params;  // empty until prepared

  bool normalized() const { return !params.empty(); }
  std::size_t slices() const;
  /// Demand columns of one row as PRBs. Needs raw values.
  xapps::PrbVector demand(const DataRow& row) const;
};

/// Reads kpm.csv and the O1 PM files of each run directory, keeps rows in
/// the referenced time range and merges them. A key seen twice keeps its
/// first occurrence. Throws empty_input without refs or rows, parse_error
/// naming the file on a bad CSV or a negative demand.
Dataset collect(const std::vector<DataRef>& refs);
Dataset collect_runs(const std::vector<std::string>& run_dirs);

/// Min-max scaling of every column to [0, 1]; constant columns map to 0.
Dataset prepare(const Dataset& raw);
Dataset denormalize(const Dataset& prepared);

// --- training ------------------------------------------------------------

struct TrainConfig {
  std::uint32_t capacity = 50;
  std::uint32_t step = 5;
  SlicingObjectives objectives;
  /// Budget of partitions evaluated over all grid cells.
  std::uint64_t max_evaluations = 20'000'000;
};

struct TrainedModel {
  xapps::PolicyModel model;
  std::uint64_t evaluated = 0;
  /// Partitions searched per grid cell; zero where demand fits capacity.
  std::map<xapps::PrbVector, std::uint64_t> evaluated_per_cell;
};

/// One table entry per quantized demand cell seen in the dataset, each the
/// exhaustive-search optimum for that cell. Throws grid_too_large when the
/// search would exceed max_evaluations.
TrainedModel train(const Dataset& prepared, const TrainConfig& config, const std::vector<std::string>& scenarios = {});

/// Id derived from the dataset hash and the table.
std::string model_id_for(const xapps::PolicyModel& model);

// --- validation ----------------------------------------------------------

struct ValidationConfig {
  double violation_budget = 0.05;  // per scenario, fraction of scored ticks
  double pass_threshold = 0.95;    // fraction of scenarios
  std::string catalog_dir = "catalog";
};

struct ScenarioResult {
  std::string scenario;
  std::uint64_t scored_ticks = 0;
  std::uint64_t violation_ticks = 0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<ScenarioResult> scenarios;
  double pass_rate = 0.0;
  bool passed = false;
  xapps::ValidationRecord record() const;
};

/// Runs every scenario with slicing-control driven by the model. Throws
/// empty_input for an empty list since no pass rate exists.
ValidationReport validate(const xapps::PolicyModel& model, const std::vector<harness::Scenario>& scenarios,
                          const ValidationConfig& config = {});

// --- catalog -------------------------------------------------------------

enum class ModelState { trained, validated, published };
std::string_view to_string(ModelState s);

struct CatalogEntry {
  xapps::PolicyModel model;
  ModelState state = ModelState::trained;
  TimeMs created_at_ms = 0;  // simulated time of the newest training run
  std::optional<ValidationReport> validation;
};

/// catalog/<model_id>/{model.tbl, manifest.txt}. Entries move trained ->
/// validated -> published and published ones never change.
class Catalog {
 public:
  explicit Catalog(std::string dir, double pass_threshold = 0.95) : dir_(std::move(dir)), threshold_(pass_threshold) {}

  /// Throws duplicate_id for a known id.
  const CatalogEntry& add_trained(xapps::PolicyModel model, TimeMs created_at_ms);
  /// Validated when the pass rate meets the threshold, else stays trained.
  /// Throws immutable_entry once published.
  const CatalogEntry& record_validation(const std::string& model_id, ValidationReport report);
  /// Writes the entry atomically. Throws not_validated, immutable_entry.
  const CatalogEntry& publish(const std::string& model_id);
  /// Model directory for deployment. Throws not_published.
  std::string model_path(const std::string& model_id) const;
  /// Hands the published model to slicing-control on the RIC.
  void deploy(const std::string& model_id, ric::NearRtRic& ric, std::map<std::string, std::string> overrides = {}) const;

  const CatalogEntry* find(const std::string& model_id) const;
  const std::string& dir() const noexcept { return dir_; }

 private:
  CatalogEntry& entry(const std::string& model_id);

  std::string dir_;
  double threshold_;
  std::map<std::string, CatalogEntry> entries_;
};

/// Manifest text, fixed key order.
std::string write_manifest(const CatalogEntry& entry);

// --- monitoring ----------------------------------------------------------

struct RetrainRequested {
  TimeMs window_start_ms = 0;
  TimeMs window_end_ms = 0;
  double violation_rate = 0.0;
  DataRef data;
};

/// Rolling violation rate over fixed windows of simulated time. Fed with
/// cumulative scored and violated tick counts after every tick.
class RetrainMonitor {
 public:
  RetrainMonitor(std::string run_dir, TimeMs window_ms = 5000, double threshold = 0.10)
      : run_dir_(std::move(run_dir)), window_ms_(window_ms), threshold_(threshold) {}

  void observe(TimeMs now, std::uint64_t scored, std::uint64_t violated);
  /// Observer for harness::RunOptions; totals over all cells.
  void observe(const sim::RanSim& sim);

  const std::vector<RetrainRequested>& events() const noexcept { return events_; }
  const std::vector<double>& window_rates() const noexcept { return rates_; }

 private:
  std::string run_dir_;
  TimeMs window_ms_;
  double threshold_;
  TimeMs window_start_ = 0;
  std::uint64_t scored_at_start_ = 0;
  std::uint64_t violated_at_start_ = 0;
  std::vector<RetrainRequested> events_;
  std::vector<double> rates_;
};

// --- pipeline ------------------------------------------------------------

struct TrainRequest {
  std::string train_glob;
  std::string holdout_glob = "scenarios/holdout-*.yaml";
  std::string catalog_dir = "catalog";
  std::string work_dir = "runs/train";
  std::uint32_t step = 5;
};

struct TrainResult {
  std::string dataset_hash;
  std::size_t rows = 0;
  std::string model_id;
  std::size_t entries = 0;
  ValidationReport validation;
  bool published = false;
};

/// Paths matching a glob whose wildcards sit in the file name, sorted.
std::vector<std::string> expand_glob(const std::string& pattern);

/// collect -> prepare -> train -> validate -> publish. Throws empty_input
/// when a glob matches nothing.
TrainResult train_pipeline(const TrainRequest& request);

}  // namespace oran::mlops
