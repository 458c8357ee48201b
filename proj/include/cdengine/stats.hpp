#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdengine/tsv.hpp"

namespace cdengine {

// Named columns of optional text cells; numeric use parses on demand.
class DataTable {
 public:
  DataTable() = default;
  static DataTable from_tsv(const TsvTable& tsv);
  static DataTable read(const std::filesystem::path& path);

  void add_numeric(const std::string& name, const std::vector<std::optional<double>>& values);
  void add_text(const std::string& name, std::vector<std::optional<std::string>> values);

  std::size_t rows() const noexcept { return rows_; }
  bool has(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

  // Throws RegressionError for an unknown column or a non-numeric cell.
  std::optional<double> number(std::string_view column, std::size_t row) const;
  const std::optional<std::string>& text(std::string_view column, std::size_t row) const;

  // Rows where every listed column is present, as a new table.
  DataTable complete_rows(const std::vector<std::string>& columns, std::size_t* dropped = nullptr) const;

 private:
  const std::vector<std::optional<std::string>>& col(std::string_view name) const;

  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, std::vector<std::optional<std::string>>, std::less<>> columns_;
};

struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> covariates;
  std::vector<std::pair<std::string, std::string>> interactions;
  // Each expands to indicators with the first level (sorted) as reference.
  std::vector<std::string> fixed_effects;
  bool intercept = true;
  bool robust_se = true;
  // A group with more levels than this is absorbed by within-group demeaning.
  std::size_t absorb_cap = 2000;
};

struct FitResult {
  std::vector<std::string> terms;
  std::vector<double> coefficients;
  std::vector<double> std_errors;  // HC1 when robust, else classical
  std::vector<double> p_values;    // two-tailed, t with n - k dof
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;  // parameters, absorbed levels included
  std::size_t dropped_rows = 0;
  bool robust = true;

  // Design description used by predict().
  RegressionSpec spec;
  std::map<std::string, double> covariate_means;
  std::map<std::string, std::vector<std::string>> fe_levels;  // reference first
  std::map<std::string, std::vector<double>> fe_dummy_means;  // non-reference levels
  std::optional<std::string> absorbed_group;
  std::map<std::string, double> absorbed_effects;  // level -> intercept
  double absorbed_mean_effect = 0.0;

  std::optional<double> coefficient(std::string_view term) const;
};

// Listwise-deletes incomplete rows, then solves by Householder QR.
// Throws RegressionError on rank deficiency (naming the first collinear term) or n <= k.
FitResult ols_fit(const DataTable& data, const RegressionSpec& spec);

struct Profile {
  std::map<std::string, double> values;       // covariate -> value
  std::map<std::string, std::string> levels;  // fixed-effect group -> level
};

// A fixed-effect group absent from profile.levels enters at its sample dummy means.
std::vector<double> predict(const FitResult& fit, const std::vector<Profile>& profiles);

// One profile per level of `group`, other covariates at their sample means.
std::vector<std::pair<std::string, Profile>> level_profiles(const FitResult& fit, const std::string& group);

struct PredictorGroup {
  std::string name;
  std::vector<std::string> covariates;
  std::vector<std::string> fixed_effects;
};

enum class ShapleyMeasure { adjusted_r2, r2 };

struct ShapleyResult {
  std::vector<std::pair<std::string, double>> shares;
  double full_value = 0.0;
  std::vector<double> subset_values;  // indexed by group bitmask
  std::size_t n = 0;
};

// Shapley-Owen split of the full model's fit measure across predictor groups,
// from all 2^n subset models fitted on a common complete-case sample.
ShapleyResult shapley_owen(const DataTable& data, const std::string& outcome,
                           const std::vector<PredictorGroup>& groups,
                           ShapleyMeasure measure = ShapleyMeasure::adjusted_r2, unsigned threads = 1);

}  // namespace cdengine
