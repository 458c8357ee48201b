#include "cdengine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "cdengine/error.hpp"
#include "cdengine/parallel.hpp"

namespace cdengine {

DataTable DataTable::from_tsv(const TsvTable& tsv) {
  DataTable t;
  t.rows_ = tsv.rows.size();
  for (std::size_t c = 0; c < tsv.header.size(); ++c) {
    std::vector<std::optional<std::string>> col(tsv.rows.size());
    for (std::size_t r = 0; r < tsv.rows.size(); ++r) {
      const auto& cell = tsv.rows[r][c];
      if (!cell.empty() && cell != "NA") col[r] = cell;
    }
    t.add_text(tsv.header[c], std::move(col));
  }
  return t;
}

DataTable DataTable::read(const std::filesystem::path& path) { return from_tsv(read_tsv(path)); }

void DataTable::add_numeric(const std::string& name, const std::vector<std::optional<double>>& values) {
  std::vector<std::optional<std::string>> col(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) col[i] = format_double(*values[i]);
  }
  add_text(name, std::move(col));
}

void DataTable::add_text(const std::string& name, std::vector<std::optional<std::string>> values) {
  if (names_.empty() && columns_.empty()) rows_ = values.size();
  if (values.size() != rows_) throw RegressionError("column '" + name + "' has the wrong length");
  if (!columns_.count(name)) names_.push_back(name);
  columns_[name] = std::move(values);
}

bool DataTable::has(std::string_view name) const { return columns_.find(name) != columns_.end(); }

const std::vector<std::optional<std::string>>& DataTable::col(std::string_view name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw RegressionError("unknown column '" + std::string(name) + "'");
  return it->second;
}

std::optional<double> DataTable::number(std::string_view column, std::size_t row) const {
  const auto& cell = col(column)[row];
  if (!cell) return std::nullopt;
  auto v = parse_double(*cell);
  if (!v) throw RegressionError("column '" + std::string(column) + "' row " + std::to_string(row + 1) +
                                ": not a number '" + *cell + "'");
  return v;
}

const std::optional<std::string>& DataTable::text(std::string_view column, std::size_t row) const {
  return col(column)[row];
}

DataTable DataTable::complete_rows(const std::vector<std::string>& columns, std::size_t* dropped) const {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows_; ++r) {
    bool ok = true;
    for (const auto& c : columns) {
      if (!col(c)[r]) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(r);
  }
  if (dropped) *dropped = rows_ - keep.size();
  DataTable out;
  out.rows_ = keep.size();
  for (const auto& name : names_) {
    const auto& src = columns_.find(name)->second;
    std::vector<std::optional<std::string>> dst;
    dst.reserve(keep.size());
    for (auto r : keep) dst.push_back(src[r]);
    out.names_.push_back(name);
    out.columns_[name] = std::move(dst);
  }
  return out;
}

std::optional<double> FitResult::coefficient(std::string_view term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == term) return coefficients[i];
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> used_columns(const RegressionSpec& spec) {
  std::vector<std::string> cols{spec.outcome};
  auto add = [&](const std::string& c) {
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  };
  for (const auto& c : spec.covariates) add(c);
  for (const auto& [a, b] : spec.interactions) {
    add(a);
    add(b);
  }
  for (const auto& g : spec.fixed_effects) add(g);
  return cols;
}

std::string interaction_name(const std::pair<std::string, std::string>& p) { return p.first + ":" + p.second; }

double two_tailed_p(double t, double dof) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

}  // namespace

FitResult ols_fit(const DataTable& data, const RegressionSpec& spec) {
  if (spec.outcome.empty()) throw RegressionError("regression spec has no outcome");
  FitResult fit;
  fit.spec = spec;
  fit.robust = spec.robust_se;
  const DataTable d = data.complete_rows(used_columns(spec), &fit.dropped_rows);
  const std::size_t n = d.rows();
  fit.n = n;

  auto numeric = [&](const std::string& c) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) v[static_cast<Eigen::Index>(r)] = *d.number(c, r);
    return v;
  };
  const Eigen::VectorXd y = numeric(spec.outcome);

  // Fixed-effect levels; the largest group beyond the cap is absorbed.
  std::map<std::string, std::vector<std::size_t>> level_index;
  for (const auto& g : spec.fixed_effects) {
    std::set<std::string> levels;
    for (std::size_t r = 0; r < n; ++r) levels.insert(*d.text(g, r));
    fit.fe_levels[g] = std::vector<std::string>(levels.begin(), levels.end());
    auto& idx = level_index[g];
    idx.resize(n);
    const auto& lv = fit.fe_levels[g];
    for (std::size_t r = 0; r < n; ++r) {
      idx[r] = static_cast<std::size_t>(std::lower_bound(lv.begin(), lv.end(), *d.text(g, r)) - lv.begin());
    }
  }
  for (const auto& g : spec.fixed_effects) {
    if (fit.fe_levels[g].size() <= spec.absorb_cap) continue;
    if (fit.absorbed_group) {
      throw RegressionError("more than one fixed-effect group exceeds the indicator cap (" + *fit.absorbed_group +
                            ", " + g + ")");
    }
    fit.absorbed_group = g;
  }

  std::vector<Eigen::VectorXd> cols;
  const bool explicit_intercept = spec.intercept && !fit.absorbed_group;
  if (explicit_intercept) {
    cols.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
    fit.terms.push_back("(intercept)");
  }
  for (const auto& c : spec.covariates) {
    cols.push_back(numeric(c));
    fit.terms.push_back(c);
    fit.covariate_means[c] = n ? cols.back().mean() : 0.0;
  }
  for (const auto& p : spec.interactions) {
    for (const auto& c : {p.first, p.second}) {
      if (!fit.covariate_means.count(c)) fit.covariate_means[c] = n ? numeric(c).mean() : 0.0;
    }
    cols.push_back(numeric(p.first).cwiseProduct(numeric(p.second)));
    fit.terms.push_back(interaction_name(p));
  }
  for (const auto& g : spec.fixed_effects) {
    if (fit.absorbed_group && *fit.absorbed_group == g) continue;
    const auto& lv = fit.fe_levels[g];
    const auto& idx = level_index[g];
    auto& means = fit.fe_dummy_means[g];
    for (std::size_t l = 1; l < lv.size(); ++l) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) v[static_cast<Eigen::Index>(r)] = idx[r] == l ? 1.0 : 0.0;
      means.push_back(n ? v.mean() : 0.0);
      cols.push_back(std::move(v));
      fit.terms.push_back(g + "=" + lv[l]);
    }
  }

  const std::size_t absorbed_levels = fit.absorbed_group ? fit.fe_levels[*fit.absorbed_group].size() : 0;
  const std::size_t p = cols.size();
  fit.k = p + absorbed_levels;
  if (n <= fit.k) {
    throw RegressionError("need more observations than parameters (n=" + std::to_string(n) +
                          ", k=" + std::to_string(fit.k) + ")");
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) X.col(static_cast<Eigen::Index>(j)) = cols[j];
  Eigen::VectorXd yw = y;

  // Within transformation for the absorbed group.
  std::vector<double> group_y_mean;
  Eigen::MatrixXd group_x_mean;
  if (fit.absorbed_group) {
    const auto& idx = level_index[*fit.absorbed_group];
    std::vector<double> count(absorbed_levels, 0.0);
    group_y_mean.assign(absorbed_levels, 0.0);
    group_x_mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(absorbed_levels), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
      const auto l = static_cast<Eigen::Index>(idx[r]);
      count[idx[r]] += 1;
      group_y_mean[idx[r]] += y[static_cast<Eigen::Index>(r)];
      group_x_mean.row(l) += X.row(static_cast<Eigen::Index>(r));
    }
    for (std::size_t l = 0; l < absorbed_levels; ++l) {
      group_y_mean[l] /= count[l];
      group_x_mean.row(static_cast<Eigen::Index>(l)) /= count[l];
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto l = static_cast<Eigen::Index>(idx[r]);
      yw[static_cast<Eigen::Index>(r)] -= group_y_mean[idx[r]];
      X.row(static_cast<Eigen::Index>(r)) -= group_x_mean.row(l);
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::MatrixXd xtx_inv = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  if (p > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::MatrixXd R =
        qr.matrixQR().topRows(static_cast<Eigen::Index>(p)).triangularView<Eigen::Upper>();
    // Without pivoting, a near-zero R_jj means column j lies in the span of the columns before it.
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double norm = X.col(jj).norm();
      if (norm == 0.0 || std::fabs(R(jj, jj)) <= 1e-10 * std::max(1.0, norm)) {
        throw RegressionError("design matrix is rank deficient: term '" + fit.terms[j] +
                              "' is collinear with earlier terms");
      }
    }
    beta = qr.solve(yw);
    const Eigen::MatrixXd r_inv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                                         static_cast<Eigen::Index>(p)));
    xtx_inv = r_inv * r_inv.transpose();
  }

  const Eigen::VectorXd resid = yw - X * beta;
  const double ssr = resid.squaredNorm();
  const bool centered = spec.intercept || fit.absorbed_group.has_value();
  const double sst = centered ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(fit.k);
  fit.r2 = sst > 0 ? 1.0 - ssr / sst : 0.0;
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (centered ? nd - 1.0 : nd) / (nd - kd);

  Eigen::MatrixXd cov;
  if (spec.robust_se) {
    Eigen::MatrixXd meat = X.transpose() * resid.array().square().matrix().asDiagonal() * X;
    cov = (nd / (nd - kd)) * xtx_inv * meat * xtx_inv;
  } else {
    cov = (ssr / (nd - kd)) * xtx_inv;
  }
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double se = std::sqrt(std::max(0.0, cov(jj, jj)));
    fit.coefficients.push_back(beta[jj]);
    fit.std_errors.push_back(se);
    const double t = se > 0 ? beta[jj] / se : (beta[jj] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    fit.p_values.push_back(two_tailed_p(t, nd - kd));
  }

  if (fit.absorbed_group) {
    const auto& lv = fit.fe_levels[*fit.absorbed_group];
    const Eigen::VectorXd effects = Eigen::Map<const Eigen::VectorXd>(group_y_mean.data(),
                                                                      static_cast<Eigen::Index>(absorbed_levels)) -
                                    group_x_mean * beta;
    for (std::size_t l = 0; l < absorbed_levels; ++l) fit.absorbed_effects[lv[l]] = effects[static_cast<Eigen::Index>(l)];
    double mean_effect = 0;
    const auto& idx = level_index[*fit.absorbed_group];
    for (std::size_t r = 0; r < n; ++r) mean_effect += effects[static_cast<Eigen::Index>(idx[r])];
    fit.absorbed_mean_effect = mean_effect / nd;
  }
  return fit;
}

std::vector<double> predict(const FitResult& fit, const std::vector<Profile>& profiles) {
  std::vector<double> out;
  out.reserve(profiles.size());
  for (const auto& prof : profiles) {
    auto value_of = [&](const std::string& c) {
      auto it = prof.values.find(c);
      if (it == prof.values.end()) throw RegressionError("profile is missing covariate '" + c + "'");
      return it->second;
    };
    std::vector<double> x;
    if (fit.spec.intercept && !fit.absorbed_group) x.push_back(1.0);
    for (const auto& c : fit.spec.covariates) x.push_back(value_of(c));
    for (const auto& [a, b] : fit.spec.interactions) x.push_back(value_of(a) * value_of(b));
    for (const auto& g : fit.spec.fixed_effects) {
      if (fit.absorbed_group && *fit.absorbed_group == g) continue;
      const auto& lv = fit.fe_levels.at(g);
      auto it = prof.levels.find(g);
      if (it == prof.levels.end()) {
        const auto& means = fit.fe_dummy_means.at(g);
        x.insert(x.end(), means.begin(), means.end());
        continue;
      }
      auto pos = std::find(lv.begin(), lv.end(), it->second);
      if (pos == lv.end()) throw RegressionError("unknown level '" + it->second + "' for group '" + g + "'");
      for (std::size_t l = 1; l < lv.size(); ++l) x.push_back(lv[l] == it->second ? 1.0 : 0.0);
    }
    double y = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) y += x[j] * fit.coefficients[j];
    if (fit.absorbed_group) {
      auto it = prof.levels.find(*fit.absorbed_group);
      if (it == prof.levels.end()) {
        y += fit.absorbed_mean_effect;
      } else {
        auto eff = fit.absorbed_effects.find(it->second);
        if (eff == fit.absorbed_effects.end()) {
          throw RegressionError("unknown level '" + it->second + "' for group '" + *fit.absorbed_group + "'");
        }
        y += eff->second;
      }
    }
    out.push_back(y);
  }
  return out;
}

std::vector<std::pair<std::string, Profile>> level_profiles(const FitResult& fit, const std::string& group) {
  auto it = fit.fe_levels.find(group);
  if (it == fit.fe_levels.end()) throw RegressionError("'" + group + "' is not a fixed-effect group of the fit");
  std::vector<std::pair<std::string, Profile>> out;
  for (const auto& level : it->second) {
    Profile p;
    p.values = fit.covariate_means;
    p.levels[group] = level;
    out.emplace_back(level, std::move(p));
  }
  return out;
}

ShapleyResult shapley_owen(const DataTable& data, const std::string& outcome,
                           const std::vector<PredictorGroup>& groups, ShapleyMeasure measure, unsigned threads) {
  const std::size_t g = groups.size();
  if (g == 0) throw RegressionError("Shapley decomposition needs at least one group");
  if (g > 20) throw RegressionError("Shapley decomposition supports at most 20 groups");

  std::vector<std::string> cols{outcome};
  for (const auto& grp : groups) {
    cols.insert(cols.end(), grp.covariates.begin(), grp.covariates.end());
    cols.insert(cols.end(), grp.fixed_effects.begin(), grp.fixed_effects.end());
  }
  const DataTable sample = data.complete_rows(cols);

  const std::size_t subsets = std::size_t{1} << g;
  ShapleyResult out;
  out.n = sample.rows();
  out.subset_values.assign(subsets, 0.0);
  parallel_for(subsets - 1, threads, [&](std::size_t i) {
    const std::size_t mask = i + 1;
    RegressionSpec spec;
    spec.outcome = outcome;
    spec.robust_se = false;
    std::string label;
    for (std::size_t k = 0; k < g; ++k) {
      if (!(mask >> k & 1)) continue;
      spec.covariates.insert(spec.covariates.end(), groups[k].covariates.begin(), groups[k].covariates.end());
      spec.fixed_effects.insert(spec.fixed_effects.end(), groups[k].fixed_effects.begin(),
                                groups[k].fixed_effects.end());
      label += (label.empty() ? "" : ",") + groups[k].name;
    }
    try {
      auto fit = ols_fit(sample, spec);
      out.subset_values[mask] = measure == ShapleyMeasure::adjusted_r2 ? fit.adj_r2 : fit.r2;
    } catch (const RegressionError& e) {
      throw RegressionError("subset {" + label + "}: " + e.what());
    }
  });

  // w(s) = s! (g - 1 - s)! / g!
  std::vector<double> weight(g);
  for (std::size_t s = 0; s < g; ++s) {
    double w = 1.0;
    for (std::size_t a = 2; a <= s; ++a) w *= static_cast<double>(a);
    for (std::size_t a = 2; a + s + 1 <= g; ++a) w *= static_cast<double>(a);
    for (std::size_t a = 2; a <= g; ++a) w /= static_cast<double>(a);
    weight[s] = w;
  }
  for (std::size_t k = 0; k < g; ++k) {
    const std::size_t bit = std::size_t{1} << k;
    double share = 0.0;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(__builtin_popcountll(mask));
      share += weight[s] * (out.subset_values[mask | bit] - out.subset_values[mask]);
    }
    out.shares.emplace_back(groups[k].name, share);
  }
  out.full_value = out.subset_values[subsets - 1];
  return out;
}

}  // namespace cdengine
