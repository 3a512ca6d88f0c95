#include "irtbench/synth.hpp"

#include <cmath>
#include <unordered_map>

#include "irtbench/errors.hpp"
#include "irtbench/rng.hpp"

namespace irtbench {

namespace {

// Substream labels; rows use ids from kRowBase upward.
constexpr std::uint64_t kItemStream = 1;
constexpr std::uint64_t kAbilityStream = 2;
constexpr std::uint64_t kRowBase = 1000;

std::string padded(const char* prefix, std::size_t i, std::size_t width) {
  std::string num = std::to_string(i + 1);
  std::string out = prefix;
  out.append(width > num.size() ? width - num.size() : 0, '0');
  out += num;
  return out;
}

struct Moments {
  double mean_x = 0, mean_y = 0, sxx = 0, syy = 0, sxy = 0, sq_err = 0;
  std::size_t n = 0;
};

Moments moments(const std::vector<double>& x, const std::vector<double>& y) {
  Moments m;
  m.n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= static_cast<double>(m.n);
  m.mean_y /= static_cast<double>(m.n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
    const double e = x[i] - y[i];
    m.sq_err += e * e;
  }
  return m;
}

double pearson(const Moments& m) {
  if (m.sxx == 0.0 || m.syy == 0.0) return m.sxx == m.syy ? 1.0 : 0.0;
  return m.sxy / std::sqrt(m.sxx * m.syy);
}

double rmse(const Moments& m) { return std::sqrt(m.sq_err / static_cast<double>(m.n)); }

}  // namespace

void SynthSpec::validate() const {
  if (n_respondents < 1 || n_items < 1) {
    throw ValidationError(errc::bad_config, "synthetic matrix needs at least 1 respondent and 1 item");
  }
  if (c_min < 0.0 || c_max >= 1.0 || c_min > c_max || a_min > a_max || b_sd < 0.0) {
    throw ValidationError(errc::bad_config, "synthetic parameter ranges are inconsistent");
  }
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();

  SynthResult out;
  out.matrix.dataset_name = spec.dataset_name;

  Rng item_rng = Rng::substream(spec.seed, kItemStream);
  out.true_items.resize(spec.n_items);
  for (std::size_t i = 0; i < spec.n_items; ++i) {
    auto& p = out.true_items[i];
    p.item_id = padded("i", i, 4);
    p.a = item_rng.uniform(spec.a_min, spec.a_max);
    p.b = item_rng.normal(spec.b_mean, spec.b_sd);
    p.c = item_rng.uniform(spec.c_min, spec.c_max);
    out.matrix.item_ids.push_back(p.item_id);
  }

  Rng ability_rng = Rng::substream(spec.seed, kAbilityStream);
  out.true_abilities.resize(spec.n_respondents);
  for (std::size_t r = 0; r < spec.n_respondents; ++r) {
    out.true_abilities[r].theta = ability_rng.normal();
    out.matrix.respondent_ids.push_back(padded("r", r, 4));
  }

  out.matrix.cells.resize(spec.n_respondents * spec.n_items);
  for (std::size_t r = 0; r < spec.n_respondents; ++r) {
    Rng row_rng = Rng::substream(spec.seed, kRowBase + r);
    for (std::size_t i = 0; i < spec.n_items; ++i) {
      const double p = icc(out.true_abilities[r], out.true_items[i]);
      out.matrix.at(r, i) = row_rng.uniform() < p ? 1 : 0;
    }
  }
  return out;
}

RecoveryReport recovery_report(const SynthResult& truth, const FitResult& fitted) {
  if (truth.true_items.size() != fitted.items.size() ||
      truth.true_abilities.size() != fitted.abilities.size()) {
    throw ValidationError(errc::length_mismatch, "true and fitted shapes differ");
  }
  std::unordered_map<std::string, const ItemParams*> fitted_by_id;
  for (const auto& p : fitted.items) fitted_by_id.emplace(p.item_id, &p);

  std::vector<double> ta, fa, tb, fb;
  RecoveryReport rep;
  for (const auto& t : truth.true_items) {
    auto it = fitted_by_id.find(t.item_id);
    if (it == fitted_by_id.end()) {
      throw ValidationError(errc::id_mismatch, "fitted result lacks item '" + t.item_id + "'");
    }
    if (it->second->degenerate) {
      ++rep.degenerate_items_excluded;
      continue;
    }
    ta.push_back(t.a);
    fa.push_back(it->second->a);
    tb.push_back(t.b);
    fb.push_back(it->second->b);
  }
  if (ta.size() < 2) {
    throw ValidationError(errc::too_small, "fewer than 2 non-degenerate items to compare");
  }

  std::vector<double> tt(truth.true_abilities.size()), ft(truth.true_abilities.size());
  for (std::size_t r = 0; r < tt.size(); ++r) {
    tt[r] = truth.true_abilities[r].theta;
    ft[r] = fitted.abilities[r].theta;
  }

  const auto ma = moments(ta, fa);
  const auto mb = moments(tb, fb);
  const auto mt = moments(tt, ft);
  rep.corr_a = pearson(ma);
  rep.corr_b = pearson(mb);
  rep.corr_theta = pearson(mt);
  rep.rmse_a = rmse(ma);
  rep.rmse_b = rmse(mb);
  rep.rmse_theta = rmse(mt);
  return rep;
}

}  // namespace irtbench
