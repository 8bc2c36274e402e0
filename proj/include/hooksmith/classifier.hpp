// Copyright 2026 The hooksmith Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Sensitive-method discovery. Every method is mapped to a binary vector of
// presence predicates over its unit name, method name, parameters and return
// type, and an RBF-kernel SVM trained with simplified SMO separates
// sensor-data-access / sensor-control methods (+1) from everything else (-1).

#pragma once

#include <cmath>
#include <future>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hooksmith/common.hpp"
#include "hooksmith/corpus.hpp"

namespace hooksmith {

enum class FeatureCategory { class_name, method_name, param_name, return_type };
enum class Matcher { contains, starts_with, equals };

inline std::string_view to_string(FeatureCategory c) {
  switch (c) {
    case FeatureCategory::class_name: return "class_name";
    case FeatureCategory::method_name: return "method_name";
    case FeatureCategory::param_name: return "param_name";
    case FeatureCategory::return_type: return "return_type";
  }
  return "?";
}

inline std::string_view to_string(Matcher m) {
  switch (m) {
    case Matcher::contains: return "contains";
    case Matcher::starts_with: return "starts_with";
    case Matcher::equals: return "equals";
  }
  return "?";
}

inline FeatureCategory parse_feature_category(std::string_view s) {
  if (s == "class_name") return FeatureCategory::class_name;
  if (s == "method_name") return FeatureCategory::method_name;
  if (s == "param_name") return FeatureCategory::param_name;
  if (s == "return_type") return FeatureCategory::return_type;
  fail_validation("unknown feature category '" + std::string(s) +
                  "' (expected class_name, method_name, param_name, return_type)");
}

inline Matcher parse_matcher(std::string_view s) {
  if (s == "contains") return Matcher::contains;
  if (s == "starts_with") return Matcher::starts_with;
  if (s == "equals") return Matcher::equals;
  fail_validation("unknown matcher '" + std::string(s) + "' (expected contains, starts_with, equals)");
}

struct LexiconEntry {
  FeatureCategory category;
  Matcher matcher;
  std::string pattern;
  auto operator<=>(const LexiconEntry&) const = default;
};

class FeatureLexicon {
 public:
  explicit FeatureLexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) fail_validation("feature lexicon is empty");
    std::set<LexiconEntry> seen;
    Fingerprint fp;
    for (const auto& e : entries_) {
      if (e.pattern.empty()) fail_validation("feature lexicon has an empty pattern");
      if (e.pattern != to_lower(e.pattern)) {
        fail_validation("feature pattern '" + e.pattern + "' must be lowercase");
      }
      if (!seen.insert(e).second) {
        fail_validation("duplicate lexicon entry (" + std::string(to_string(e.category)) + ", " +
                        std::string(to_string(e.matcher)) + ", \"" + e.pattern + "\")");
      }
      fp.add(to_string(e.category)).add(to_string(e.matcher)).add(e.pattern);
    }
    fingerprint_ = fp.hex();
  }

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::string fingerprint_;
};

struct FeatureVector {
  std::vector<std::uint8_t> bits;
  std::size_t size() const { return bits.size(); }
  bool operator==(const FeatureVector&) const = default;
};

namespace detail {

inline bool matches(Matcher m, std::string_view subject_lower, std::string_view pattern) {
  switch (m) {
    case Matcher::contains: return subject_lower.find(pattern) != std::string_view::npos;
    case Matcher::starts_with: return subject_lower.starts_with(pattern);
    case Matcher::equals: return subject_lower == pattern;
  }
  return false;
}

}  // namespace detail

inline FeatureVector featurize(const MethodRecord& m, const FeatureLexicon& lex) {
  const auto unit = to_lower(m.unit);
  const auto name = to_lower(m.name);
  const auto ret = to_lower(m.return_type);
  std::vector<std::string> params;
  for (const auto& p : m.params) {
    params.push_back(to_lower(p.name));
    params.push_back(to_lower(p.type));
  }
  FeatureVector v;
  v.bits.reserve(lex.size());
  for (const auto& e : lex.entries()) {
    bool hit = false;
    switch (e.category) {
      case FeatureCategory::class_name: hit = detail::matches(e.matcher, unit, e.pattern); break;
      case FeatureCategory::method_name: hit = detail::matches(e.matcher, name, e.pattern); break;
      case FeatureCategory::return_type: hit = detail::matches(e.matcher, ret, e.pattern); break;
      case FeatureCategory::param_name:
        for (const auto& p : params) hit = hit || detail::matches(e.matcher, p, e.pattern);
        break;
    }
    v.bits.push_back(hit ? 1 : 0);
  }
  return v;
}

inline double rbf_kernel(const FeatureVector& x, const FeatureVector& z, double gamma) {
  if (x.size() != z.size()) {
    fail_validation("kernel operands differ in length (" + std::to_string(x.size()) + " vs " +
                    std::to_string(z.size()) + ")");
  }
  std::size_t dist = 0;
  for (std::size_t i = 0; i < x.size(); ++i) dist += (x.bits[i] != z.bits[i]) ? 1 : 0;
  return std::exp(-gamma * static_cast<double>(dist));
}

struct SvmParams {
  double C = 1.0;
  double gamma = 0.0;  // <= 0 is rejected; callers default it to 1/|lexicon|
  double tol = 1e-3;
  int max_passes = 10;
  std::uint64_t seed = 0;
  // Hard stop on full sweeps over the data.
  std::size_t max_sweeps = 100000;
};

struct SvmModel {
  std::vector<FeatureVector> support_vectors;
  std::vector<double> alphas;
  std::vector<int> labels;
  double bias = 0.0;
  double C = 1.0;
  double gamma = 1.0;
  std::string lexicon_fingerprint;
  std::uint64_t seed = 0;

  std::size_t dimension() const {
    return support_vectors.empty() ? 0 : support_vectors.front().size();
  }
};

struct SmoResult {
  std::vector<double> alpha;  // one per training point
  double bias = 0.0;
  std::size_t sweeps = 0;
};

// Simplified Platt SMO. The second index is drawn from the seeded generator;
// if that pair makes no progress the remaining indices are tried in order
// starting from a random offset.
inline SmoResult smo_solve(std::span<const FeatureVector> xs, std::span<const int> ys,
                           const SvmParams& p) {
  const std::size_t n = xs.size();
  if (n != ys.size()) fail_validation("feature/label count mismatch");
  if (n < 2) fail_stage("training needs at least 2 examples");
  if (!(p.C > 0)) fail_validation("C must be positive");
  if (!(p.gamma > 0)) fail_validation("gamma must be positive");
  bool pos = false;
  bool neg = false;
  for (int y : ys) {
    if (y != 1 && y != -1) fail_validation("labels must be +1 or -1");
    (y > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) fail_stage("training data contains a single class");

  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      K[i * n + j] = K[j * n + i] = rbf_kernel(xs[i], xs[j], p.gamma);
    }
  }
  auto k = [&](std::size_t i, std::size_t j) { return K[i * n + j]; };
  auto y = [&](std::size_t i) { return static_cast<double>(ys[i]); };

  std::vector<double> a(n, 0.0);
  std::vector<double> E(n);
  double b = 0.0;
  const double C = p.C;
  constexpr double min_step = 1e-12;
  Rng rng(p.seed);

  auto refresh_errors = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double f = b;
      for (std::size_t j = 0; j < n; ++j) {
        if (a[j] != 0.0) f += a[j] * y(j) * k(j, i);
      }
      E[i] = f - y(i);
    }
  };

  auto take_step = [&](std::size_t i, std::size_t j) -> bool {
    if (i == j) return false;
    const double ai = a[i], aj = a[j];
    double L, H;
    if (ys[i] != ys[j]) {
      L = std::max(0.0, aj - ai);
      H = std::min(C, C + aj - ai);
    } else {
      L = std::max(0.0, ai + aj - C);
      H = std::min(C, ai + aj);
    }
    if (H - L < min_step) return false;
    const double eta = 2.0 * k(i, j) - k(i, i) - k(j, j);
    const double slope = y(j) * (E[i] - E[j]);
    double aj_new;
    if (eta < 0.0) {
      aj_new = std::clamp(aj - slope / eta, L, H);
    } else {
      // Flat or (by round-off) convex along the pair: the objective change
      // slope*t + eta*t^2/2 is best at one of the ends.
      const auto gain = [&](double t) { return slope * t + 0.5 * eta * t * t; };
      const double gl = gain(L - aj), gh = gain(H - aj);
      if (std::max(gl, gh) <= min_step) return false;
      aj_new = gl > gh ? L : H;
    }
    if (std::abs(aj_new - aj) < min_step) return false;
    double ai_new = ai + y(i) * y(j) * (aj - aj_new);
    ai_new = std::clamp(ai_new, 0.0, C);
    const double dai = ai_new - ai;
    const double daj = aj_new - aj;
    const double b1 = b - E[i] - y(i) * dai * k(i, i) - y(j) * daj * k(i, j);
    const double b2 = b - E[j] - y(i) * dai * k(i, j) - y(j) * daj * k(j, j);
    double b_new;
    if (ai_new > 0.0 && ai_new < C) {
      b_new = b1;
    } else if (aj_new > 0.0 && aj_new < C) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - b;
    for (std::size_t t = 0; t < n; ++t) {
      E[t] += y(i) * dai * k(i, t) + y(j) * daj * k(j, t) + db;
    }
    a[i] = ai_new;
    a[j] = aj_new;
    b = b_new;
    return true;
  };

  // The sweep works to half the tolerance: the bias is refit after the
  // loop and may move by up to tol/2, which keeps every point within tol.
  const double tol = 0.5 * p.tol;
  int passes = 0;
  std::size_t sweeps = 0;
  while (passes < p.max_passes && sweeps < p.max_sweeps) {
    ++sweeps;
    refresh_errors();
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y(i) * E[i];
      if (!((r < -tol && a[i] < C) || (r > tol && a[i] > 0.0))) continue;
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      if (take_step(i, j)) {
        ++changed;
        continue;
      }
      const std::size_t offset = rng.below(n);
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t jj = (offset + t) % n;
        if (jj == i || jj == j) continue;
        if (take_step(i, jj)) {
          ++changed;
          break;
        }
      }
    }
    passes = changed == 0 ? passes + 1 : 0;
  }

  // Snap round-off at the box edges, then refit the bias from the final
  // alphas: the mean over free vectors, or the midpoint of the feasible
  // interval when every alpha sits on a bound.
  for (auto& ai : a) {
    if (ai < 1e-12 * C) ai = 0.0;
    if (ai > C * (1.0 - 1e-12)) ai = C;
  }
  b = 0.0;
  refresh_errors();  // E[i] = g(x_i) - y_i with zero bias
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double target = -E[i];  // y_i - g(x_i)
    if (a[i] > 0.0 && a[i] < C) {
      free_sum += target;
      ++free_count;
    } else if ((a[i] == 0.0) == (ys[i] > 0)) {
      lo = std::max(lo, target);  // y f >= 1 with y=+1 at 0, or y=-1 at C
    } else {
      hi = std::min(hi, target);
    }
  }
  if (free_count > 0) {
    b = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    b = 0.5 * (lo + hi);
  } else {
    b = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  }
  return {std::move(a), b, sweeps};
}

inline double dual_objective(std::span<const FeatureVector> xs, std::span<const int> ys,
                             std::span<const double> alpha, double gamma) {
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < xs.size(); ++j) {
      quad += alpha[i] * alpha[j] * ys[i] * ys[j] * rbf_kernel(xs[i], xs[j], gamma);
    }
  }
  return lin - 0.5 * quad;
}

inline SvmModel train_svm(std::span<const FeatureVector> xs, std::span<const int> ys,
                          const SvmParams& p, std::string lexicon_fingerprint = {}) {
  const auto r = smo_solve(xs, ys, p);
  SvmModel m;
  m.bias = r.bias;
  m.C = p.C;
  m.gamma = p.gamma;
  m.seed = p.seed;
  m.lexicon_fingerprint = std::move(lexicon_fingerprint);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (r.alpha[i] > 0.0) {
      m.support_vectors.push_back(xs[i]);
      m.alphas.push_back(r.alpha[i]);
      m.labels.push_back(ys[i]);
    }
  }
  return m;
}

struct Prediction {
  int label;
  double decision_value;
};

// A decision value of exactly 0 resolves to +1: ties fall toward protection.
inline Prediction predict(const SvmModel& model, const FeatureVector& x) {
  if (x.size() != model.dimension()) {
    fail_validation("feature vector length " + std::to_string(x.size()) +
                    " does not match the model's lexicon size " + std::to_string(model.dimension()));
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.alphas[i] * model.labels[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
  }
  return {f >= 0.0 ? 1 : -1, f};
}

struct FoldMetrics {
  double precision = 0.0;
  double recall = 0.0;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  std::vector<FoldMetrics> per_fold;
};

// Ten-fold (by default) cross-validation. Training uses `train_labels`; the
// held-out fold is scored against `eval_labels`, which are the same labels
// unless the caller has a cleaner reference set. Precision with no predicted
// positives and recall with no actual positives are both taken as 1.
inline Metrics cross_validate(std::span<const FeatureVector> xs, std::span<const int> train_labels,
                              std::span<const int> eval_labels, std::size_t folds,
                              const SvmParams& params, std::uint64_t seed) {
  const std::size_t n = xs.size();
  if (train_labels.size() != n || eval_labels.size() != n) {
    fail_validation("feature/label count mismatch");
  }
  if (folds < 2) fail_validation("need at least 2 folds");
  if (n < folds) fail_validation("fewer examples than folds");

  std::vector<std::size_t> order(n);
  bool ok = false;
  for (std::uint64_t attempt = 0; attempt < 100 && !ok; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed + attempt);
    rng.shuffle(order);
    ok = true;
    for (std::size_t f = 0; f < folds && ok; ++f) {
      const std::size_t lo = f * n / folds;
      const std::size_t hi = (f + 1) * n / folds;
      bool pos = false;
      bool neg = false;
      for (std::size_t t = 0; t < n; ++t) {
        if (t >= lo && t < hi) continue;
        (train_labels[order[t]] > 0 ? pos : neg) = true;
      }
      ok = pos && neg;
    }
  }
  if (!ok) fail_stage("could not find a fold split with both classes in every training split");

  auto run_fold = [&](std::size_t f) {
    const std::size_t lo = f * n / folds;
    const std::size_t hi = (f + 1) * n / folds;
    std::vector<FeatureVector> tx;
    std::vector<int> ty;
    for (std::size_t t = 0; t < n; ++t) {
      if (t >= lo && t < hi) continue;
      tx.push_back(xs[order[t]]);
      ty.push_back(train_labels[order[t]]);
    }
    SvmParams fp = params;
    fp.seed = params.seed + f;
    const auto model = train_svm(tx, ty, fp);
    std::size_t tp = 0, fpos = 0, fn = 0;
    for (std::size_t t = lo; t < hi; ++t) {
      const int pred = predict(model, xs[order[t]]).label;
      const int truth = eval_labels[order[t]];
      if (pred > 0 && truth > 0) ++tp;
      if (pred > 0 && truth < 0) ++fpos;
      if (pred < 0 && truth > 0) ++fn;
    }
    FoldMetrics m;
    m.precision = (tp + fpos) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fpos);
    m.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return m;
  };

  std::vector<std::future<FoldMetrics>> jobs;
  for (std::size_t f = 0; f < folds; ++f) jobs.push_back(std::async(std::launch::async, run_fold, f));
  Metrics out;
  for (auto& j : jobs) out.per_fold.push_back(j.get());
  for (const auto& m : out.per_fold) {
    out.precision += m.precision;
    out.recall += m.recall;
  }
  out.precision /= static_cast<double>(folds);
  out.recall /= static_cast<double>(folds);
  return out;
}

inline Metrics cross_validate(std::span<const FeatureVector> xs, std::span<const int> labels,
                              std::size_t folds, const SvmParams& params, std::uint64_t seed) {
  return cross_validate(xs, labels, labels, folds, params, seed);
}

inline std::set<std::string> discover_pms(const Corpus& c, const SvmModel& model,
                                          const FeatureLexicon& lex) {
  if (model.lexicon_fingerprint != lex.fingerprint()) {
    fail_validation("model was trained with lexicon " + model.lexicon_fingerprint +
                    " but discovery was given lexicon " + lex.fingerprint());
  }
  std::set<std::string> pms;
  c.for_each_method([&](const UnitDecl&, const MethodRecord& m) {
    if (predict(model, featurize(m, lex)).label > 0) pms.insert(m.id);
  });
  return pms;
}

}  // namespace hooksmith
