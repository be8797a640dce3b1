// Copyright 2026 The Inquire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/errors.hpp"
#include "inquire/llm_gateway.hpp"
#include "inquire/question_tree.hpp"
#include "inquire/text.hpp"

namespace inquire {

using Embedding = std::vector<double>;

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("cosine over vectors of different length");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DimensionMismatch("cosine with a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Cluster {
  ClusterId id = 0;
  std::vector<Embedding> members;
  std::size_t medoid_index = 0;

  const Embedding& medoid() const { return members.at(medoid_index); }
};

/// Member maximizing the summed cosine similarity to every member (self
/// included, counted as exactly 1). Lowest index wins ties.
inline std::size_t recompute_medoid(Cluster& cluster) {
  const auto n = cluster.members.size();
  if (n == 0) throw std::invalid_argument("recompute_medoid on an empty cluster");
  std::vector<double> sums(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = cosine_similarity(cluster.members[i], cluster.members[j]);
      sums[i] += s;
      sums[j] += s;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    // Tolerance keeps symmetric ties from being decided by summation order.
    if (sums[i] > sums[best] + 1e-12) best = i;
  }
  cluster.medoid_index = best;
  return best;
}

/// Online medoid clustering of problem-description embeddings plus the
/// bonus parameters used when a conversation in a cluster succeeds.
class ClusterStore {
 public:
  ClusterStore(double tau = 0.9, double beta = 0.2, double gamma = 0.9) : tau_(tau), beta_(beta), gamma_(gamma) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  }

  double tau() const noexcept { return tau_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  std::optional<std::size_t> dim() const noexcept { return dim_; }
  const std::vector<Cluster>& clusters() const noexcept { return clusters_; }

  /// Joins the most similar cluster whose medoid clears tau (lowest id on
  /// ties) and refreshes its medoid, or opens a new cluster.
  ClusterId assign(const Embedding& e) {
    check(e);
    std::optional<std::size_t> best;
    double best_sim = 0.0;
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
      const double sim = cosine_similarity(e, clusters_[i].medoid());
      if (sim >= tau_ && (!best || sim > best_sim)) {
        best = i;
        best_sim = sim;
      }
    }
    if (!best) {
      const auto id = static_cast<ClusterId>(clusters_.size());
      clusters_.push_back(Cluster{id, {e}, 0});
      return id;
    }
    auto& c = clusters_[*best];
    c.members.push_back(e);
    recompute_medoid(c);
    return c.id;
  }

  /// Restores a cluster verbatim (snapshot loading).
  void restore(Cluster c) {
    if (c.members.empty()) throw CorruptSnapshot("empty cluster in snapshot");
    if (c.medoid_index >= c.members.size()) throw CorruptSnapshot("medoid index out of range");
    if (c.id != static_cast<ClusterId>(clusters_.size())) throw CorruptSnapshot("cluster ids must be dense");
    for (const auto& m : c.members) check(m);
    clusters_.push_back(std::move(c));
  }

 private:
  void check(const Embedding& e) {
    if (e.empty()) throw DimensionMismatch("empty embedding");
    if (dim_ && *dim_ != e.size()) {
      throw DimensionMismatch("embedding has " + std::to_string(e.size()) + " dims, store uses " +
                              std::to_string(*dim_));
    }
    bool nonzero = false;
    for (double v : e) nonzero = nonzero || v != 0.0;
    if (!nonzero) throw DimensionMismatch("zero-norm embedding");
    dim_ = e.size();
  }

  double tau_;
  double beta_;
  double gamma_;
  std::optional<std::size_t> dim_;
  std::vector<Cluster> clusters_;
};

inline ClusterId assign_cluster(const Embedding& e, ClusterStore& store) { return store.assign(e); }

/// Credits each asked question of a successful conversation:
/// B_k(v) += beta * r_total(v) * gamma^depth, depth being that of the answer
/// node where v was asked.
inline void propagate_feedback(std::span<QuestionNode* const> trajectory, ClusterId cluster,
                               const ClusterStore& store) {
  for (auto* q : trajectory) {
    q->bonus[cluster] += store.beta() * q->r_total * std::pow(store.gamma(), q->depth());
  }
}

// ---------------------------------------------------------------------------
// Snapshot

inline constexpr int kClusterSnapshotVersion = 1;

inline nlohmann::json clusters_to_json(const ClusterStore& store) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : store.clusters()) {
    clusters.push_back({{"id", c.id}, {"medoid_index", c.medoid_index}, {"members", c.members}});
  }
  return {{"version", kClusterSnapshotVersion}, {"tau", store.tau()},     {"beta", store.beta()},
          {"gamma", store.gamma()},             {"clusters", clusters}};
}

inline ClusterStore clusters_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != kClusterSnapshotVersion) {
    throw VersionMismatch("unsupported cluster snapshot version");
  }
  try {
    ClusterStore store(j.at("tau").get<double>(), j.at("beta").get<double>(), j.at("gamma").get<double>());
    for (const auto& c : j.at("clusters")) {
      store.restore(Cluster{c.at("id").get<ClusterId>(), c.at("members").get<std::vector<Embedding>>(),
                            c.at("medoid_index").get<std::size_t>()});
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptSnapshot(std::string("corrupt cluster snapshot: ") + e.what());
  } catch (const DimensionMismatch& e) {
    throw CorruptSnapshot(std::string("corrupt cluster snapshot: ") + e.what());
  }
}

inline void save_clusters(const ClusterStore& store, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write cluster snapshot: " + tmp);
    out << clusters_to_json(store).dump(1) << '\n';
    if (!out) throw Error("failed writing cluster snapshot: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline ClusterStore load_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read cluster snapshot: " + path.string());
  try {
    return clusters_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptSnapshot(std::string("cluster snapshot is not valid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Offline embedder

/// Hashed bag of words: lower-cased alphanumeric tokens bucketed by FNV-1a
/// into `dim` counts, then unit-normalized. Empty text embeds to all zeros.
class HashedBagOfWords : public EmbeddingProvider {
 public:
  explicit HashedBagOfWords(std::size_t dim = 256) : dim_(dim) {}

  std::vector<double> embed(std::string_view text_in) override {
    std::vector<double> v(dim_, 0.0);
    std::string token;
    const auto flush = [&] {
      if (!token.empty()) v[text::fnv1a(token) % dim_] += 1.0;
      token.clear();
    };
    for (unsigned char c : text_in) {
      if (std::isalnum(c)) {
        token.push_back(static_cast<char>(std::tolower(c)));
      } else {
        flush();
      }
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return v;
  }

 private:
  std::size_t dim_;
};

}  // namespace inquire
