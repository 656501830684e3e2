// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cclab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cclab::exp {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Salts that keep the per-purpose seeds apart.
enum Salt : std::uint64_t { kData = 1, kPartition, kTrain, kSelect, kKeys, kAnswer, kGuard, kSession };

std::uint64_t seed_for(std::uint64_t seed, Salt salt, std::uint64_t a = 0, std::uint64_t b = 0) {
  return mix(mix(mix(seed, salt), a), b);
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  const std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError("unknown config key '" + where + k + "'");
  }
}

learn::ModelKind kind_for(const ExperimentConfig& cfg, unsigned party) {
  if (cfg.models == "mlp") return learn::ModelKind::Mlp;
  if (cfg.models == "mixed") return party % 2 ? learn::ModelKind::Mlp : learn::ModelKind::MultinomialLinear;
  return learn::ModelKind::MultinomialLinear;
}

learn::Hyper hyper_for(const ExperimentConfig& cfg, std::uint64_t seed, unsigned party) {
  learn::Hyper h = cfg.hyper;
  h.seed = seed_for(seed, kTrain, party);
  return h;
}

ring::FixedPointParams fp_of(const ExperimentConfig& cfg) { return {cfg.width_bits, cfg.frac_bits}; }

learn::LabeledSet make_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.dataset.kind == "csv") {
    return eval::load_csv(cfg.dataset.path, cfg.dataset.header, cfg.dataset.classes);
  }
  return eval::make_blobs(cfg.dataset.classes, cfg.dataset.dim, cfg.dataset.per_class, cfg.dataset.spread,
                          seed_for(seed, kData));
}

struct World {
  eval::Partition part;
  std::vector<learn::Model> models;
  std::vector<proto::AnsweringModel> answering;
};

World build_world(const ExperimentConfig& cfg, std::uint64_t seed) {
  World w;
  eval::PartitionPlan plan;
  plan.parties = cfg.parties;
  plan.queriers = cfg.queriers;
  plan.keep = cfg.keep;
  plan.pool_size = cfg.pool_size;
  plan.eval_size = cfg.eval_size;
  plan.seed = seed_for(seed, kPartition);
  w.part = eval::partition(make_dataset(cfg, seed), plan);
  for (unsigned p = 0; p < cfg.parties; ++p) {
    w.models.push_back(learn::train(kind_for(cfg, p), w.part.parties[p], hyper_for(cfg, seed, p)));
    w.answering.push_back(to_answering_model(w.models.back(), w.part.parties[p], fp_of(cfg)));
  }
  return w;
}

struct Federation {
  proto::QueryingParty qp;
  std::vector<proto::AnsweringParty> aps;
  proto::PrivacyGuardian pg;
};

Federation federation_for(const ExperimentConfig& cfg, const World& w, std::uint64_t seed, unsigned q,
                          double epsilon_max) {
  Federation f;
  Rng key_rng(seed_for(seed, kKeys, q));
  const bool real = cfg.backend == "real";
  f.qp.id = "party" + std::to_string(q);
  f.qp.keys = ahe::keygen(real ? ahe::Backend::Paillier : ahe::Backend::Ideal, real ? cfg.key_bits : 512u,
                          key_rng);
  f.qp.ledger = dp::RdpLedger(dp::dense_orders(), cfg.delta, epsilon_max);
  f.qp.noise = cfg.noise;
  for (unsigned p = 0; p < cfg.parties; ++p) {
    if (p == q) continue;
    f.aps.push_back({"party" + std::to_string(p), w.answering[p], seed_for(seed, kAnswer, q, p)});
  }
  f.pg = {cfg.noise, seed_for(seed, kGuard, q)};
  return f;
}

std::vector<double> row_vector(const Eigen::MatrixXd& x, std::size_t r) {
  std::vector<double> out(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) out[static_cast<std::size_t>(c)] = x(static_cast<Eigen::Index>(r), c);
  return out;
}

std::string outcome_name(const proto::SessionResult& r) {
  switch (r.outcome) {
    case proto::Outcome::Label: return "label";
    case proto::Outcome::Refused: return "refused";
    case proto::Outcome::Aborted: return "aborted:" + r.abort_reason;
  }
  return "?";
}

eval::EvalReport report(const learn::Model& m, const learn::LabeledSet& eval_set, std::uint64_t seed,
                        unsigned party, const char* phase, double eps, std::size_t queries) {
  eval::EvalReport r = eval::evaluate(m, eval_set);
  r.seed = seed;
  r.party = "party" + std::to_string(party);
  r.phase = phase;
  r.epsilon_spent = eps;
  r.queries = queries;
  return r;
}

double epsilon_of(const dp::RdpLedger& ledger) {
  return ledger.queries() ? dp::rdp_to_dp(ledger) : 0.0;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(version));
  if (dataset.kind != "blobs" && dataset.kind != "csv") throw ConfigError("dataset.kind must be blobs or csv");
  if (dataset.kind == "csv" && dataset.path.empty()) throw ConfigError("dataset.path is required for csv");
  if (dataset.kind == "blobs" && (dataset.classes < 2 || dataset.dim < 1 || dataset.per_class < 1)) {
    throw ConfigError("blobs need classes >= 2, dim >= 1, per_class >= 1");
  }
  if (parties < 2) throw ConfigError("parties must be at least 2");
  if (queriers < 1 || queriers >= parties) throw ConfigError("queriers must lie in [1, parties)");
  if (models != "linear" && models != "mlp" && models != "mixed") {
    throw ConfigError("models must be linear, mlp or mixed");
  }
  if (backend != "ideal" && backend != "real") throw ConfigError("backend must be ideal or real");
  if (transport != "inproc" && transport != "tcp") throw ConfigError("transport must be inproc or tcp");
  if (backend == "real" && models != "linear") {
    throw ConfigError("the real backend runs linear models only; use backend ideal for mlp or mixed");
  }
  if (!keep.empty() && dataset.kind == "blobs" && keep.size() != dataset.classes) {
    throw ConfigError("keep needs one fraction per class");
  }
  for (double f : keep) {
    if (!(f > 0 && f <= 1)) throw ConfigError("keep fractions must lie in (0, 1]");
  }
  if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (!(epsilon_max >= 0)) throw ConfigError("epsilon_max must be non-negative");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (max_aborts < 1) throw ConfigError("max_aborts must be at least 1");
  if (key_bits < 256) throw ConfigError("key_bits must be at least 256");
  try {
    noise.validate();
    ring::FixedPointParams{width_bits, frac_bits}.validate();
  } catch (const ParamError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"version", "dataset", "parties", "queriers", "models", "keep", "pool_size", "eval_size",
                  "max_queries", "noise", "epsilon_max", "delta", "strategy", "seeds", "transport",
                  "backend", "key_bits", "fixed_point", "sec_bits", "train", "max_aborts"},
                 "");
  if (!j.contains("version")) throw ConfigError("config needs a version field");
  ExperimentConfig c;
  c.version = get(j, "version", 0);
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    reject_unknown(d, {"kind", "classes", "dim", "per_class", "spread", "path", "header"}, "dataset.");
    c.dataset.kind = get(d, "kind", c.dataset.kind);
    c.dataset.classes = get(d, "classes", c.dataset.classes);
    c.dataset.dim = get(d, "dim", c.dataset.dim);
    c.dataset.per_class = get(d, "per_class", c.dataset.per_class);
    c.dataset.spread = get(d, "spread", c.dataset.spread);
    c.dataset.path = get(d, "path", c.dataset.path);
    c.dataset.header = get(d, "header", c.dataset.header);
  }
  c.parties = get(j, "parties", c.parties);
  c.queriers = get(j, "queriers", c.queriers);
  c.models = get(j, "models", c.models);
  c.keep = get(j, "keep", c.keep);
  c.pool_size = get(j, "pool_size", c.pool_size);
  c.eval_size = get(j, "eval_size", c.eval_size);
  c.max_queries = get(j, "max_queries", c.max_queries);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"mechanism", "scale", "sensitivity"}, "noise.");
    const std::string mech = get<std::string>(n, "mechanism", "gaussian");
    if (mech != "gaussian" && mech != "laplace") throw ConfigError("noise.mechanism must be gaussian or laplace");
    c.noise.mechanism = mech == "laplace" ? dp::Mechanism::Laplace : dp::Mechanism::Gaussian;
    c.noise.scale = get(n, "scale", c.noise.scale);
    c.noise.sensitivity = get(n, "sensitivity", c.noise.sensitivity);
  }
  c.epsilon_max = get(j, "epsilon_max", c.epsilon_max);
  c.delta = get(j, "delta", c.delta);
  c.strategy = learn::parse_strategy(get<std::string>(j, "strategy", learn::strategy_name(c.strategy)));
  c.seeds = get(j, "seeds", c.seeds);
  c.transport = get(j, "transport", c.transport);
  c.backend = get(j, "backend", c.backend);
  c.key_bits = get(j, "key_bits", c.key_bits);
  if (j.contains("fixed_point")) {
    const json& f = j.at("fixed_point");
    reject_unknown(f, {"width", "frac"}, "fixed_point.");
    c.width_bits = get(f, "width", c.width_bits);
    c.frac_bits = get(f, "frac", c.frac_bits);
  }
  c.sec_bits = get(j, "sec_bits", c.sec_bits);
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, {"epochs", "lr", "l2", "hidden", "batch"}, "train.");
    c.hyper.epochs = get(t, "epochs", c.hyper.epochs);
    c.hyper.lr = get(t, "lr", c.hyper.lr);
    c.hyper.l2 = get(t, "l2", c.hyper.l2);
    c.hyper.hidden = get(t, "hidden", c.hyper.hidden);
    c.hyper.batch = get(t, "batch", c.hyper.batch);
  }
  c.max_aborts = get(j, "max_aborts", c.max_aborts);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json j;
  j["version"] = c.version;
  j["dataset"] = {{"kind", c.dataset.kind},          {"classes", c.dataset.classes},
                  {"dim", c.dataset.dim},            {"per_class", c.dataset.per_class},
                  {"spread", c.dataset.spread},      {"path", c.dataset.path},
                  {"header", c.dataset.header}};
  j["parties"] = c.parties;
  j["queriers"] = c.queriers;
  j["models"] = c.models;
  j["keep"] = c.keep;
  j["pool_size"] = c.pool_size;
  j["eval_size"] = c.eval_size;
  j["max_queries"] = c.max_queries;
  j["noise"] = {{"mechanism", c.noise.mechanism == dp::Mechanism::Laplace ? "laplace" : "gaussian"},
                {"scale", c.noise.scale},
                {"sensitivity", c.noise.sensitivity}};
  j["epsilon_max"] = c.epsilon_max;
  j["delta"] = c.delta;
  j["strategy"] = learn::strategy_name(c.strategy);
  j["seeds"] = c.seeds;
  j["transport"] = c.transport;
  j["backend"] = c.backend;
  j["key_bits"] = c.key_bits;
  j["fixed_point"] = {{"width", c.width_bits}, {"frac", c.frac_bits}};
  j["sec_bits"] = c.sec_bits;
  j["train"] = {{"epochs", c.hyper.epochs}, {"lr", c.hyper.lr}, {"l2", c.hyper.l2},
                {"hidden", c.hyper.hidden}, {"batch", c.hyper.batch}};
  j["max_aborts"] = c.max_aborts;
  return j.dump(2);
}

proto::SessionConfig session_config(const ExperimentConfig& cfg) {
  proto::SessionConfig s;
  s.k = cfg.dataset.classes;
  s.fp = fp_of(cfg);
  s.sec_bits = cfg.sec_bits;
  if (cfg.backend == "real") {
    s.ahe = ahe::Backend::Paillier;
    s.twopc = {gc::TwoPcBackend::Garbled, gc::OtBackend::DiffieHellman, true};
  } else {
    s.ahe = ahe::Backend::Ideal;
    s.twopc = {gc::TwoPcBackend::Ideal, gc::OtBackend::DiffieHellman, true};
  }
  return s;
}

proto::AnsweringModel to_answering_model(const learn::Model& m, const learn::LabeledSet& training,
                                         ring::FixedPointParams fp) {
  const double s1 = std::ldexp(1.0, static_cast<int>(fp.frac_bits));
  const double s2 = s1 * s1;
  proto::AnsweringModel am;
  if (m.kind == learn::ModelKind::MultinomialLinear) {
    ahe::IntMatrix w;
    w.rows = static_cast<std::size_t>(m.w1.rows());
    w.cols = static_cast<std::size_t>(m.w1.cols());
    for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.w1.cols(); ++c) w.data.push_back(std::llround(m.w1(r, c) * s1));
    }
    std::vector<std::int64_t> b;
    for (Eigen::Index r = 0; r < m.b1.size(); ++r) b.push_back(std::llround(m.b1(r) * s2));
    am = proto::AnsweringModel::linear(std::move(w), std::move(b), 1);
  } else {
    am.kind = proto::AnsweringModel::Kind::Opaque;
    am.input_dim = m.features;
    am.output_dim = m.classes;
    am.opaque = [m, s1, s2](std::span<const std::int64_t> x) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
      for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]) / s1;
      const Eigen::VectorXd l = learn::predict_logits(m, v);
      std::vector<std::int64_t> out(static_cast<std::size_t>(l.size()));
      for (Eigen::Index i = 0; i < l.size(); ++i) out[static_cast<std::size_t>(i)] = std::llround(l(i) * s2);
      return out;
    };
  }
  // Largest logit magnitude seen on the party's own data, with 2x headroom.
  std::int64_t bound = 1;
  for (std::size_t r = 0; r < training.rows(); ++r) {
    const auto x = proto::encode_features(row_vector(training.x, r), fp);
    for (std::int64_t v : proto::plaintext_logits(am, x)) bound = std::max(bound, v < 0 ? -v : v);
  }
  am.max_logit_bound = bound > std::numeric_limits<std::int64_t>::max() / 2 ? bound : 2 * bound;
  return am;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.classes = cfg.dataset.classes;
  res.audit.push_back("# cclab audit log");
  res.audit.push_back(
      "# accountant: data-independent per-query bound (Gaussian: C^2 * order / sigma^2 RDP; Laplace: "
      "2C/b DP); no data-dependent tightening, so epsilon grows faster than data-dependent analyses report");
  res.audit.push_back("# config " + json::parse(dump_config(cfg)).dump());
  auto transport = proto::make_transport(cfg.transport);
  const proto::SessionConfig scfg = session_config(cfg);

  for (std::uint64_t seed : cfg.seeds) {
    World w = build_world(cfg, seed);
    res.classes = w.part.eval.classes;
    for (unsigned q = 0; q < cfg.queriers; ++q) {
      Federation fed = federation_for(cfg, w, seed, q, cfg.epsilon_max);
      res.reports.push_back(report(w.models[q], w.part.eval, seed, q, "before", 0.0, 0));

      const learn::LabeledSet& pool = w.part.pools[q];
      const std::size_t n = std::min(cfg.max_queries, pool.rows());
      const auto order = learn::select_queries(cfg.strategy, w.models[q], pool.x, n,
                                               seed_for(seed, kSelect, q), w.part.parties[q].x);
      std::vector<std::size_t> acquired_rows;
      std::vector<int> acquired_labels;
      bool refused = false;
      for (std::size_t t = 0; t < order.size() && !refused; ++t) {
        const std::size_t row = order[t];
        const auto x = row_vector(pool.x, row);
        QueryRecord rec;
        rec.seed = seed;
        rec.party = q;
        rec.pool_index = row;
        rec.true_label = pool.y[row];
        for (unsigned attempt = 0; attempt < cfg.max_aborts; ++attempt) {
          rec.attempts = attempt + 1;
          const auto s = proto::run_session(scfg, fed.qp, fed.aps, fed.pg, x, *transport,
                                            seed_for(seed, kSession, q, t * 64 + attempt));
          rec.outcome = outcome_name(s);
          if (s.outcome == proto::Outcome::Label) {
            rec.label = static_cast<int>(s.label);
            acquired_rows.push_back(row);
            acquired_labels.push_back(rec.label);
            break;
          }
          if (s.outcome == proto::Outcome::Refused) {
            refused = true;
            break;
          }
          res.audit.push_back("abort seed=" + std::to_string(seed) + " party=" + std::to_string(q) +
                              " query=" + std::to_string(t) + " reason=" + s.abort_reason);
        }
        if (refused) break;
        rec.epsilon = epsilon_of(fed.qp.ledger);
        res.queries.push_back(rec);
        if (rec.label < 0) {
          throw AbortExhausted("query " + std::to_string(t) + " of party " + std::to_string(q) + " aborted " +
                               std::to_string(cfg.max_aborts) + " times");
        }
      }
      learn::LabeledSet acquired = pool.subset(acquired_rows);
      acquired.y = acquired_labels;
      const learn::Model after =
          learn::retrain_with_labels(kind_for(cfg, q), w.part.parties[q], acquired, hyper_for(cfg, seed, q));
      const double eps = epsilon_of(fed.qp.ledger);
      res.reports.push_back(report(after, w.part.eval, seed, q, "after", eps, fed.qp.ledger.queries()));
      std::ostringstream line;
      line << std::setprecision(10) << "party seed=" << seed << " party=" << q
           << " queries=" << fed.qp.ledger.queries() << " epsilon=" << eps << " delta=" << cfg.delta
           << " stop=" << (refused ? "budget" : "pool");
      res.audit.push_back(line.str());
    }
  }
  return res;
}

void write_reports_csv(std::ostream& out, const ExperimentResult& r) {
  out << eval::EvalReport::csv_header(r.classes) << '\n';
  for (const auto& row : r.reports) out << row.csv_row() << '\n';
}

void write_queries_csv(std::ostream& out, const ExperimentResult& r) {
  out << "seed,party,pool_index,true_label,label,outcome,attempts,epsilon\n" << std::setprecision(10);
  for (const auto& q : r.queries) {
    out << q.seed << ",party" << q.party << ',' << q.pool_index << ',' << q.true_label << ',' << q.label << ','
        << q.outcome << ',' << q.attempts << ',' << q.epsilon << '\n';
  }
}

void write_audit(std::ostream& out, const ExperimentResult& r) {
  for (const auto& line : r.audit) out << line << '\n';
}

std::vector<PartySweepRow> sweep_parties(const ExperimentConfig& cfg, const std::vector<unsigned>& ks) {
  std::vector<PartySweepRow> rows;
  for (unsigned k : ks) {
    ExperimentConfig c = cfg;
    c.parties = k;
    c.queriers = std::min(cfg.queriers, k - 1);
    const ExperimentResult r = run_experiment(c);
    for (std::uint64_t seed : c.seeds) {
      PartySweepRow row{k, seed, 0, 0, 0, 0};
      unsigned n = 0;
      for (std::size_t i = 0; i + 1 < r.reports.size(); ++i) {
        const auto& b = r.reports[i];
        const auto& a = r.reports[i + 1];
        if (b.seed != seed || b.phase != "before" || a.phase != "after" || a.party != b.party) continue;
        row.accuracy_gain += a.accuracy - b.accuracy;
        row.balanced_gain += a.balanced_accuracy - b.balanced_accuracy;
        row.epsilon += a.epsilon_spent;
        row.queries += static_cast<double>(a.queries);
        ++n;
      }
      if (n) {
        row.accuracy_gain /= n;
        row.balanced_gain /= n;
        row.epsilon /= n;
        row.queries /= n;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_party_sweep_csv(std::ostream& out, const std::vector<PartySweepRow>& rows) {
  out << "parties,seed,accuracy_gain,balanced_accuracy_gain,epsilon,queries\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.parties << ',' << r.seed << ',' << r.accuracy_gain << ',' << r.balanced_gain << ',' << r.epsilon
        << ',' << r.queries << '\n';
  }
}

std::vector<SigmaSweepRow> sweep_sigma(const ExperimentConfig& cfg, const std::vector<double>& sigmas) {
  cfg.validate();
  std::vector<SigmaSweepRow> rows;
  auto transport = proto::make_transport(cfg.transport);
  const proto::SessionConfig scfg = session_config(cfg);
  const auto fp = fp_of(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    const World w = build_world(cfg, seed);
    for (double sigma : sigmas) {
      ExperimentConfig c = cfg;
      c.noise.scale = sigma;
      c.noise.validate();
      SigmaSweepRow row{sigma, seed, 0, 0, 0};
      std::size_t agree = 0;
      for (unsigned q = 0; q < cfg.queriers; ++q) {
        Federation fed = federation_for(c, w, seed, q, std::numeric_limits<double>::infinity());
        const learn::LabeledSet& pool = w.part.pools[q];
        const std::size_t n = std::min(cfg.max_queries, pool.rows());
        for (std::size_t t = 0; t < n; ++t) {
          const auto x = row_vector(pool.x, t);
          const auto enc = proto::encode_features(x, fp);
          std::vector<unsigned> votes(scfg.k, 0);
          for (const auto& ap : fed.aps) ++votes[proto::plaintext_vote(ap.model, enc, fp)];
          const auto plurality = static_cast<unsigned>(std::max_element(votes.begin(), votes.end()) - votes.begin());
          const auto s = proto::run_session(scfg, fed.qp, fed.aps, fed.pg, x, *transport,
                                            seed_for(seed, kSession, q, t));
          if (s.outcome != proto::Outcome::Label) continue;
          ++row.labels;
          agree += s.label == plurality;
        }
      }
      row.agreement = row.labels ? static_cast<double>(agree) / static_cast<double>(row.labels) : 0.0;
      dp::RdpLedger one(dp::dense_orders(), cfg.delta, std::numeric_limits<double>::infinity());
      one.charge(c.noise);
      row.epsilon_per_query = dp::rdp_to_dp(one);
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.sigma < b.sigma; });
  return rows;
}

void write_sigma_sweep_csv(std::ostream& out, const std::vector<SigmaSweepRow>& rows) {
  out << "sigma,seed,agreement,epsilon_per_query,labels\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.sigma << ',' << r.seed << ',' << r.agreement << ',' << r.epsilon_per_query << ',' << r.labels << '\n';
  }
}

std::vector<TimingRow> timing_report(const ExperimentConfig& cfg, std::size_t runs) {
  cfg.validate();
  if (runs < 2) throw ConfigError("timing needs at least two runs");
  auto transport = proto::make_transport(cfg.transport);
  const proto::SessionConfig scfg = session_config(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const World w = build_world(cfg, seed);
  Federation fed = federation_for(cfg, w, seed, 0, std::numeric_limits<double>::infinity());
  const learn::LabeledSet& pool = w.part.pools[0];
  std::vector<std::array<double, 3>> samples;
  for (std::size_t i = 0; i < runs; ++i) {
    const auto x = row_vector(pool.x, i % pool.rows());
    const auto s = proto::run_session(scfg, fed.qp, fed.aps, fed.pg, x, *transport, seed_for(seed, kSession, 0, i));
    if (s.outcome != proto::Outcome::Label) throw AbortExhausted("timing session failed: " + s.abort_reason);
    samples.push_back({s.timings.query_s, s.timings.share_s, s.timings.aggregate_s});
  }
  static const char* kSteps[] = {"1a", "1b+1c", "2+3"};
  std::vector<TimingRow> rows;
  for (int j = 0; j < 3; ++j) {
    double mean = 0;
    for (const auto& s : samples) mean += s[j];
    mean /= static_cast<double>(runs);
    double var = 0;
    for (const auto& s : samples) var += (s[j] - mean) * (s[j] - mean);
    var /= static_cast<double>(runs - 1);
    rows.push_back({cfg.backend, kSteps[j], mean, std::sqrt(var), runs});
  }
  return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "backend,step,mean_s,std_s,runs\n" << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.backend << ',' << r.step << ',' << r.mean_s << ',' << r.std_s << ',' << r.runs << '\n';
  }
}

}  // namespace cclab::exp
