// Copyright 2026 The qgae Authors
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

#include "qgae/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qgae/error.hpp"

namespace qgae {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorCode::kIo, "cannot write '" + p.string() + "'");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Reference {
  int epochs;
  std::size_t l_s;
  std::size_t l_a;
  double improvement_pct;
};

// Reference state counts for BV sizes 2..5.
const std::map<int, Reference>& references() {
  static const std::map<int, Reference> r = {
      {2, {3000, 2535, 1379, 45.6}},
      {3, {4000, 7439, 5131, 31.02}},
      {4, {5000, 12995, 10592, 18.49}},
      {5, {6000, 15880, 12830, 19.02}},
  };
  return r;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double improvement(std::size_t l_s, std::size_t l_a) {
  if (l_s == 0) return 0.0;
  return (static_cast<double>(l_s) - static_cast<double>(l_a)) / static_cast<double>(l_s);
}

BaselineResult run_baseline(const BvSpec& spec, const AgentConfig& cfg) {
  BaselineResult r;
  r.spec = spec;
  r.epochs = cfg.epochs;
  std::map<std::string, Circuit> visited;
  r.outcome = train_agent(bv_circuit(spec), Abstraction::exact(), cfg,
                          [&](const StateKey& key, const Circuit& c) {
                            visited.try_emplace(key, c);
                          });
  r.l_s = r.outcome.state_count;
  r.corpus_keys.reserve(visited.size());
  r.corpus.reserve(visited.size());
  for (const auto& [key, c] : visited) {
    r.corpus_keys.push_back(key);
    r.corpus.push_back(to_dag(c));
  }
  return r;
}

TrainResult train_encoder_from_corpus(std::span<const CircuitDag> corpus, const DvaeConfig& cfg,
                                      const std::string& out_dir) {
  if (corpus.empty()) throw Error(ErrorCode::kEmpty, "cannot train an encoder on an empty corpus");
  TrainResult res = train(corpus, cfg);
  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream ckpt;
    res.model.save(ckpt);
    write_file(dir / "model.ckpt", ckpt.str());
    nlohmann::ordered_json meta;
    meta["format"] = "qgae-dvae";
    meta["version"] = 1;
    meta["config"] = {{"d_h", cfg.d_h},
                      {"d_z", cfg.d_z},
                      {"alpha", cfg.alpha},
                      {"gamma", cfg.gamma},
                      {"beta", cfg.beta},
                      {"lr", cfg.lr},
                      {"epochs", cfg.epochs},
                      {"batch_size", cfg.batch_size},
                      {"bin_width", cfg.bin_width},
                      {"max_decode_nodes", cfg.max_decode_nodes},
                      {"max_train_dags", cfg.max_train_dags},
                      {"seed", cfg.seed}};
    meta["corpus"] = {{"size", corpus.size()}, {"hash", hex64(fnv1a(export_corpus(corpus)))}};
    meta["checkpoint_hash"] = hex64(fnv1a(ckpt.str()));
    meta["metrics"] = {{"epoch_loss", res.epoch_loss}, {"epoch_accuracy", res.epoch_accuracy}};
    write_file(dir / "model.json", meta.dump(2) + "\n");
  }
  return res;
}

EncodedResult run_encoded(const BvSpec& spec, std::shared_ptr<const DvaeModel> model,
                          const AgentConfig& cfg) {
  if (!model) throw Error(ErrorCode::kInvalidArgument, "run_encoded needs a model");
  EncodedResult r;
  r.spec = spec;
  r.epochs = cfg.epochs;
  const double bin = model->config().bin_width;
  const Abstraction abs = Abstraction::latent(std::move(model), bin);
  r.outcome = train_agent(bv_circuit(spec), abs, cfg);
  r.l_a = r.outcome.state_count;
  r.distinct_circuits = abs.cache_size();
  return r;
}

SeedReport compare(const BaselineResult& baseline, const EncodedResult& encoded) {
  if (baseline.spec.n_data != encoded.spec.n_data || baseline.spec.secret != encoded.spec.secret ||
      baseline.epochs != encoded.epochs) {
    throw Error(ErrorCode::kInvalidArgument, "baseline and encoded runs are for different benchmarks");
  }
  SeedReport s;
  s.l_s = baseline.l_s;
  s.l_a = encoded.l_a;
  s.improvement = improvement(s.l_s, s.l_a);
  s.best_depth_qasm = baseline.outcome.best_depth;
  s.best_depth_encoder = encoded.outcome.best_depth;
  s.trace_qasm = baseline.outcome.episodes;
  s.trace_encoder = encoded.outcome.episodes;
  return s;
}

double BenchmarkReport::median_l_s() const {
  std::vector<double> v;
  for (const SeedReport& s : seeds) v.push_back(static_cast<double>(s.l_s));
  return median(v);
}

double BenchmarkReport::median_l_a() const {
  std::vector<double> v;
  for (const SeedReport& s : seeds) v.push_back(static_cast<double>(s.l_a));
  return median(v);
}

double BenchmarkReport::median_improvement() const {
  std::vector<double> v;
  for (const SeedReport& s : seeds) v.push_back(s.improvement);
  return median(v);
}

int BenchmarkReport::optimal_seeds(int target_depth, bool encoder) const {
  int n = 0;
  for (const SeedReport& s : seeds) n += (encoder ? s.best_depth_encoder : s.best_depth_qasm) <= target_depth;
  return n;
}

BenchmarkReport run_protocol(const RunConfig& cfg,
                             const std::function<void(const std::string&)>& progress,
                             const std::string& models_dir) {
  cfg.validate();
  BenchmarkReport rep;
  rep.spec = cfg.bv;
  rep.epochs = cfg.agent.epochs;
  rep.config_text = render_config(cfg);
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  for (int i = 0; i < cfg.n_seeds; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    AgentConfig agent = cfg.agent;
    agent.seed = derive_seed(seed, kAgentStream);
    DvaeConfig dvae = cfg.dvae;
    dvae.seed = derive_seed(seed, kDvaeStream);

    const BaselineResult base = run_baseline(cfg.bv, agent);
    say("seed " + std::to_string(seed) + ": baseline l_s=" + std::to_string(base.l_s) +
        " best depth " + std::to_string(base.outcome.best_depth));
    const std::string dir =
        models_dir.empty() ? std::string()
                           : (std::filesystem::path(models_dir) / ("seed-" + std::to_string(seed))).string();
    TrainResult tr = train_encoder_from_corpus(base.corpus, dvae, dir);
    std::vector<CircuitDag> seen;
    for (std::size_t i : tr.train_indices) seen.push_back(base.corpus[i]);
    const double acc = reconstruction_accuracy(tr.model, seen);
    say("seed " + std::to_string(seed) + ": encoder loss " + fixed(tr.epoch_loss.back(), 4) +
        " reconstruction accuracy " + fixed(acc, 4));
    auto model = std::make_shared<const DvaeModel>(std::move(tr.model));
    const EncodedResult enc = run_encoded(cfg.bv, model, agent);
    say("seed " + std::to_string(seed) + ": encoded l_a=" + std::to_string(enc.l_a) +
        " best depth " + std::to_string(enc.outcome.best_depth));
    SeedReport s = compare(base, enc);
    s.seed = seed;
    s.reconstruction_accuracy = acc;
    rep.seeds.push_back(std::move(s));
  }
  return rep;
}

std::string states_csv(const BenchmarkReport& r) {
  std::string out = "bv_size,secret,epochs,seed,l_s,l_a,improvement_pct\n";
  for (const SeedReport& s : r.seeds) {
    out += std::to_string(r.spec.n_data) + "," + std::to_string(r.spec.secret) + "," +
           std::to_string(r.epochs) + "," + std::to_string(s.seed) + "," + std::to_string(s.l_s) +
           "," + std::to_string(s.l_a) + "," + fixed(100.0 * s.improvement, 2) + "\n";
  }
  return out;
}

std::string depth_trace_csv(const BenchmarkReport& r) {
  std::string out = "bv_size,seed,mode,episode,final_depth,best_depth\n";
  const std::string prefix = std::to_string(r.spec.n_data) + ",";
  for (const SeedReport& s : r.seeds) {
    for (const auto& [mode, trace] : {std::pair{"qasm", &s.trace_qasm}, std::pair{"encoder", &s.trace_encoder}}) {
      for (std::size_t e = 0; e < trace->size(); ++e) {
        const EpisodeSummary& ep = (*trace)[e];
        out += prefix + std::to_string(s.seed) + "," + mode + "," + std::to_string(e) + "," +
               std::to_string(ep.final_depth) + "," + std::to_string(ep.best_depth) + "\n";
      }
    }
  }
  return out;
}

std::string report_text(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "Bernstein-Vazirani n=" << r.spec.n_data << " secret=" << r.spec.secret
     << " epochs=" << r.epochs << "\n\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-6s %-8s %-10s %10s %10s %9s %10s %10s %9s\n", "BV", "Epochs",
                "Seed", "QASM", "Encoder", "Improv.", "depth(Q)", "depth(E)", "recon");
  os << line;
  for (const SeedReport& s : r.seeds) {
    std::snprintf(line, sizeof line, "%-6d %-8d %-10llu %10zu %10zu %8.2f%% %10d %10d %9.4f\n",
                  r.spec.n_data, r.epochs, static_cast<unsigned long long>(s.seed), s.l_s, s.l_a,
                  100.0 * s.improvement, s.best_depth_qasm, s.best_depth_encoder,
                  s.reconstruction_accuracy);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-6d %-8d %-10s %10.1f %10.1f %8.2f%%\n", r.spec.n_data,
                r.epochs, "median", r.median_l_s(), r.median_l_a(), 100.0 * r.median_improvement());
  os << line;
  const auto it = references().find(r.spec.n_data);
  if (it != references().end()) {
    const Reference& ref = it->second;
    std::snprintf(line, sizeof line, "%-6d %-8d %-10s %10zu %10zu %8.2f%%\n", r.spec.n_data,
                  ref.epochs, "reference", ref.l_s, ref.l_a, ref.improvement_pct);
    os << line;
  }
  return os.str();
}

void write_report(const BenchmarkReport& r, const std::string& dir) {
  const std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  write_file(d / "states.csv", states_csv(r));
  write_file(d / "depth_trace.csv", depth_trace_csv(r));
  write_file(d / "report.txt", report_text(r));
  write_file(d / "config.txt", r.config_text);
}

std::string trace_csv(const std::vector<EpisodeSummary>& trace) {
  std::string out = "episode,final_depth,best_depth,state_count\n";
  for (std::size_t e = 0; e < trace.size(); ++e) {
    const EpisodeSummary& ep = trace[e];
    out += std::to_string(e) + "," + std::to_string(ep.final_depth) + "," +
           std::to_string(ep.best_depth) + "," + std::to_string(ep.state_count) + "\n";
  }
  return out;
}

DvaeModel load_model_dir(const std::string& dir) {
  const std::filesystem::path d(dir);
  std::ifstream meta_in(d / "model.json");
  if (!meta_in) throw Error(ErrorCode::kIo, "cannot read '" + (d / "model.json").string() + "'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("model.json: ") + e.what());
  }
  DvaeConfig cfg;
  try {
    const auto& c = meta.at("config");
    cfg.d_h = c.at("d_h").get<int>();
    cfg.d_z = c.at("d_z").get<int>();
    cfg.alpha = c.at("alpha").get<double>();
    cfg.gamma = c.at("gamma").get<double>();
    cfg.beta = c.at("beta").get<double>();
    cfg.lr = c.at("lr").get<double>();
    cfg.epochs = c.at("epochs").get<int>();
    cfg.batch_size = c.at("batch_size").get<int>();
    cfg.bin_width = c.at("bin_width").get<double>();
    cfg.max_decode_nodes = c.at("max_decode_nodes").get<int>();
    cfg.max_train_dags = c.at("max_train_dags").get<int>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("model.json config: ") + e.what());
  }
  DvaeModel m(cfg);
  std::ifstream ckpt(d / "model.ckpt");
  if (!ckpt) throw Error(ErrorCode::kIo, "cannot read '" + (d / "model.ckpt").string() + "'");
  m.load(ckpt);
  return m;
}

VerifyReport verify_templates(int circuits, std::uint64_t seed, double tol) {
  VerifyReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wires(2, 4);
  std::uniform_int_distribution<int> gates(0, 12);
  auto note = [&](const std::string& msg) {
    if (rep.messages.size() < 10) rep.messages.push_back(msg);
  };
  for (int i = 0; i < circuits; ++i) {
    const int n = wires(rng);
    const int g = gates(rng);
    const Circuit c = random_icmh_circuit(n, g, rng());
    ++rep.circuits;
    const auto bad = validate(to_dag(c));
    if (!bad.empty()) {
      ++rep.dag_failures;
      note("dag of '" + state_string(c) + "': " + bad.front());
    }
    const Eigen::MatrixXcd u = unitary(c);
    for (const Action& a : enumerate_actions(c)) {
      ++rep.actions;
      const Circuit r = apply(c, a);
      const double dev = (unitary(r) - u).cwiseAbs().maxCoeff();
      rep.max_deviation = std::max(rep.max_deviation, dev);
      if (!(dev <= tol)) {
        ++rep.unitary_failures;
        note(a.key() + " on '" + state_string(c) + "' changes the unitary by " + std::to_string(dev));
      }
      if (!validate(to_dag(r)).empty()) {
        ++rep.dag_failures;
        note("dag after " + a.key() + " on '" + state_string(c) + "' is invalid");
      }
    }
  }
  return rep;
}

double gradient_check(int dags, std::uint64_t seed) {
  double worst = 0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < dags; ++i) {
    DvaeConfig cfg;
    cfg.d_h = 6;
    cfg.d_z = 3;
    cfg.beta = 0.05;
    cfg.seed = rng();
    DvaeModel m(cfg);
    const CircuitDag d = to_dag(random_icmh_circuit(2, 2 + i % 2, rng()));
    nn::Vec noise(cfg.d_z);
    for (Eigen::Index j = 0; j < noise.size(); ++j) noise[j] = normal(rng);
    const auto params = m.params();
    const auto f = [&](bool grad) {
      if (grad) nn::zero_grads(params);
      return loss(m, d, noise, grad ? 1.0 : 0.0).total;
    };
    worst = std::max(worst, nn::finite_diff_check(f, params));
  }
  return worst;
}

}  // namespace qgae
