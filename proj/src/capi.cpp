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

#include "qgae/qgae.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qgae/circuit.hpp"
#include "qgae/config.hpp"
#include "qgae/dag.hpp"
#include "qgae/error.hpp"
#include "qgae/harness.hpp"

struct qgae_config {
  qgae::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

qgae_status fail(qgae_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <class F>
qgae_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return QGAE_OK;
  } catch (const qgae::Error& e) {
    return fail(static_cast<qgae_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QGAE_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(QGAE_IO, e.what());
  } catch (const std::exception& e) {
    return fail(QGAE_INTERNAL, e.what());
  } catch (...) {
    return fail(QGAE_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void require(bool ok, const char* what) {
  if (!ok) throw qgae::Error(qgae::ErrorCode::kInvalidArgument, what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qgae::Error(qgae::ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw qgae::Error(qgae::ErrorCode::kIo, "cannot write '" + p.string() + "'");
}

std::filesystem::path prepare_dir(const char* out_dir, const qgae::RunConfig& cfg) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.txt", qgae::render_config(cfg));
  return dir;
}

// Single runs use the first cell of the multi-seed protocol, so their
// results line up with seed cfg.seed in `compare`.
qgae::AgentConfig agent_for(const qgae::RunConfig& cfg) {
  qgae::AgentConfig a = cfg.agent;
  a.seed = qgae::derive_seed(cfg.seed, qgae::kAgentStream);
  return a;
}

int episodes_at_target(const qgae::TrainOutcome& o, int target) {
  int n = 0;
  for (const auto& e : o.episodes) n += e.best_depth <= target;
  return n;
}

void write_run(const std::filesystem::path& dir, const qgae::TrainOutcome& o) {
  write_file(dir / "qtable.tsv", o.q.export_tsv());
  write_file(dir / "trace.csv", qgae::trace_csv(o.episodes));
  write_file(dir / "best.qasm", qgae::serialize_qasm(o.best_circuit));
}

}  // namespace

extern "C" {

const char* qgae_last_error(void) { return g_last_error.c_str(); }

const char* qgae_status_name(qgae_status s) {
  switch (s) {
    case QGAE_OK: return "ok";
    case QGAE_INVALID_ARGUMENT: return "invalid argument";
    case QGAE_PARSE: return "parse error";
    case QGAE_OUT_OF_RANGE: return "out of range";
    case QGAE_STALE_ACTION: return "stale action";
    case QGAE_DIMENSION: return "dimension mismatch";
    case QGAE_IO: return "i/o error";
    case QGAE_CONFIG: return "config error";
    case QGAE_CYCLE: return "cycle";
    case QGAE_EMPTY: return "empty input";
    case QGAE_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qgae_version(void) { return "0.1.0"; }

void qgae_string_free(char* s) { std::free(s); }

qgae_status qgae_config_load(const char* path, const char* const* keys, const char* const* values,
                             size_t n, qgae_config** out) {
  return guarded([&] {
    require(out != nullptr, "qgae_config_load: out is null");
    require(n == 0 || (keys && values), "qgae_config_load: null override arrays");
    std::vector<std::pair<std::string, std::string>> overrides;
    for (size_t i = 0; i < n; ++i) {
      require(keys[i] && values[i], "qgae_config_load: null override entry");
      overrides.emplace_back(keys[i], values[i]);
    }
    auto cfg = std::make_unique<qgae_config>();
    cfg->cfg = qgae::load_config(path ? path : "", overrides);
    *out = cfg.release();
  });
}

void qgae_config_free(qgae_config* cfg) { delete cfg; }

qgae_status qgae_config_render(const qgae_config* cfg, char** out) {
  return guarded([&] {
    require(cfg && out, "qgae_config_render: null argument");
    *out = dup_string(qgae::render_config(cfg->cfg));
  });
}

qgae_status qgae_config_get(const qgae_config* cfg, const char* key, char** out) {
  return guarded([&] {
    require(cfg && key && out, "qgae_config_get: null argument");
    std::istringstream lines(qgae::render_config(cfg->cfg));
    const std::string prefix = std::string(key) + " = ";
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind(prefix, 0) == 0) {
        *out = dup_string(line.substr(prefix.size()));
        return;
      }
    }
    throw qgae::Error(qgae::ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
  });
}

qgae_status qgae_bv_qasm(int n_data, uint64_t secret, char** out) {
  return guarded([&] {
    require(out != nullptr, "qgae_bv_qasm: out is null");
    const qgae::BvSpec spec{n_data, secret};
    spec.validate();
    *out = dup_string(qgae::serialize_qasm(qgae::bv_circuit(spec)));
  });
}

qgae_status qgae_qasm_depth(const char* qasm, int* depth) {
  return guarded([&] {
    require(qasm && depth, "qgae_qasm_depth: null argument");
    *depth = qgae::depth(qgae::parse_qasm(qasm));
  });
}

qgae_status qgae_verify(int circuits, uint64_t seed, qgae_verify_result* out, char** messages) {
  return guarded([&] {
    require(out != nullptr, "qgae_verify: out is null");
    require(circuits > 0, "qgae_verify: circuits must be positive");
    const qgae::VerifyReport r = qgae::verify_templates(circuits, seed);
    *out = {r.circuits, r.actions, r.unitary_failures, r.dag_failures, r.max_deviation};
    if (messages) {
      std::string text;
      for (const auto& m : r.messages) text += m + "\n";
      *messages = dup_string(text);
    }
  });
}

qgae_status qgae_grad_check(int dags, uint64_t seed, double* max_rel_error) {
  return guarded([&] {
    require(max_rel_error != nullptr, "qgae_grad_check: out is null");
    require(dags > 0, "qgae_grad_check: dags must be positive");
    *max_rel_error = qgae::gradient_check(dags, seed);
  });
}

qgae_status qgae_train_baseline(const qgae_config* cfg, const char* out_dir, qgae_run_result* out) {
  return guarded([&] {
    require(cfg && out_dir && out, "qgae_train_baseline: null argument");
    const auto dir = prepare_dir(out_dir, cfg->cfg);
    const qgae::BaselineResult r = qgae::run_baseline(cfg->cfg.bv, agent_for(cfg->cfg));
    write_run(dir, r.outcome);
    write_file(dir / "corpus.txt", qgae::export_corpus(r.corpus));
    *out = {r.l_s, r.epochs, r.outcome.best_depth,
            episodes_at_target(r.outcome, cfg->cfg.agent.target_depth)};
  });
}

qgae_status qgae_train_vae(const qgae_config* cfg, const char* corpus_path, const char* out_dir,
                           qgae_vae_result* out) {
  return guarded([&] {
    require(cfg && corpus_path && out_dir && out, "qgae_train_vae: null argument");
    const std::vector<qgae::CircuitDag> corpus = qgae::import_corpus(read_file(corpus_path));
    prepare_dir(out_dir, cfg->cfg);
    qgae::DvaeConfig dc = cfg->cfg.dvae;
    dc.seed = qgae::derive_seed(cfg->cfg.seed, qgae::kDvaeStream);
    const qgae::TrainResult tr = qgae::train_encoder_from_corpus(corpus, dc, out_dir);
    std::vector<qgae::CircuitDag> seen;
    for (std::size_t i : tr.train_indices) seen.push_back(corpus[i]);
    *out = {corpus.size(), seen.size(), tr.epoch_loss.empty() ? 0.0 : tr.epoch_loss.back(),
            qgae::reconstruction_accuracy(tr.model, seen)};
  });
}

qgae_status qgae_train_encoded(const qgae_config* cfg, const char* model_dir, const char* out_dir,
                               qgae_run_result* out) {
  return guarded([&] {
    require(cfg && model_dir && out_dir && out, "qgae_train_encoded: null argument");
    auto model = std::make_shared<const qgae::DvaeModel>(qgae::load_model_dir(model_dir));
    const auto dir = prepare_dir(out_dir, cfg->cfg);
    const qgae::EncodedResult r = qgae::run_encoded(cfg->cfg.bv, model, agent_for(cfg->cfg));
    write_run(dir, r.outcome);
    *out = {r.l_a, r.epochs, r.outcome.best_depth,
            episodes_at_target(r.outcome, cfg->cfg.agent.target_depth)};
  });
}

qgae_status qgae_compare(const qgae_config* cfg, const char* out_dir, qgae_progress_fn progress,
                         void* user, qgae_compare_result* out) {
  return guarded([&] {
    require(cfg && out_dir && out, "qgae_compare: null argument");
    const auto dir = prepare_dir(out_dir, cfg->cfg);
    const auto say = [&](const std::string& line) {
      if (progress) progress(line.c_str(), user);
    };
    const qgae::BenchmarkReport r =
        qgae::run_protocol(cfg->cfg, say, (dir / "models").string());
    qgae::write_report(r, dir.string());
    const int target = cfg->cfg.agent.target_depth;
    *out = {static_cast<int>(r.seeds.size()), r.median_l_s(), r.median_l_a(),
            r.median_improvement(), r.optimal_seeds(target, false), r.optimal_seeds(target, true)};
  });
}

}  // extern "C"
